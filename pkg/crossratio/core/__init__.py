"""
Core components: settings, errors, models and the step registry.

The command runner lives in ``crossratio.core.engine``; it is not imported here
because it depends on the file store.
"""
from crossratio.core.config import settings, Settings
from crossratio.core.errors import CrossRatioError, InputError, InvariantError, VerdictError
from crossratio.core.registry import registry, StepRegistry
from crossratio.core.models import (
    CommandRequest,
    CommandResult,
    ExecutionLogEntry,
    VerificationReport,
    DependentSolveResult,
    RigidityReport,
    AuditReport,
)

__all__ = [
    "settings",
    "Settings",
    "CrossRatioError",
    "InputError",
    "InvariantError",
    "VerdictError",
    "registry",
    "StepRegistry",
    "CommandRequest",
    "CommandResult",
    "ExecutionLogEntry",
    "VerificationReport",
    "DependentSolveResult",
    "RigidityReport",
    "AuditReport",
]
