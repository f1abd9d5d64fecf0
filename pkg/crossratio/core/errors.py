"""
Exception hierarchy for the cross-ratio toolkit.

Every error carries a stable ``code`` and the process ``exit_code`` the
command runner maps it to:

- ``InputError`` (exit 1): the request or its data is malformed.
- ``VerdictError`` (exit 2): the input is well formed but fails a
  mathematical test (inadmissible, out of space, not tangent, ...).
- ``InvariantError`` (exit 2): a condition the mathematics rules out was hit.
"""
from typing import Any, Dict, Optional


class CrossRatioError(Exception):
    """Base class for all toolkit errors."""

    code: str = "error"
    exit_code: int = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = dict(details or {})

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form used for the one-line stderr reason."""
        return {"error": self.code, "message": self.message, "details": self.details}


# Validation errors (exit 1)

class InputError(CrossRatioError):
    code = "invalid-input"
    exit_code = 1


class NonPositiveCrossRatioError(InputError):
    code = "nonpositive-cross-ratio"


class DegeneratePointsError(InputError):
    code = "degenerate-points"


class InvalidCircleError(InputError):
    code = "invalid-circle"


class NotAnInvolutionError(InputError):
    code = "not-an-involution"


class CornerCycleError(InputError):
    code = "corner-cycle-length"


class GenusMismatchError(InputError):
    code = "genus-mismatch"


class UnknownEdgeError(InputError):
    code = "unknown-edge"


class PatternMismatchError(InputError):
    code = "pattern-mismatch"


class PreconditionError(InputError):
    code = "precondition"


class DegenerateLayoutError(InputError):
    code = "degenerate-layout"


# Mathematical verdicts (exit 2)

class VerdictError(CrossRatioError):
    code = "verdict"
    exit_code = 2


class NotTangentError(VerdictError):
    code = "not-tangent"


class NotStrictlyAdmissibleError(VerdictError):
    code = "not-strictly-admissible"


class InadmissibleWordError(VerdictError):
    code = "inadmissible"


class OutsideConvexImageError(VerdictError):
    code = "outside-convex-image"


class FreeValuesInadmissibleError(VerdictError):
    code = "free-values-inadmissible"


class PointNotInSpaceError(VerdictError):
    code = "not-in-space"


class RigidityDifferentError(VerdictError):
    code = "rigidity-different"


# Internal invariant failures (exit 2)

class InvariantError(CrossRatioError):
    code = "invariant"
    exit_code = 2


class BracketNotFoundError(InvariantError):
    code = "bracket-not-found"


class PolishNotConvergedError(InvariantError):
    code = "polish-not-converged"


class NoNonseparatingTripleError(InvariantError):
    code = "no-nonseparating-triple"
