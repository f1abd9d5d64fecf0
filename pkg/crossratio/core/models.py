"""
Pydantic models for files, reports and command dispatch.
"""
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator


class PatternFile(BaseModel):
    """A side-pairing pattern as stored on disk."""
    genus: int = Field(..., ge=1)
    sides: Optional[int] = None
    pairing: List[List[int]] = Field(..., description="1-based side pairs [[i, j], ...]")
    name: Optional[str] = None


class ParamsFile(BaseModel):
    """A parameter point: pattern (inline or a path) plus edge values."""
    pattern: Union[PatternFile, str]
    values: Dict[str, float]
    dependent: Optional[List[str]] = None

    @field_validator("dependent")
    @classmethod
    def _three_labels(cls, v: Optional[List[str]]) -> Optional[List[str]]:
        if v is not None and len(v) != 3:
            raise ValueError("dependent must name exactly three edges")
        return v


class FreeValuesFile(BaseModel):
    """Free edge values for a dependent solve."""
    values: Dict[str, float]
    dependent: Optional[List[str]] = None


class SubwordFlag(BaseModel):
    """Classification of one cyclic subword (1-based start)."""
    start: int
    length: int
    kind: str


class VerificationReport(BaseModel):
    """Closing residual and cyclic subword admissibility of a point."""
    residual: float
    verdict: Literal["in-space", "boundary", "out"]
    subwords: List[SubwordFlag] = Field(default_factory=list)
    by_length: Dict[int, str] = Field(
        default_factory=dict,
        description="Worst classification among cyclic subwords of each length"
    )


class AdmissibilityReport(BaseModel):
    """Output of the admissible command."""
    entries: List[float]
    kind: str
    margin: float
    violation: Optional[List[int]] = None
    condition: Optional[str] = None
    threshold: Optional[float] = None
    tangency_points: List[Optional[float]] = Field(default_factory=list)


class DependentSolveResult(BaseModel):
    """The solved dependent triple with its thresholds."""
    labels: List[str]
    x: float
    y: float
    z: float
    alpha: float
    beta: float
    gamma: float
    iterations: int = Field(..., description="Newton polish iterations")
    evaluations: int = Field(..., description="Outer function evaluations")
    residual: float


class TorusReport(BaseModel):
    """Output of the torus command."""
    x: float
    y: float
    z: float
    verification: VerificationReport
    traces: Optional[List[List[float]]] = None


class CensusReport(BaseModel):
    genus: int
    count: int
    patterns: List[PatternFile]


class GeneratorAgreement(BaseModel):
    """Trace agreement of one generator between two points."""
    generator: str
    first: List[float]
    second: List[float]
    deviation: float
    agrees: bool


class RigidityReport(BaseModel):
    """Trace comparison of two points; traces are those of the first point."""
    generators: List[str]
    traces: List[List[float]]
    comparison: List[GeneratorAgreement] = Field(default_factory=list)
    verdict: Literal["equal", "different"]


class AuditReport(BaseModel):
    """Tangency audit of a developed scene."""
    checked: int
    failures: int
    max_discriminant: float
    closure_deviation: float
    consistency_deviation: float
    passed: bool


class SceneCircleRecord(BaseModel):
    address: List[int]
    hermitian: List[float] = Field(..., description="(h11, Re h12, Im h12, h22), unit norm")
    shape: Dict[str, Any]


class MergedCircleRecord(BaseModel):
    hermitian: List[float]
    shape: Dict[str, Any]
    multiplicity: int


class SceneFile(BaseModel):
    """A developed scene as written by the develop command."""
    pattern: PatternFile
    depth: int
    circles: List[SceneCircleRecord]
    merged: List[MergedCircleRecord]
    interstices: int
    closure_deviation: float
    consistency_deviation: float
    audit: Optional[AuditReport] = None


class ExecutionLogEntry(BaseModel):
    """Single entry in the execution log."""
    step: str
    status: str = "completed"  # "completed", "error"
    timestamp: float
    summary: Optional[str] = None


class CommandRequest(BaseModel):
    """A parsed command line."""
    command: str
    options: Dict[str, Any] = Field(default_factory=dict)
    config_path: Optional[str] = None
    log_level: Optional[str] = None


class CommandResult(BaseModel):
    """Outcome of one command."""
    command: str
    status: str  # "completed", "failed"
    exit_code: int
    stdout: str = ""
    reason: Optional[Dict[str, Any]] = None
    log: List[ExecutionLogEntry] = Field(default_factory=list)
