"""
Runtime configuration.

All numeric knobs live in one pydantic model so a run can be reproduced from a
single JSON file (``--config``). Library functions take explicit keyword
tolerances; workflows read them from the active settings.
"""
import json
from pathlib import Path
from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field

from crossratio.core.errors import InputError


class Settings(BaseModel):
    """Tolerances, solver knobs and rendering defaults."""

    model_config = ConfigDict(extra="forbid")

    dead_band: float = Field(
        1e-12, gt=0, description="Sign tests treat |v| <= dead_band as zero"
    )
    acceptance_tolerance: float = Field(
        1e-9, gt=0, description="Residual / comparison tolerance for verdicts"
    )
    polish_tolerance: float = Field(
        1e-12, gt=0, description="Target residual of the Newton polish"
    )
    tangency_tolerance: float = Field(
        1e-9, gt=0, description="Discriminant tolerance for tangency"
    )
    point_tolerance: float = Field(
        1e-12, gt=0, description="Distance below which two points coincide"
    )
    max_polish_iterations: int = Field(50, ge=0)
    max_bracket_doublings: int = Field(60, ge=1)
    bracket_initial_width: float = Field(1.0, gt=0)
    bracket_growth: float = Field(2.0, gt=1)
    root_method: Literal["brentq", "bisect"] = Field(
        "brentq", description="scipy.optimize bracketed scalar root finder"
    )
    root_xtol: float = Field(1e-14, gt=0)
    enumeration_workers: int = Field(1, ge=1)
    svg_stroke_width: float = Field(0.01, gt=0)
    svg_min_radius: float = Field(0.0, ge=0)
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        "WARNING", description="Root logging level for the CLI"
    )

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "Settings":
        """
        Load settings overrides from a JSON file.

        Args:
            path: JSON object whose keys are Settings fields

        Returns:
            Settings with the overrides applied

        Raises:
            InputError: If the file cannot be read or does not validate
        """
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
            return cls.model_validate(raw)
        except (OSError, ValueError) as e:
            raise InputError(f"Failed to load settings from '{path}': {e}")


# Global settings instance
settings = Settings()
