from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, Field, field_validator


class CapsConfig(BaseModel):
    """Dimension caps guarding dense allocations."""

    max_dim: int = Field(default=4096, description="Largest single-space dimension d.")
    max_twofold_dim: int = Field(
        default=4096,
        description="Largest twofold dimension d² for operators on H⊗H.",
    )
    enumeration_max_d: int = Field(
        default=8,
        description="Largest d for which all d! orbit representatives are enumerated.",
    )


class TolerancesConfig(BaseModel):
    """Numerical tolerances shared by builders, eigensolver and closed forms."""

    hermiticity: float = Field(default=1e-12, description="Max-norm bound on M − M†.")
    degeneracy: float = Field(
        default=1e-9,
        description="Gap flagged degenerate when below this fraction of the mean spacing.",
    )
    state_trace: float = Field(default=1e-10, description="Unit-trace tolerance for states.")


class MonteCarloConfig(BaseModel):
    """Sampling parameters for Monte-Carlo oracles."""

    samples: int = Field(default=10_000, description="Default number of ensemble samples.")
    chunk_size: int = Field(
        default=1000,
        description="Samples per independently seeded chunk; fixes the merge order.",
    )
    threads: Optional[int] = Field(
        default=None,
        description="Worker threads; falls back to CENSEMBLE_THREADS, then cpu_count.",
    )


class SolverConfig(BaseModel):
    """Plateau-equation Newton solver settings."""

    max_iter: int = Field(default=100, description="Newton iterations per attempt.")
    tol: float = Field(default=1e-10, description="Target plateau-equation residual.")
    restarts: int = Field(default=4, description="Attempts before giving up.")
    fd_step: float = Field(default=1e-6, description="Relative finite-difference step.")
    seed: int = Field(default=0, description="Seed for restart perturbations.")


class BallConvention(str, Enum):
    """Real dimension of the ε-ball used to count unitaries."""

    REAL = "real"  # d² real parameters of U(d)
    GL = "gl"  # 2d² real parameters of the flat GL(d, C) measure


class VolumeConfig(BaseModel):
    """Regulator settings for cardinality and entropy estimates."""

    epsilon: float = Field(default=1.0, gt=0, description="Ball radius ε.")
    ball: BallConvention = Field(default=BallConvention.REAL)


class OutputConfig(BaseModel):
    """Where and how CLI results are written."""

    directory: Path = Path("results")
    format: Literal["json", "csv"] = "json"

    @field_validator("directory", mode="before")
    def _expand_path(cls, value: str | Path) -> Path:
        return Path(value).expanduser()


class Settings(BaseModel):
    """Aggregate configuration root."""

    caps: CapsConfig = Field(default_factory=CapsConfig)
    tolerances: TolerancesConfig = Field(default_factory=TolerancesConfig)
    monte_carlo: MonteCarloConfig = Field(default_factory=MonteCarloConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    volume: VolumeConfig = Field(default_factory=VolumeConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)


DEFAULT_SETTINGS = Settings()


def load_settings(path: Path) -> Settings:
    """Load configuration from YAML into strongly-typed settings."""

    with path.expanduser().open("r", encoding="utf-8") as stream:
        data = yaml.safe_load(stream) or {}

    return Settings.model_validate(data)
