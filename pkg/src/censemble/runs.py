"""Typed description of one CLI run; its JSON dump is the config recorded in every output."""
from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any, Literal, Optional

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, Field, field_validator, model_validator

from censemble.models.factory import ModelSpec


class Command(str, Enum):
    MODEL = "model"
    SFF = "sff"
    TWOPOINT = "twopoint"
    OTOC = "otoc"
    PLATEAU = "plateau"
    FRAME = "frame"
    VOLUME = "volume"
    FIGURES = "figures"


class TimeGrid(BaseModel):
    """``steps + 1`` equally spaced times from ``start`` to ``stop``."""

    start: float = 0.0
    stop: float = Field(description="Last time point.")
    steps: int = Field(ge=1, description="Number of intervals.")

    @model_validator(mode="after")
    def _check_order(self) -> TimeGrid:
        if not self.stop > self.start:
            raise ValueError(f"time grid needs stop > start, got {self.start}..{self.stop}")
        return self

    def points(self) -> npt.NDArray[np.float64]:
        return np.linspace(self.start, self.stop, self.steps + 1)


class RunConfig(BaseModel):
    version: Literal[1] = 1
    command: Command
    model: Optional[ModelSpec] = None
    times: Optional[TimeGrid] = None
    beta: float = Field(default=0.0, ge=0, description="Inverse temperature β.")
    seeds: list[int] = Field(default_factory=lambda: [0], min_length=1)
    output: Path = Field(default=Path("results"), description="Output directory.")
    format: Literal["json", "csv"] = "json"
    threads: Optional[int] = Field(default=None, ge=1)
    options: dict[str, Any] = Field(
        default_factory=dict,
        description="Command-specific flags, recorded verbatim.",
    )

    @field_validator("output", mode="before")
    def _expand_path(cls, value: str | Path) -> Path:
        return Path(value).expanduser()

    @property
    def master_seed(self) -> int:
        return self.seeds[0]

    @property
    def requested_dim(self) -> int | None:
        """Dimension named on the command line, if the model is sized by `d`."""
        d = self.model.parameters.get("d") if self.model is not None else self.options.get("d")
        return int(d) if d is not None else None

    def output_path(self, stem: str, suffix: str | None = None) -> Path:
        return self.output / f"{stem}.{suffix or self.format}"
