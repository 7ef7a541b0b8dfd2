"""Exception hierarchy with machine-readable exit codes."""
from __future__ import annotations

from typing import Any


class CEnsembleError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code: int = 1


class ConfigValidationError(CEnsembleError):
    """Raised when critical configuration is missing or invalid."""

    exit_code = 2


class InvalidInputError(CEnsembleError, ValueError):
    """Raised when an operator, state, permutation or spectrum violates a precondition."""

    exit_code = 2


class SymmetryError(InvalidInputError):
    """Raised when a requested symmetry sector is not conserved by the Hamiltonian."""


class UnsupportedOrderError(InvalidInputError):
    """Raised for moment or Weingarten orders outside the supported range."""


class WeingartenPoleError(InvalidInputError):
    """Raised when a Weingarten function is evaluated at a pole in d."""


class DegenerateSpectrumError(CEnsembleError):
    """Raised when a closed form needs a non-degenerate spectrum."""

    exit_code = 3

    def __init__(self, message: str, *, gaps: list[int] | None = None) -> None:
        super().__init__(message)
        self.gaps = gaps or []


class DimensionCapError(CEnsembleError):
    """Raised when a requested dimension exceeds the configured cap."""

    exit_code = 4

    def __init__(self, message: str, *, requested: int, cap: int) -> None:
        super().__init__(message)
        self.requested = requested
        self.cap = cap


class SolverNonConvergenceError(CEnsembleError):
    """Raised when the plateau solver stalls; carries the best report found."""

    exit_code = 5

    def __init__(self, message: str, *, report: Any = None) -> None:
        super().__init__(message)
        self.report = report


class EigenSolverError(CEnsembleError):
    """Raised when the Hermitian eigensolver fails or misses its residual contract."""

    exit_code = 6
