"""Dense complex linear algebra and the structural tensors on H⊗H.

Index convention: in every tensor product the first replica is the slow
index, so ``kron(A, B)[i*dB + k, j*dB + l] == A[i, j] * B[k, l]`` and a
twofold matrix reshaped to ``(d, d, d, d)`` reads ``[i1, i2, j1, j2]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Literal, Sequence

import numpy as np
import numpy.typing as npt
import structlog

from censemble.config import DEFAULT_SETTINGS
from censemble.errors import (
    DegenerateSpectrumError,
    DimensionCapError,
    EigenSolverError,
    InvalidInputError,
)

log = structlog.get_logger()

ComplexMatrix = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]

_PHASE_THRESHOLD = 1e-8


def as_complex_matrix(data: npt.ArrayLike, *, name: str = "matrix") -> ComplexMatrix:
    """Coerce to a finite 2-D complex128 array."""
    array = np.asarray(data, dtype=np.complex128)
    if array.ndim != 2:
        raise InvalidInputError(f"{name} must be two-dimensional, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return array


def check_cap(dim: int, cap: int, *, what: str = "dimension") -> None:
    if dim > cap:
        log.warning("caps.exceeded", what=what, requested=dim, cap=cap)
        raise DimensionCapError(f"{what} {dim} exceeds configured cap {cap}", requested=dim, cap=cap)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense square matrix whose hermiticity was verified at construction."""

    matrix: ComplexMatrix
    hermiticity_tol: float = DEFAULT_SETTINGS.tolerances.hermiticity

    def __post_init__(self) -> None:
        matrix = as_complex_matrix(self.matrix, name="Hermitian operator")
        if matrix.shape[0] != matrix.shape[1]:
            raise InvalidInputError(f"operator must be square, got shape {matrix.shape}")
        deviation = float(np.max(np.abs(matrix - matrix.conj().T), initial=0.0))
        if deviation > self.hermiticity_tol:
            raise InvalidInputError(
                f"operator is not Hermitian: ‖M − M†‖_max = {deviation:.3e} "
                f"> {self.hermiticity_tol:.1e}"
            )
        object.__setattr__(self, "matrix", _frozen(matrix))

    @classmethod
    def symmetrized(cls, data: npt.ArrayLike, *, tol: float | None = None) -> HermitianOperator:
        """Build from a matrix that is Hermitian up to rounding, averaging M and M†."""
        matrix = as_complex_matrix(data)
        hermitian = 0.5 * (matrix + matrix.conj().T)
        return cls(hermitian, DEFAULT_SETTINGS.tolerances.hermiticity if tol is None else tol)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def centered(self) -> HermitianOperator:
        """Return the traceless part M − Tr(M)/d."""
        shift = np.trace(self.matrix).real / self.dim
        return HermitianOperator(self.matrix - shift * np.eye(self.dim), self.hermiticity_tol)

    def expectation(self) -> float:
        """Normalized trace ⟨M⟩ = Tr(M)/d."""
        return float(np.trace(self.matrix).real / self.dim)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Ascending spectrum, eigenvector columns and spacing statistics."""

    values: RealArray
    vectors: ComplexMatrix
    mean_spacing: float
    spacings: RealArray
    degenerate: npt.NDArray[np.bool_]
    degeneracy_tol: float = DEFAULT_SETTINGS.tolerances.degeneracy

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen(np.asarray(self.values, dtype=np.float64)))
        object.__setattr__(self, "vectors", _frozen(np.asarray(self.vectors, dtype=np.complex128)))
        object.__setattr__(self, "spacings", _frozen(np.asarray(self.spacings, dtype=np.float64)))
        object.__setattr__(self, "degenerate", _frozen(np.asarray(self.degenerate, dtype=bool)))

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    @property
    def is_degenerate(self) -> bool:
        return bool(np.any(self.degenerate))

    def require_nondegenerate(self, what: str) -> None:
        if self.is_degenerate:
            gaps = [int(i) for i in np.flatnonzero(self.degenerate)]
            log.warning("spectrum.degenerate", operation=what, gaps=gaps)
            raise DegenerateSpectrumError(
                f"{what} needs a non-degenerate spectrum; degenerate gaps at {gaps}",
                gaps=gaps,
            )

    def reconstruct(self) -> ComplexMatrix:
        return (self.vectors * self.values) @ self.vectors.conj().T

    @classmethod
    def from_values(
        cls,
        values: npt.ArrayLike,
        vectors: npt.ArrayLike | None = None,
        *,
        degeneracy_tol: float = DEFAULT_SETTINGS.tolerances.degeneracy,
    ) -> EigenSystem:
        """Build spacing statistics for an ascending spectrum (identity vectors by default)."""
        energies = np.asarray(values, dtype=np.float64)
        if energies.ndim != 1 or energies.size == 0:
            raise InvalidInputError("spectrum must be a non-empty one-dimensional array")
        if np.any(np.diff(energies) < 0):
            raise InvalidInputError("spectrum must be sorted ascending")
        d = energies.size
        basis = np.eye(d, dtype=np.complex128) if vectors is None else np.asarray(vectors)
        gaps = np.diff(energies)
        mean_spacing = float((energies[-1] - energies[0]) / (d - 1)) if d > 1 else 0.0
        if mean_spacing > 0:
            spacings = gaps / mean_spacing
            degenerate = gaps < degeneracy_tol * mean_spacing
        else:
            spacings = np.zeros_like(gaps)
            degenerate = np.ones_like(gaps, dtype=bool)
        return cls(energies, basis, mean_spacing, spacings, degenerate, degeneracy_tol)


def _fix_phases(vectors: ComplexMatrix) -> ComplexMatrix:
    """Rotate each column so its first non-negligible component is real positive."""
    fixed = vectors.copy()
    for j in range(fixed.shape[1]):
        column = fixed[:, j]
        lead = int(np.argmax(np.abs(column) > _PHASE_THRESHOLD))
        pivot = column[lead]
        fixed[:, j] = column * (np.conj(pivot) / abs(pivot))
    return fixed


def eigh(
    h: HermitianOperator,
    tol: float | None = None,
    *,
    degeneracy_tol: float = DEFAULT_SETTINGS.tolerances.degeneracy,
    max_dim: int = DEFAULT_SETTINGS.caps.max_dim,
) -> EigenSystem:
    """Diagonalize ``h`` with ascending eigenvalues and a deterministic phase convention.

    The reconstruction and unitarity residuals are checked against
    ``10·tol`` relative to ``max(1, ‖H‖_max)``.
    """
    tol = h.hermiticity_tol if tol is None else tol
    check_cap(h.dim, max_dim)
    try:
        values, vectors = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as exc:
        log.error("eigh.failed", dim=h.dim, error=str(exc))
        raise EigenSolverError(f"eigensolver did not converge: {exc}") from exc

    vectors = _fix_phases(vectors)
    es = EigenSystem.from_values(values, vectors, degeneracy_tol=degeneracy_tol)

    scale = max(1.0, float(np.max(np.abs(h.matrix), initial=0.0)))
    bound = 10 * tol * scale
    residual = float(np.max(np.abs(es.reconstruct() - h.matrix), initial=0.0))
    unitarity = float(np.max(np.abs(vectors.conj().T @ vectors - np.eye(h.dim)), initial=0.0))
    if residual > bound or unitarity > 10 * tol:
        log.error("eigh.residual", residual=residual, unitarity=unitarity, bound=bound)
        raise EigenSolverError(
            f"eigendecomposition residual {residual:.2e} / unitarity {unitarity:.2e} "
            f"exceeds bound {bound:.1e}"
        )
    return es


def kron(
    a: npt.ArrayLike,
    b: npt.ArrayLike,
    *,
    max_dim: int = DEFAULT_SETTINGS.caps.max_twofold_dim,
) -> ComplexMatrix:
    """Kronecker product with the first factor as the slow index."""
    left = as_complex_matrix(a, name="left factor")
    right = as_complex_matrix(b, name="right factor")
    check_cap(left.shape[0] * right.shape[0], max_dim, what="kron dimension")
    return np.kron(left, right)


def twofold_dim(m: ComplexMatrix) -> int:
    """Return d for a square matrix of size d², or raise."""
    rows, cols = m.shape
    d = math.isqrt(rows)
    if rows != cols or d * d != rows:
        raise InvalidInputError(f"expected a square d²×d² matrix, got shape {m.shape}")
    return d


def partial_trace(m: npt.ArrayLike, side: Literal["first", "second"] = "first") -> ComplexMatrix:
    """Trace out one replica of an operator on H⊗H."""
    matrix = as_complex_matrix(m)
    d = twofold_dim(matrix)
    tensor = matrix.reshape(d, d, d, d)
    if side == "first":
        return np.einsum("iaib->ab", tensor)
    if side == "second":
        return np.einsum("aibi->ab", tensor)
    raise InvalidInputError(f"side must be 'first' or 'second', got {side!r}")


class StructureKind(str, Enum):
    SWAP = "swap"
    COPY = "copy"
    S_TENSOR = "s_tensor"
    SYM_PROJ = "sym_proj"
    ANTISYM_PROJ = "antisym_proj"
    PERMUTATION = "permutation"


def permutation_matrix(permutation: Sequence[int]) -> ComplexMatrix:
    """Matrix P with P|l⟩ = |π(l)⟩ for a zero-based permutation π."""
    perm = np.asarray(permutation, dtype=np.int64)
    d = perm.size
    if d == 0 or sorted(perm.tolist()) != list(range(d)):
        raise InvalidInputError(f"invalid permutation {list(perm)}")
    p = np.zeros((d, d), dtype=np.complex128)
    p[perm, np.arange(d)] = 1.0
    return p


def swap(d: int) -> ComplexMatrix:
    idx = np.arange(d * d)
    i, j = np.divmod(idx, d)
    s = np.zeros((d * d, d * d), dtype=np.complex128)
    s[j * d + i, idx] = 1.0
    return s


def copy_tensor(d: int) -> ComplexMatrix:
    """COPY: |l⟩ ↦ |ll⟩ as a d²×d matrix."""
    c = np.zeros((d * d, d), dtype=np.complex128)
    c[np.arange(d) * (d + 1), np.arange(d)] = 1.0
    return c


def s_tensor(d: int) -> ComplexMatrix:
    """Σ_l |ll⟩⟨ll|, the product of the two COPY orientations."""
    c = copy_tensor(d)
    return c @ c.conj().T


def structure_operator(
    kind: StructureKind | str,
    d: int,
    permutation: Sequence[int] | None = None,
) -> ComplexMatrix:
    kind = StructureKind(kind)
    if d < 1:
        raise InvalidInputError(f"dimension must be positive, got {d}")
    if kind is StructureKind.SWAP:
        return swap(d)
    if kind is StructureKind.COPY:
        return copy_tensor(d)
    if kind is StructureKind.S_TENSOR:
        return s_tensor(d)
    if kind is StructureKind.SYM_PROJ:
        return 0.5 * (np.eye(d * d) + swap(d))
    if kind is StructureKind.ANTISYM_PROJ:
        return 0.5 * (np.eye(d * d) - swap(d))
    if permutation is None or len(permutation) != d:
        raise InvalidInputError(f"PERMUTATION needs a permutation of length {d}")
    return permutation_matrix(permutation)


def max_norm(m: npt.ArrayLike) -> float:
    return float(np.max(np.abs(np.asarray(m)), initial=0.0))
