"""The C-ensemble: diagonalizers of a fixed Hamiltonian modulo U(1)^d × S_d."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np
import numpy.typing as npt
import structlog

from censemble.config import DEFAULT_SETTINGS
from censemble.errors import InvalidInputError, UnsupportedOrderError
from censemble.linalg.tensors import (
    ComplexMatrix,
    EigenSystem,
    HermitianOperator,
    check_cap,
    kron,
    max_norm,
    permutation_matrix,
    swap,
)

from .haar import haar_plateau
from .moments import MomentOperator, PlateauOperator, index_grid, phase_balanced_mask

log = structlog.get_logger()


@dataclass(frozen=True, eq=False)
class Diagonalizer:
    """Seed element C₀ of the orbit, with rows ⟨E_l|·⟩ so that C₀HC₀† = diag(E)."""

    C: ComplexMatrix
    eigensystem: EigenSystem

    @property
    def dim(self) -> int:
        return self.eigensystem.dim


@dataclass(frozen=True, eq=False)
class CEnsembleSample:
    """C = diag(e^{iφ})·P_π·C₀."""

    permutation: npt.NDArray[np.int64]
    phases: npt.NDArray[np.float64]
    C: ComplexMatrix


@dataclass(frozen=True, eq=False)
class OrbitRepresentative:
    """P_π·C₀ for one permutation; the diagonal phases are averaged analytically."""

    permutation: tuple[int, ...]
    C: ComplexMatrix


def build_diagonalizer(
    es: EigenSystem,
    h: HermitianOperator | None = None,
    *,
    tol: float = DEFAULT_SETTINGS.tolerances.hermiticity,
) -> Diagonalizer:
    """Return C₀ with ⟨l|C₀|m⟩ = ⟨E_l|m⟩, checking C₀HC₀† against diag(E)."""
    es.require_nondegenerate("build_diagonalizer")
    c0 = np.ascontiguousarray(es.vectors.conj().T)
    matrix = es.reconstruct() if h is None else h.matrix
    scale = max(1.0, max_norm(matrix))
    residual = max_norm(c0 @ matrix @ c0.conj().T - np.diag(es.values))
    if residual > 10 * tol * scale:
        raise InvalidInputError(
            f"eigenvectors do not diagonalize H: residual {residual:.2e} > {10 * tol * scale:.1e}"
        )
    c0.setflags(write=False)
    return Diagonalizer(c0, es)


def orbit_residual(dz: Diagonalizer, c: npt.ArrayLike) -> float:
    """Max of the unitarity defect of C and the off-diagonal part of C·H·C†."""
    matrix = np.asarray(c, dtype=np.complex128)
    h = dz.eigensystem.reconstruct()
    rotated = matrix @ h @ matrix.conj().T
    off_diagonal = rotated - np.diag(np.diag(rotated))
    unitarity = matrix.conj().T @ matrix - np.eye(dz.dim)
    return max(max_norm(off_diagonal), max_norm(unitarity))


def _rng(seed: int | np.random.Generator) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _draw(
    dz: Diagonalizer,
    n: int,
    rng: np.random.Generator,
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.float64], npt.NDArray[np.complex128]]:
    d = dz.dim
    permutations = rng.permuted(np.tile(np.arange(d), (n, 1)), axis=1)
    phases = rng.uniform(0.0, 2 * np.pi, (n, d))
    # (P_π C₀)[π(l)] = C₀[l]
    rows = np.argsort(permutations, axis=1)
    matrices = np.exp(1j * phases)[:, :, None] * dz.C[rows]
    return permutations, phases, matrices


def sample_C(dz: Diagonalizer, seed: int | np.random.Generator) -> CEnsembleSample:
    permutations, phases, matrices = _draw(dz, 1, _rng(seed))
    return CEnsembleSample(permutations[0], phases[0], matrices[0])


def sample_batch(dz: Diagonalizer, n: int, rng: np.random.Generator) -> npt.NDArray[np.complex128]:
    """``n`` ensemble members as an (n, d, d) stack."""
    if n < 1:
        raise InvalidInputError(f"batch size must be positive, got {n}")
    return _draw(dz, n, rng)[2]


def enumerate_orbit(
    dz: Diagonalizer,
    max_d: int = DEFAULT_SETTINGS.caps.enumeration_max_d,
) -> Iterator[OrbitRepresentative]:
    """Yield the d! permutation representatives P_π·C₀."""
    check_cap(dz.dim, max_d, what="enumeration dimension")
    for perm in itertools.permutations(range(dz.dim)):
        yield OrbitRepresentative(perm, permutation_matrix(perm) @ dz.C)


def _replicated(u: ComplexMatrix, k: int, max_dim: int) -> ComplexMatrix:
    u_dag = u.conj().T
    factors = [u] * k + [u_dag] * k
    out = factors[0]
    for factor in factors[1:]:
        out = kron(out, factor, max_dim=max_dim)
    return out


def enumerated_moment(
    dz: Diagonalizer,
    k: int,
    *,
    max_d: int = DEFAULT_SETTINGS.caps.enumeration_max_d,
    max_dim: int = DEFAULT_SETTINGS.caps.max_twofold_dim,
) -> MomentOperator:
    """E[C^{⊗k}⊗C†^{⊗k}] by summing the d! representatives and integrating phases exactly."""
    if k not in (1, 2):
        raise UnsupportedOrderError(f"enumerated moments implemented for k ∈ {{1, 2}}, got {k}")
    d = dz.dim
    check_cap(d ** (2 * k), max_dim, what="moment dimension")
    size = d ** (2 * k)
    total = np.zeros((size, size), dtype=np.complex128)
    count = 0
    for rep in enumerate_orbit(dz, max_d):
        total += _replicated(rep.C, k, max_dim)
        count += 1
    mask = phase_balanced_mask(k, d).reshape(size, size)
    log.debug("cens.enumerated", d=d, k=k, representatives=count)
    return MomentOperator(2 * k, d, np.where(mask, total / count, 0.0))


def u1sd_moment(
    k: int,
    d: int,
    *,
    max_dim: int = DEFAULT_SETTINGS.caps.max_twofold_dim,
) -> MomentOperator:
    """Moment operator of the U(1)^d × S_d ensemble of phased permutation matrices."""
    if k not in (1, 2):
        raise UnsupportedOrderError(f"U(1)^d×S_d moments implemented for k ∈ {{1, 2}}, got {k}")
    if d < 2:
        raise InvalidInputError(f"U(1)^d×S_d moments need d ≥ 2, got {d}")
    check_cap(d ** (2 * k), max_dim, what="moment dimension")
    if k == 1:
        return MomentOperator(2, d, swap(d) / d)

    a1, a2, a3, a4, b1, b2, b3, b4 = index_grid(d, 8)

    IndexArray = npt.NDArray[np.int64]

    def pair_probability(
        x: IndexArray, y: IndexArray, a: IndexArray, b: IndexArray
    ) -> npt.NDArray[np.float64]:
        # P(π(x) = a, π(y) = b) for a uniform permutation π
        return np.where(x == y, (a == b) / d, (a != b) / (d * (d - 1)))

    direct = (a3 == b1) & (a4 == b2) & (b3 == a1) & (b4 == a2)
    crossed = (a4 == b1) & (a3 == b2) & (b3 == a2) & (b4 == a1)
    collision = (a1 == a2) & (a2 == b3) & (b3 == b4) & (a3 == a4) & (a4 == b1) & (b1 == b2)
    tensor = (
        direct * pair_probability(a3, a4, a1, a2)
        + crossed * pair_probability(a4, a3, a1, a2)
        - collision / d
    )
    return MomentOperator.from_tensor(np.asarray(tensor, dtype=np.complex128), 4, d)


def c_moment(
    dz: Diagonalizer,
    k: int,
    *,
    max_dim: int = DEFAULT_SETTINGS.caps.max_twofold_dim,
) -> MomentOperator:
    """Exact C-ensemble moment from the U(1)^d × S_d moment dressed by C₀.

    With C = W·C₀, E[C^{⊗k}⊗C†^{⊗k}] = (I^{⊗k}⊗C₀†^{⊗k})·Φ^{U(1)^d×S_d}·(C₀^{⊗k}⊗I^{⊗k}).
    """
    d = dz.dim
    phi = u1sd_moment(k, d, max_dim=max_dim).matrix
    eye = np.eye(d ** k, dtype=np.complex128)
    c0k = dz.C if k == 1 else kron(dz.C, dz.C, max_dim=max_dim)
    left = kron(eye, c0k.conj().T, max_dim=max_dim)
    right = kron(c0k, eye, max_dim=max_dim)
    return MomentOperator(2 * k, d, left @ phi @ right)


def plateau_exact(es: EigenSystem) -> PlateauOperator:
    """G = Σ_l |E_l E_l⟩⟨E_l E_l|."""
    es.require_nondegenerate("plateau_exact")
    d = es.dim
    doubled = np.einsum("il,jl->ijl", es.vectors, es.vectors).reshape(d * d, d)
    return PlateauOperator(doubled @ doubled.conj().T, d)


def plateau_split(g: PlateauOperator, d: int | None = None) -> tuple[ComplexMatrix, ComplexMatrix]:
    """Split G into the Haar plateau and the non-universal remainder G[H]."""
    d = g.dimension if d is None else d
    if d != g.dimension:
        raise InvalidInputError(f"plateau operator has dimension {g.dimension}, not {d}")
    haar_part = haar_plateau(d).matrix
    return haar_part, g.matrix - haar_part


def ipr_bar(dz: Diagonalizer) -> float:
    """(1/d)Σ_{kl}|⟨k|E_l⟩|⁴, between 1/d and 1."""
    return float(np.sum(np.abs(dz.C) ** 4) / dz.dim)


def frame_potential2(dz: Diagonalizer) -> float:
    """F₂ = 2 + ((d+1)/(d−1)·(IPR̄ − 2/(d+1)))²."""
    d = dz.dim
    if d < 2:
        raise InvalidInputError("the frame potential closed form needs d ≥ 2")
    deviation = (d + 1) / (d - 1) * (ipr_bar(dz) - 2 / (d + 1))
    return 2.0 + deviation**2


def _derangements(n: int) -> int:
    # D(n) = n·D(n−1) + (−1)^n
    count = 1
    for m in range(1, n + 1):
        count = m * count + (-1) ** m
    return count


def frame_potential_exact(d: int, k: int = 2) -> Fraction:
    """E|Tr U†V|^{2k} over independent pairs of one C-ensemble.

    Tr U†V reduces to Σ_{l fixed by π} e^{iφ_l} for a uniform phased
    permutation, whose 2k-th absolute moment is f (k=1) or 2f² − f (k=2)
    for f fixed points; the average runs over the fixed-point distribution.
    """
    if k not in (1, 2):
        raise UnsupportedOrderError(f"frame potentials implemented for k ∈ {{1, 2}}, got {k}")
    if d < 1:
        raise InvalidInputError(f"dimension must be positive, got {d}")
    total = Fraction(0)
    for f in range(d + 1):
        weight = math.comb(d, f) * _derangements(d - f)
        total += weight * (f if k == 1 else 2 * f * f - f)
    return total / math.factorial(d)
