"""Replica-space evaluation of out-of-time-ordered correlators.

Tr(W(t)VW(t)V) = Tr(Ŵ(t)·V̂) on H⊗H with Ŵ = W⊗W, V̂ = (V⊗V)·SWAP and the
Kronecker-sum Hamiltonian Ĥ₊ = H⊗I + I⊗H. Both operators commute with
SWAP, so the four-point function splits into two-point functions on the
symmetric and antisymmetric subspaces, each averaged over its own C-ensemble.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Literal

import numpy as np
import numpy.typing as npt
import structlog

from censemble.config import DEFAULT_SETTINGS
from censemble.correlators import c_two_point, direct_two_point
from censemble.ensembles.cens import plateau_exact
from censemble.ensembles.moments import PlateauOperator
from censemble.errors import InvalidInputError
from censemble.linalg.tensors import (
    ComplexMatrix,
    EigenSystem,
    HermitianOperator,
    as_complex_matrix,
    check_cap,
    eigh,
    kron,
    swap,
    twofold_dim,
)
from censemble.spectral import twofold_form_factors

log = structlog.get_logger()


class ReplicaSign(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


class Subspace(str, Enum):
    NONE = "none"
    SYM = "sym"
    ANTISYM = "antisym"


def subspace_basis(d: int, which: Subspace | str) -> ComplexMatrix:
    """Orthonormal columns spanning the ±1 eigenspace of SWAP.

    Symmetric columns are |ll⟩ and (|lm⟩ + |ml⟩)/√2 for l < m, antisymmetric
    ones (|lm⟩ − |ml⟩)/√2, both in lexicographic (l, m) order.
    """
    which = Subspace(which)
    if which is Subspace.NONE:
        return np.eye(d * d, dtype=np.complex128)
    sign = 1.0 if which is Subspace.SYM else -1.0
    columns = []
    for l in range(d):  # noqa: E741
        for m in range(l, d):
            column = np.zeros(d * d, dtype=np.complex128)
            if l == m:
                if which is Subspace.ANTISYM:
                    continue
                column[l * d + l] = 1.0
            else:
                column[l * d + m] = 1 / np.sqrt(2)
                column[m * d + l] = sign / np.sqrt(2)
            columns.append(column)
    return np.stack(columns, axis=1)


@dataclass(frozen=True, eq=False)
class ReplicaSpace:
    """Twofold space with a Kronecker-sum Hamiltonian, optionally restricted to a SWAP sector."""

    d: int
    sign: ReplicaSign = ReplicaSign.PLUS
    projected: Subspace = Subspace.NONE

    def __post_init__(self) -> None:
        object.__setattr__(self, "sign", ReplicaSign(self.sign))
        object.__setattr__(self, "projected", Subspace(self.projected))
        if self.d < 1:
            raise InvalidInputError(f"dimension must be positive, got {self.d}")
        if self.sign is ReplicaSign.MINUS and self.projected is not Subspace.NONE:
            raise InvalidInputError("H⊗I − I⊗H anticommutes with SWAP and has no sector blocks")

    @property
    def dimension(self) -> int:
        if self.projected is Subspace.SYM:
            return self.d * (self.d + 1) // 2
        if self.projected is Subspace.ANTISYM:
            return self.d * (self.d - 1) // 2
        return self.d * self.d

    @property
    def basis(self) -> ComplexMatrix:
        return subspace_basis(self.d, self.projected)

    def project(self, m: npt.ArrayLike) -> ComplexMatrix:
        return project_subspace(m, self.projected)

    def hamiltonian(self, h: HermitianOperator) -> HermitianOperator:
        if h.dim != self.d:
            raise InvalidInputError(f"Hamiltonian has dimension {h.dim}, replica space expects {self.d}")
        full = replica_hamiltonian(h, self.sign)
        if self.projected is Subspace.NONE:
            return full
        return HermitianOperator.symmetrized(self.project(full.matrix))


def replica_hamiltonian(
    h: HermitianOperator,
    sign: ReplicaSign | str = ReplicaSign.PLUS,
    *,
    max_dim: int = DEFAULT_SETTINGS.caps.max_twofold_dim,
) -> HermitianOperator:
    """H⊗I ± I⊗H with spectrum {E_l ± E_m}."""
    sign = ReplicaSign(sign)
    eye = np.eye(h.dim)
    left = kron(h.matrix, eye, max_dim=max_dim)
    right = kron(eye, h.matrix, max_dim=max_dim)
    return HermitianOperator.symmetrized(left + right if sign is ReplicaSign.PLUS else left - right)


def project_subspace(m: npt.ArrayLike, which: Subspace | str) -> ComplexMatrix:
    """B†MB for the isometry B onto the chosen SWAP eigenspace."""
    matrix = as_complex_matrix(m)
    b = subspace_basis(twofold_dim(matrix), which)
    return b.conj().T @ matrix @ b


@dataclass(frozen=True, eq=False)
class SubspaceProblem:
    """Projected Hamiltonian spectrum and the projected operators Ŵ, V̂ of one sector."""

    which: Subspace
    eigensystem: EigenSystem
    w_hat: ComplexMatrix
    v_hat: ComplexMatrix

    @property
    def dimension(self) -> int:
        return self.eigensystem.dim

    def plateau(self) -> PlateauOperator:
        return plateau_exact(self.eigensystem)


def replica_subspaces(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    *,
    max_dim: int = DEFAULT_SETTINGS.caps.max_twofold_dim,
) -> tuple[SubspaceProblem, SubspaceProblem]:
    """Symmetric and antisymmetric sector problems of the OTOC."""
    d = es.dim
    if w.dim != d or v.dim != d:
        raise InvalidInputError(f"W ({w.dim}) and V ({v.dim}) must match the spectrum ({d})")
    check_cap(d * d, max_dim, what="replica dimension")
    h = HermitianOperator.symmetrized(es.reconstruct())
    w_full = kron(w.matrix, w.matrix, max_dim=max_dim)
    v_full = kron(v.matrix, v.matrix, max_dim=max_dim) @ swap(d)
    problems = []
    for which in (Subspace.SYM, Subspace.ANTISYM):
        space = ReplicaSpace(d, ReplicaSign.PLUS, which)
        sector_es = eigh(space.hamiltonian(h), max_dim=max_dim)
        problems.append(
            SubspaceProblem(which, sector_es, space.project(w_full), space.project(v_full))
        )
    return problems[0], problems[1]


@dataclass(frozen=True)
class OTOCCoefficients:
    """Time-dependent weights of the OTOC closed form."""

    four_point: float
    disconnected: float
    plateau_plus: float
    plateau_minus: float


@dataclass(frozen=True)
class ReplicaContractions:
    """Time-independent traces entering the OTOC closed form."""

    four_point: float  # Tr(WVWV)
    disconnected: float  # (Tr WV)²
    plateau_plus: float  # Tr(G[Ĥ₊]·Ŵ⊗V̂) on the symmetric sector
    plateau_minus: float


def _require_closed_form_dim(d: int) -> None:
    if d < 3:
        raise InvalidInputError(
            f"the OTOC closed form needs d ≥ 3 (antisymmetric sector has dimension "
            f"{d * (d - 1) // 2}); use otoc_direct instead"
        )


def otoc_coefficients(es: EigenSystem, t: float) -> OTOCCoefficients:
    """c± = |Z±(it)|²/(D±(D±−1)) − 1/(D±−1) combined into the closed-form weights."""
    d = es.dim
    _require_closed_form_dim(d)
    k_plus, k_minus = twofold_form_factors(es, t)
    d_plus, d_minus = d * (d + 1) / 2, d * (d - 1) / 2
    c_plus = k_plus / (d_plus * (d_plus - 1)) - 1 / (d_plus - 1)
    c_minus = k_minus / (d_minus * (d_minus - 1)) - 1 / (d_minus - 1)
    return OTOCCoefficients(
        four_point=(c_plus + c_minus) / 2,
        disconnected=(c_plus - c_minus) / 2,
        plateau_plus=1 - c_plus,
        plateau_minus=1 - c_minus,
    )


def replica_contractions(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    *,
    max_dim: int = DEFAULT_SETTINGS.caps.max_twofold_dim,
) -> ReplicaContractions:
    _require_closed_form_dim(es.dim)
    sym, antisym = replica_subspaces(w, v, es, max_dim=max_dim)
    wv = w.matrix @ v.matrix
    return ReplicaContractions(
        four_point=float(np.trace(wv @ wv).real),
        disconnected=float(np.trace(wv).real ** 2),
        plateau_plus=sym.plateau().contract(sym.w_hat, sym.v_hat).real,
        plateau_minus=antisym.plateau().contract(antisym.w_hat, antisym.v_hat).real,
    )


def otoc_closed_form(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    t: float,
    *,
    normalized: bool = False,
    contractions: ReplicaContractions | None = None,
) -> float:
    """C-ensemble average of Tr(W(t)VW(t)V), or of (1/d)Tr(...) when ``normalized``.

    Pass precomputed ``contractions`` to evaluate many times without
    re-diagonalizing the replica sectors.
    """
    _require_closed_form_dim(es.dim)
    traces = replica_contractions(w, v, es) if contractions is None else contractions
    coeff = otoc_coefficients(es, t)
    value = (
        coeff.four_point * traces.four_point
        + coeff.disconnected * traces.disconnected
        + coeff.plateau_plus * traces.plateau_plus
        + coeff.plateau_minus * traces.plateau_minus
    )
    return value / es.dim if normalized else value


def otoc_series(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    times: npt.ArrayLike,
    *,
    normalized: bool = False,
) -> npt.NDArray[np.float64]:
    traces = replica_contractions(w, v, es)
    grid = np.asarray(times, dtype=np.float64)
    log.debug("otoc.series", d=es.dim, points=grid.size)
    return np.array(
        [otoc_closed_form(w, v, es, float(t), normalized=normalized, contractions=traces) for t in grid]
    )


def otoc_direct(w: HermitianOperator, v: HermitianOperator, es: EigenSystem, t: float) -> float:
    """(1/d)Tr(W(t)VW(t)V) for the fixed Hamiltonian, evolved in its eigenbasis."""
    if w.dim != es.dim or v.dim != es.dim:
        raise InvalidInputError("W, V and the spectrum must share the dimension")
    u = es.vectors
    phases = np.exp(1j * t * (es.values[:, None] - es.values[None, :]))
    w_t = phases * (u.conj().T @ w.matrix @ u)
    product = w_t @ (u.conj().T @ v.matrix @ u)
    return float(np.trace(product @ product).real / es.dim)


def square_commutator(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    t: float,
    method: Literal["direct", "ensemble"] = "direct",
) -> float:
    """−(1/d)Tr([W(t), V]²) = 2[(1/d)Tr(W(t)²V²) − (1/d)Tr(W(t)VW(t)V)]."""
    w2 = HermitianOperator.symmetrized(w.matrix @ w.matrix)
    v2 = HermitianOperator.symmetrized(v.matrix @ v.matrix)
    if method == "direct":
        ordered = complex(direct_two_point(w2, v2, es, t)).real
        out_of_order = otoc_direct(w, v, es, t)
    elif method == "ensemble":
        ordered = c_two_point(w2, v2, es, t)
        out_of_order = otoc_closed_form(w, v, es, t, normalized=True)
    else:
        raise InvalidInputError(f"method must be 'direct' or 'ensemble', got {method!r}")
    return 2 * (ordered - out_of_order)
