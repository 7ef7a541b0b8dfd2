"""Haar-ensemble reference quantities: moments, twofold channel, plateau and correlators."""
from __future__ import annotations

import itertools
from functools import reduce

import numpy as np
import numpy.typing as npt
import structlog

from censemble.config import DEFAULT_SETTINGS
from censemble.errors import InvalidInputError, UnsupportedOrderError
from censemble.linalg.tensors import (
    ComplexMatrix,
    EigenSystem,
    HermitianOperator,
    as_complex_matrix,
    check_cap,
    swap,
    twofold_dim,
)
from censemble.spectral import thermal_kernel

from .moments import MomentOperator, PlateauOperator, index_grid
from .weingarten import CycleType, compose, inverse, weingarten

log = structlog.get_logger()


def haar_batch(d: int, n: int, rng: np.random.Generator) -> npt.NDArray[np.complex128]:
    """``n`` Haar unitaries as an (n, d, d) stack: QR of Ginibre matrices with phase fix."""
    z = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    return q * (diag / np.abs(diag))[:, None, :]


def haar_sample(d: int, seed: int | np.random.Generator) -> ComplexMatrix:
    if d < 1:
        raise InvalidInputError(f"dimension must be positive, got {d}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return haar_batch(d, 1, rng)[0]


def haar_moment(
    k: int,
    d: int,
    *,
    max_dim: int = DEFAULT_SETTINGS.caps.max_twofold_dim,
) -> MomentOperator:
    """E[U^{⊗k}⊗U†^{⊗k}] over Haar unitaries as a Weingarten sum over S_k×S_k."""
    if k not in (1, 2):
        raise UnsupportedOrderError(f"Haar moments implemented for k ∈ {{1, 2}}, got {k}")
    if d < 2:
        raise InvalidInputError(f"Haar moments need d ≥ 2, got {d}")
    check_cap(d ** (2 * k), max_dim, what="moment dimension")

    g = index_grid(d, 4 * k)
    # U_{i j}: rows a_1..a_k, columns b_1..b_k; U†_{a b} = conj(U_{b a})
    i, j = g[:k], g[2 * k : 3 * k]
    i_bar, j_bar = g[3 * k : 4 * k], g[k : 2 * k]
    perms = list(itertools.permutations(range(k)))
    tensor = np.zeros((d,) * (4 * k), dtype=np.complex128)
    for sigma in perms:
        row_match = reduce(np.logical_and, [i[r] == i_bar[sigma[r]] for r in range(k)])
        for tau in perms:
            col_match = reduce(np.logical_and, [j[r] == j_bar[tau[r]] for r in range(k)])
            wg = float(weingarten(CycleType.of(compose(sigma, inverse(tau))), d))
            tensor += wg * (row_match & col_match)
    return MomentOperator.from_tensor(tensor, 2 * k, d)


def haar_twofold_channel(a: npt.ArrayLike) -> ComplexMatrix:
    """E[U^{⊗2} A U†^{⊗2}] = α(A)·I + β(A)·SWAP."""
    matrix = as_complex_matrix(a)
    d = twofold_dim(matrix)
    if d < 2:
        raise InvalidInputError("the twofold channel needs d ≥ 2")
    s = swap(d)
    tr_a = np.trace(matrix)
    tr_sa = np.trace(s @ matrix)
    alpha = (tr_a - tr_sa / d) / (d**2 - 1)
    beta = (tr_sa - tr_a / d) / (d**2 - 1)
    return alpha * np.eye(d * d) + beta * s


def haar_plateau(d: int) -> PlateauOperator:
    if d < 2:
        raise InvalidInputError(f"the Haar plateau needs d ≥ 2, got {d}")
    return PlateauOperator((np.eye(d * d) + swap(d)) / (d + 1), d)


def _normalized_traces(w: HermitianOperator, v: HermitianOperator) -> tuple[float, float, float]:
    if w.dim != v.dim:
        raise InvalidInputError(f"W and V dimensions differ: {w.dim} vs {v.dim}")
    d = w.dim
    return w.expectation(), v.expectation(), float(np.trace(w.matrix @ v.matrix).real / d)


def haar_two_point(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    t: float,
    beta: float = 0.0,
    *,
    regulated: bool = True,
) -> complex:
    """⟨W⟩⟨V⟩ + (K·d/Z(β) − 1)(⟨WV⟩ − ⟨W⟩⟨V⟩)/(d² − 1).

    At β = 0, K·d/Z(β) = |Z(it)|². The result is real except for the plain
    (non-regulated) finite-temperature ordering.
    """
    mean_w, mean_v, mean_wv = _normalized_traces(w, v)
    d = es.dim
    kernel, z_beta = thermal_kernel(es, beta, t, regulated=regulated)
    return mean_w * mean_v + (kernel * d / z_beta - 1) * (mean_wv - mean_w * mean_v) / (d**2 - 1)


def haar_long_time_two_point(w: HermitianOperator, v: HermitianOperator) -> float:
    """Infinite-time average of the Haar two-point function for a non-degenerate spectrum."""
    mean_w, mean_v, mean_wv = _normalized_traces(w, v)
    return mean_w * mean_v + (mean_wv - mean_w * mean_v) / (w.dim + 1)
