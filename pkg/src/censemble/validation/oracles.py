"""Monte-Carlo and enumeration oracles for the closed forms.

Each oracle samples the relevant ensemble through the chunked engine in
``censemble.estimates`` and reports z-scores against the closed form.
"""
from __future__ import annotations

from typing import Any

import numpy as np
import numpy.typing as npt
import structlog
from pydantic import BaseModel, Field
from scipy import integrate

from censemble.config import DEFAULT_SETTINGS
from censemble.correlators import CorrelatorSeries, c_two_point
from censemble.ensembles.cens import (
    Diagonalizer,
    build_diagonalizer,
    c_moment,
    enumerate_orbit,
    enumerated_moment,
    frame_potential2,
    frame_potential_exact,
    ipr_bar,
    sample_batch,
)
from censemble.ensembles.haar import haar_batch, haar_moment
from censemble.ensembles.moments import MomentOperator, PlateauOperator
from censemble.errors import InvalidInputError, UnsupportedOrderError
from censemble.estimates import EnsembleEstimate, RunningMoments, Sampler, estimate, run_chunked
from censemble.linalg.tensors import (
    EigenSystem,
    HermitianOperator,
    kron,
    max_norm,
    s_tensor,
    swap,
)
from censemble.otoc import SubspaceProblem, otoc_closed_form, replica_subspaces

log = structlog.get_logger()

_MC = DEFAULT_SETTINGS.monte_carlo


class OracleReport(BaseModel):
    """Closed form against a Monte-Carlo estimate, entry by entry."""

    name: str
    samples: int
    seed: int
    reference: list[float] = Field(description="Closed-form values (real parts).")
    estimate: list[float] = Field(description="Monte-Carlo means (real parts).")
    stderr: list[float]
    z_scores: list[float]
    max_abs_z: float
    threshold: float = 5.0
    meta: dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_abs_z <= self.threshold


def z_scores(
    mean: npt.ArrayLike,
    stderr: npt.ArrayLike,
    reference: npt.ArrayLike,
    *,
    atol: float = 1e-12,
) -> npt.NDArray[np.float64]:
    """|mean − reference|/stderr; entries without spread score 0 if exact and ∞ otherwise."""
    gap = np.abs(np.asarray(mean) - np.asarray(reference))
    err = np.asarray(stderr, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(err > 0, gap / np.where(err > 0, err, 1.0), np.where(gap <= atol, 0.0, np.inf))
    return np.asarray(z, dtype=np.float64)


def _report(
    name: str,
    moments: RunningMoments,
    reference: npt.ArrayLike,
    seed: int,
    **meta: Any,
) -> OracleReport:
    mean = np.ravel(moments.mean)
    err = np.ravel(moments.stderr)
    ref = np.ravel(np.asarray(reference))
    z = z_scores(mean, err, ref)
    report = OracleReport(
        name=name,
        samples=moments.n,
        seed=seed,
        reference=[float(x) for x in np.real(ref)],
        estimate=[float(x) for x in np.real(mean)],
        stderr=[float(x) for x in err],
        z_scores=[float(x) for x in z],
        max_abs_z=float(np.max(z)) if z.size else 0.0,
        meta=meta,
    )
    log.info("oracle.compared", oracle=name, samples=moments.n, max_abs_z=report.max_abs_z)
    return report


def _batch_kron(a: npt.NDArray[np.complex128], b: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
    n = a.shape[0]
    return np.einsum("nij,nkl->nikjl", a, b).reshape(
        n, a.shape[1] * b.shape[1], a.shape[2] * b.shape[2]
    )


def _replicated_batch(u: npt.NDArray[np.complex128], k: int) -> npt.NDArray[np.complex128]:
    """Stack of U^{⊗k}⊗U†^{⊗k}, flattened per sample."""
    u_dag = np.conj(np.swapaxes(u, 1, 2))
    factors = [u] * k + [u_dag] * k
    out = factors[0]
    for factor in factors[1:]:
        out = _batch_kron(out, factor)
    return out.reshape(u.shape[0], -1)


def _check_order(k: int) -> None:
    if k not in (1, 2):
        raise UnsupportedOrderError(f"moment oracles implemented for k ∈ {{1, 2}}, got {k}")


def haar_moment_mc(
    k: int,
    d: int,
    n_samples: int,
    seed: int,
    *,
    chunk_size: int = _MC.chunk_size,
    threads: int | None = None,
) -> OracleReport:
    """Sampled E[U^{⊗k}⊗U†^{⊗k}] over Haar unitaries against the Weingarten sum."""
    _check_order(k)
    reference = haar_moment(k, d).matrix
    moments = run_chunked(
        lambda rng, n: _replicated_batch(haar_batch(d, n, rng), k),
        n_samples,
        seed,
        chunk_size=chunk_size,
        threads=threads,
    )
    return _report("haar_moment", moments, reference, seed, k=k, d=d)


def c_moment_mc(
    dz: Diagonalizer,
    k: int,
    n_samples: int,
    seed: int,
    *,
    chunk_size: int = _MC.chunk_size,
    threads: int | None = None,
) -> OracleReport:
    """Sampled C-ensemble moment against the U(1)^d×S_d closed form."""
    _check_order(k)
    reference = c_moment(dz, k).matrix
    moments = run_chunked(
        lambda rng, n: _replicated_batch(sample_batch(dz, n, rng), k),
        n_samples,
        seed,
        chunk_size=chunk_size,
        threads=threads,
    )
    return _report("c_moment", moments, reference, seed, k=k, d=dz.dim)


def one_design_residual(dz: Diagonalizer) -> float:
    """‖E[C⊗C†] − SWAP/d‖_max with the orbit enumerated exactly."""
    return max_norm(enumerated_moment(dz, 1).matrix - swap(dz.dim) / dz.dim)


def moment_residual(dz: Diagonalizer, k: int) -> float:
    """Enumeration against the closed-form C-ensemble moment."""
    exact: MomentOperator = enumerated_moment(dz, k)
    return max_norm(exact.matrix - c_moment(dz, k).matrix)


def enumerated_plateau(dz: Diagonalizer) -> PlateauOperator:
    """Average of C†^{⊗2}·S·C^{⊗2} over the d! orbit representatives.

    Diagonal phases cancel on the s-tensor, so the permutations suffice.
    """
    d = dz.dim
    s = s_tensor(d)
    total = np.zeros((d * d, d * d), dtype=np.complex128)
    count = 0
    for rep in enumerate_orbit(dz):
        c2 = kron(rep.C, rep.C)
        total += c2.conj().T @ s @ c2
        count += 1
    return PlateauOperator(total / count, d)


def _rotated_traces(
    c: npt.NDArray[np.complex128],
    w: npt.NDArray[np.complex128],
    v: npt.NDArray[np.complex128],
    energies: npt.NDArray[np.float64],
    times: npt.NDArray[np.float64],
) -> npt.NDArray[np.complex128]:
    """Tr(e^{iEt}·CWC†·e^{−iEt}·CVC†) for a stack of C, shape (n, times)."""
    c_dag = np.conj(np.swapaxes(c, 1, 2))
    w_c = c @ w @ c_dag
    v_c = c @ v @ c_dag
    weights = w_c * np.swapaxes(v_c, 1, 2)
    phases = np.exp(1j * times[:, None, None] * (energies[:, None] - energies[None, :]))
    return weights.reshape(c.shape[0], -1) @ phases.reshape(times.size, -1).T


def two_point_mc(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    times: npt.ArrayLike,
    n_samples: int = _MC.samples,
    seed: int = 0,
    *,
    chunk_size: int = _MC.chunk_size,
    threads: int | None = None,
) -> tuple[CorrelatorSeries, OracleReport]:
    """Sampled (1/d)Tr(e^{iEt}CWC†e^{−iEt}CVC†) over the C-ensemble against c_two_point."""
    grid = np.asarray(times, dtype=np.float64)
    dz = build_diagonalizer(es)
    d = es.dim

    def sampler(rng: np.random.Generator, n: int) -> npt.NDArray[np.float64]:
        traces = _rotated_traces(sample_batch(dz, n, rng), w.matrix, v.matrix, es.values, grid)
        return traces.real / d

    moments = run_chunked(sampler, n_samples, seed, chunk_size=chunk_size, threads=threads)
    reference = np.array([c_two_point(w, v, es, float(t)) for t in grid])
    series = CorrelatorSeries(
        grid,
        np.asarray(moments.mean),
        {"formula": "c_two_point_mc", "samples": moments.n, "seed": seed},
        stderr=np.asarray(moments.stderr),
    )
    return series, _report("two_point", moments, reference, seed, d=d)


def time_averaged_two_point_mc(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    t_max: float,
    n_steps: int,
    n_samples: int,
    seed: int,
    *,
    chunk_size: int = _MC.chunk_size,
    threads: int | None = None,
) -> float:
    """Trapezoidal time average over [0, t_max] of the sampled C-ensemble two-point function."""
    if t_max <= 0 or n_steps < 1:
        raise InvalidInputError("time average needs t_max > 0 and n_steps ≥ 1")
    times = np.linspace(0.0, t_max, n_steps + 1)
    series, _ = two_point_mc(
        w, v, es, times, n_samples, seed, chunk_size=chunk_size, threads=threads
    )
    return float(integrate.trapezoid(series.values.real, times) / t_max)


def _sector_sampler(problem: SubspaceProblem, times: npt.NDArray[np.float64]) -> Sampler:
    dz = build_diagonalizer(problem.eigensystem)

    def sample(rng: np.random.Generator, n: int) -> npt.NDArray[np.float64]:
        traces = _rotated_traces(
            sample_batch(dz, n, rng), problem.w_hat, problem.v_hat, problem.eigensystem.values, times
        )
        return traces.real

    return sample


def otoc_mc(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    times: npt.ArrayLike,
    n_samples: int = _MC.samples,
    seed: int = 0,
    *,
    chunk_size: int = _MC.chunk_size,
    threads: int | None = None,
) -> OracleReport:
    """Tr(W(t)VW(t)V) sampled as the sum of independent two-point averages on the two SWAP sectors."""
    grid = np.asarray(times, dtype=np.float64)
    sym, antisym = replica_subspaces(w, v, es)
    sample_sym = _sector_sampler(sym, grid)
    sample_antisym = _sector_sampler(antisym, grid)

    def sampler(rng: np.random.Generator, n: int) -> npt.NDArray[np.float64]:
        return sample_sym(rng, n) + sample_antisym(rng, n)

    moments = run_chunked(sampler, n_samples, seed, chunk_size=chunk_size, threads=threads)
    reference = np.array([otoc_closed_form(w, v, es, float(t)) for t in grid])
    return _report(
        "otoc",
        moments,
        reference,
        seed,
        d=es.dim,
        sym_dim=sym.dimension,
        antisym_dim=antisym.dimension,
    )


def _pair_overlaps(dz: Diagonalizer, k: int) -> Sampler:
    def sample(rng: np.random.Generator, n: int) -> npt.NDArray[np.float64]:
        u = sample_batch(dz, n, rng)
        other = sample_batch(dz, n, rng)
        return np.abs(np.einsum("nij,nij->n", np.conj(u), other)) ** (2 * k)

    return sample


def frame_potential_pairs(
    dz: Diagonalizer,
    k: int,
    n_pairs: int,
    seed: int,
    *,
    chunk_size: int = _MC.chunk_size,
    threads: int | None = None,
) -> EnsembleEstimate:
    """E|Tr U†V|^{2k} over independent pairs drawn from one C-ensemble."""
    _check_order(k)
    return estimate(_pair_overlaps(dz, k), n_pairs, seed, chunk_size=chunk_size, threads=threads)


def frame_potential_report(
    dz: Diagonalizer,
    n_pairs: int,
    seed: int,
    *,
    chunk_size: int = _MC.chunk_size,
    threads: int | None = None,
) -> OracleReport:
    """Pair-sampled F₂ against the enumeration value; the IPR̄ closed form rides along in ``meta``.

    The two references coincide only when IPR̄ = 1, i.e. for a diagonal H.
    """
    moments = run_chunked(_pair_overlaps(dz, 2), n_pairs, seed, chunk_size=chunk_size, threads=threads)
    return _report(
        "frame_potential",
        moments,
        [float(frame_potential_exact(dz.dim))],
        seed,
        d=dz.dim,
        ipr_bar=ipr_bar(dz),
        closed_form=frame_potential2(dz),
    )
