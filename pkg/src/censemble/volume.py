"""C-ensemble volumes, cardinalities, entropy estimates and complexity lower bounds.

Everything is evaluated in the log domain: Vol(H) carries Π l! and
Vandermonde factors that overflow doubles long before d = 512.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import structlog
from pydantic import BaseModel, Field, model_validator
from scipy import special

from censemble.config import DEFAULT_SETTINGS, BallConvention
from censemble.errors import InvalidInputError
from censemble.estimates import EnsembleEstimate, estimate
from censemble.linalg.tensors import EigenSystem
from censemble.models.spectra import SpacingDistribution, sample_spacings, spacing_variance

log = structlog.get_logger()

LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2 * math.pi)


@dataclass(frozen=True)
class LogValue:
    """sign·exp(log_magnitude); log_magnitude is meaningless when sign is 0."""

    log_magnitude: float
    sign: int = 1

    def __post_init__(self) -> None:
        if self.sign not in (-1, 0, 1):
            raise InvalidInputError(f"sign must be -1, 0 or 1, got {self.sign}")

    @classmethod
    def of(cls, value: float) -> LogValue:
        if value == 0:
            return cls(-math.inf, 0)
        return cls(math.log(abs(value)), 1 if value > 0 else -1)

    def exp(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)


class GateSetSpec(BaseModel):
    """A universal gate set of |G| q-local gates acting on N qubits."""

    cardinality: int = Field(ge=1, description="Number of distinct gates |G|.")
    locality: int = Field(ge=1, description="Qubits each gate acts on (q).")
    qubits: int = Field(ge=1, description="Total qubit count N.")

    @model_validator(mode="after")
    def _check_locality(self) -> GateSetSpec:
        if self.locality > self.qubits:
            raise ValueError(f"locality q={self.locality} exceeds qubit count N={self.qubits}")
        return self

    @property
    def log_choices(self) -> float:
        """log(|G|·C(N, q)): the branching factor of one circuit layer."""
        return math.log(self.cardinality) + math.log(math.comb(self.qubits, self.locality))


def _pairs(d: int) -> int:
    return d * (d - 1) // 2


def _log_superfactorial(n: int) -> float:
    """Σ_{l=1}^{n} log l!"""
    return float(np.sum(special.gammaln(np.arange(2, n + 2))))


def log_vandermonde(values: npt.ArrayLike, scale: float = 1.0) -> float:
    """log Δ² = Σ_{l<m} log((E_m − E_l)/scale)²."""
    energies = np.sort(np.asarray(values, dtype=np.float64)) / scale
    diffs = energies[None, :] - energies[:, None]
    upper = diffs[np.triu_indices(energies.size, k=1)]
    if np.any(upper <= 0):
        raise InvalidInputError("the Vandermonde determinant vanishes for colliding eigenvalues")
    return float(2 * np.sum(np.log(upper)))


def log_vandermonde_from_spacings(spacings: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """log Δ² of spectra given row-wise as consecutive spacings, shape (n, d−1) → (n,)."""
    s = np.atleast_2d(np.asarray(spacings, dtype=np.float64))
    levels = np.concatenate([np.zeros((s.shape[0], 1)), np.cumsum(s, axis=1)], axis=1)
    rows, cols = np.triu_indices(levels.shape[1], k=1)
    return 2 * np.sum(np.log(levels[:, cols] - levels[:, rows]), axis=1)


def log_unitary_volume(d: int) -> float:
    """log Vol(U(d)) = (d + C(d,2))·log 2π − Σ_{l=1}^{d−1} log l!."""
    if d < 1:
        raise InvalidInputError(f"dimension must be positive, got {d}")
    return (d + _pairs(d)) * LOG_2PI - _log_superfactorial(d - 1)


def log_ball_volume(
    d: int,
    epsilon: float = DEFAULT_SETTINGS.volume.epsilon,
    ball: BallConvention | str = DEFAULT_SETTINGS.volume.ball,
) -> float:
    """log Vol(B_ε) of real dimension 2n: n·log π + 2n·log ε − log n!.

    ``real`` uses 2n = d², ``gl`` uses 2n = 2d².
    """
    if epsilon <= 0:
        raise InvalidInputError(f"ε must be positive, got {epsilon}")
    n = d * d / 2 if BallConvention(ball) is BallConvention.REAL else float(d * d)
    return n * LOG_PI + 2 * n * math.log(epsilon) - float(special.gammaln(n + 1))


def log_volume(es: EigenSystem, normalized: bool = False) -> LogValue:
    """log of the C-ensemble partition function Vol(H).

    Dimensionful: Π_{l=1}^d l! / π^{C(d,2)} · Δ(H)^{−2}. Normalized:
    2^{C(d,2)}·Vol(U(1)^d×S_d)/Vol(U(d)) · Π(ΔĒ/(E_m − E_l))² with ΔĒ the
    mean spacing (E_max − E_min)/(d − 1).
    """
    es.require_nondegenerate("log_volume")
    d = es.dim
    if d < 2:
        raise InvalidInputError("the volume needs d ≥ 2")
    if not normalized:
        value = _log_superfactorial(d) - _pairs(d) * LOG_PI - log_vandermonde(es.values)
        return LogValue(value)
    orbit = d * LOG_2PI + float(special.gammaln(d + 1))
    value = (
        _pairs(d) * math.log(2)
        + orbit
        - log_unitary_volume(d)
        - log_vandermonde(es.values, es.mean_spacing)
    )
    return LogValue(value)


def duality_check(es: EigenSystem) -> float:
    """|log Vol(H) − (log Vol(H⁻¹) − 2(d−1)·log det H)| for a positive spectrum."""
    if np.any(es.values <= 0):
        raise InvalidInputError("duality needs a positive-definite spectrum")
    inverse = EigenSystem.from_values(np.sort(1 / es.values), degeneracy_tol=es.degeneracy_tol)
    lhs = log_volume(es).log_magnitude
    log_det = float(np.sum(np.log(es.values)))
    rhs = log_volume(inverse).log_magnitude - 2 * (es.dim - 1) * log_det
    return abs(lhs - rhs)


def cardinality(
    es: EigenSystem,
    epsilon: float = DEFAULT_SETTINGS.volume.epsilon,
    *,
    ball: BallConvention | str = DEFAULT_SETTINGS.volume.ball,
) -> LogValue:
    """log|E_C|_ε = log Vol(U(d)) + log Vol(H) − log Vol(B_ε), with the normalized volume."""
    d = es.dim
    value = log_unitary_volume(d) + log_volume(es, normalized=True).log_magnitude
    value -= log_ball_volume(d, epsilon, ball)
    log.debug("volume.cardinality", d=d, epsilon=epsilon, ball=BallConvention(ball).value, log_card=value)
    return LogValue(value)


def haar_cardinality(
    d: int,
    epsilon: float = DEFAULT_SETTINGS.volume.epsilon,
    *,
    ball: BallConvention | str = DEFAULT_SETTINGS.volume.ball,
) -> LogValue:
    """log|U(d)|_ε = log Vol(U(d)) − log Vol(B_ε)."""
    return LogValue(log_unitary_volume(d) - log_ball_volume(d, epsilon, ball))


def complexity_bound(card_log: LogValue, gates: GateSetSpec) -> float:
    """Counting bound C ≥ log|E| / log(|G|·C(N, q))."""
    if card_log.sign != 1:
        raise InvalidInputError("the counting bound needs a positive cardinality")
    choices = gates.log_choices
    if choices <= 0:
        raise InvalidInputError("a gate set with a single choice per layer yields no bound")
    return card_log.log_magnitude / choices


def complexity_bound_orbit(d: int, gates: GateSetSpec) -> float:
    """Bound from the permutation orbit alone, using Stirling: (d log d − d)/log(|G|·C(N, q))."""
    return complexity_bound(LogValue(d * math.log(d) - d), gates)


def complexity_bound_frame(f2: float, d: int, gates: GateSetSpec) -> float:
    """Frame-potential bound (4 log d − log F₂)/log(|G|·C(N, q))."""
    if f2 <= 0:
        raise InvalidInputError(f"frame potential must be positive, got {f2}")
    return complexity_bound(LogValue(4 * math.log(d) - math.log(f2)), gates)


def _harmonic(n: int) -> float:
    return float(np.sum(1 / np.arange(1, n + 1))) if n > 0 else 0.0


def entropy_estimate(
    d: int,
    sigma2: float,
    *,
    epsilon: float = DEFAULT_SETTINGS.volume.epsilon,
    ball: BallConvention | str = DEFAULT_SETTINGS.volume.ball,
    with_tail: bool = False,
) -> float:
    """Central-limit estimate of log|E_C|_ε for a spectrum with spacing variance σ².

    C(d,2)·log 2 + log|E_{U(1)^d×S_d}|_ε − 2·log Π_{l=1}^{d−1} l^{d−l}
    + σ²(d(H_{d−1} − 1) + 1). ``with_tail`` adds Σ_q (d − q)σ⁴/(6q²), the
    next term of the expansion of E log(Σ s)² for gamma-distributed spacings.
    """
    if d < 2 or sigma2 < 0:
        raise InvalidInputError(f"entropy estimate needs d ≥ 2 and σ² ≥ 0, got d={d}, σ²={sigma2}")
    orbit = d * LOG_2PI + float(special.gammaln(d + 1)) - log_ball_volume(d, epsilon, ball)
    # Σ_q (d − q)·log q² = 2·Σ_{l=1}^{d−1} log l!
    vandermonde = 2 * _log_superfactorial(d - 1)
    value = _pairs(d) * math.log(2) + orbit - vandermonde
    value += sigma2 * (d * (_harmonic(d - 1) - 1) + 1)
    if with_tail:
        q = np.arange(1, d)
        value += float(np.sum((d - q) * sigma2**2 / (6 * q**2)))
    return value


def expected_log_vandermonde(
    d: int,
    distribution: SpacingDistribution | str,
    *,
    sigma2: float | None = None,
) -> float:
    """Exact E log Δ² for gamma-law spacings: Σ_q (d − q)·2(ψ(q/σ²) + log σ²).

    A sum of q unit-mean Gamma(1/σ², σ²) spacings is Gamma(q/σ², σ²); the
    Wigner-Dyson surmise is not closed under convolution and is refused.
    """
    distribution = SpacingDistribution(distribution)
    if distribution is SpacingDistribution.WIGNER_DYSON:
        raise InvalidInputError("no closed-form Vandermonde mean for Wigner-Dyson spacings")
    variance = spacing_variance(distribution, sigma2)
    q = np.arange(1, d)
    return float(np.sum((d - q) * 2 * (special.digamma(q / variance) + math.log(variance))))


def clt_log_vandermonde(
    spacing_dist: SpacingDistribution | str,
    d: int,
    n_trials: int,
    seed: int,
    *,
    sigma2: float | None = None,
    chunk_size: int = DEFAULT_SETTINGS.monte_carlo.chunk_size,
    threads: int | None = None,
) -> EnsembleEstimate:
    """Monte-Carlo mean and standard error of log Δ² over sampled spacing sequences."""
    if d < 2 or n_trials < 2:
        raise InvalidInputError(f"need d ≥ 2 and at least two trials, got d={d}, trials={n_trials}")
    distribution = SpacingDistribution(spacing_dist)
    spacing_variance(distribution, sigma2)

    def sampler(rng: np.random.Generator, n: int) -> npt.NDArray[np.float64]:
        spacings = sample_spacings(distribution, (n, d - 1), rng, sigma2=sigma2)
        return log_vandermonde_from_spacings(spacings)

    result = estimate(sampler, n_trials, seed, chunk_size=chunk_size, threads=threads)
    log.info(
        "volume.clt_sampled",
        distribution=distribution.value,
        d=d,
        trials=n_trials,
        mean=result.mean,
        stderr=result.stderr,
    )
    return result
