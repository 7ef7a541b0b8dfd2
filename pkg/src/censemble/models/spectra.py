"""Unit-mean level-spacing samplers and synthetic spectra built from them."""
from __future__ import annotations

from enum import Enum

import numpy as np
import numpy.typing as npt
from scipy import special

from censemble.errors import InvalidInputError
from censemble.linalg.tensors import HermitianOperator

WIGNER_DYSON_VARIANCE = 3 * np.pi / 8 - 1


class SpacingDistribution(str, Enum):
    POISSON = "poisson"
    WIGNER_DYSON = "wigner_dyson"
    CUSTOM = "custom"


def spacing_variance(distribution: SpacingDistribution | str, sigma2: float | None = None) -> float:
    distribution = SpacingDistribution(distribution)
    if distribution is SpacingDistribution.POISSON:
        return 1.0
    if distribution is SpacingDistribution.WIGNER_DYSON:
        return float(WIGNER_DYSON_VARIANCE)
    if sigma2 is None or sigma2 <= 0:
        raise InvalidInputError("a custom spacing law needs a positive variance σ²")
    return float(sigma2)


def sample_spacings(
    distribution: SpacingDistribution | str,
    size: int | tuple[int, ...],
    rng: np.random.Generator,
    *,
    sigma2: float | None = None,
) -> npt.NDArray[np.float64]:
    """Draw unit-mean spacings.

    Wigner-Dyson spacings follow the surmise (32/π²)s²e^{−4s²/π}, drawn by
    inverting its CDF: u = 4s²/π is Gamma(3/2) distributed. Custom spacings
    are Gamma(1/σ², scale σ²).
    """
    distribution = SpacingDistribution(distribution)
    if distribution is SpacingDistribution.POISSON:
        return rng.exponential(1.0, size)
    if distribution is SpacingDistribution.WIGNER_DYSON:
        u = special.gammaincinv(1.5, rng.random(size))
        return np.sqrt(np.pi * u / 4)
    variance = spacing_variance(distribution, sigma2)
    return rng.gamma(1 / variance, variance, size)


def synthetic_spectrum(
    distribution: SpacingDistribution | str,
    d: int,
    seed: int,
    *,
    sigma2: float | None = None,
) -> HermitianOperator:
    """Diagonal Hamiltonian whose levels are cumulative sums of sampled spacings."""
    if d < 2:
        raise InvalidInputError(f"a synthetic spectrum needs d ≥ 2, got {d}")
    rng = np.random.default_rng(seed)
    spacings = sample_spacings(distribution, d - 1, rng, sigma2=sigma2)
    levels = np.concatenate([[0.0], np.cumsum(spacings)])
    return HermitianOperator(np.diag(levels))
