"""Partition functions, spectral form factors and level-spacing statistics."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt
from scipy import integrate, special

from censemble.errors import InvalidInputError
from censemble.linalg.tensors import EigenSystem

# Large-d mean of min(δ_l, δ_{l+1})/max(δ_l, δ_{l+1})
REFERENCE_MEAN_RATIO = {
    "poisson": 2 * np.log(2) - 1,
    "goe": 0.5307,
    "gue": 0.5996,
}


class FormFactor(str, Enum):
    INFINITE_T = "infiniteT"
    FINITE_T = "finiteT"
    TWOFOLD_SYM = "twofoldSym"
    TWOFOLD_ANTISYM = "twofoldAntisym"


@dataclass(frozen=True)
class FormFactorKind:
    kind: FormFactor = FormFactor.INFINITE_T
    beta: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", FormFactor(self.kind))
        if self.beta < 0:
            raise InvalidInputError(f"β must be non-negative, got {self.beta}")


def partition_function(values: npt.ArrayLike, s: complex) -> complex:
    """Z(s) = Σ_l e^{−s·E_l}; Z(it) in the infinite-temperature form factor uses s = −it."""
    energies = np.asarray(values, dtype=np.float64)
    return complex(np.sum(np.exp(-s * energies)))


def _z(es: EigenSystem, t: float) -> complex:
    """Σ_l e^{itE_l}."""
    return partition_function(es.values, -1j * t)


def twofold_form_factors(es: EigenSystem, t: float) -> tuple[float, float]:
    """(|Z₊(it)|², |Z₋(it)|²) with Z± = (Z(it)² ± Z(2it))/2."""
    z1 = _z(es, t)
    z2 = _z(es, 2 * t)
    return abs(z1**2 + z2) ** 2 / 4, abs(z1**2 - z2) ** 2 / 4


def form_factor(es: EigenSystem, kind: FormFactorKind | FormFactor | str, t: float) -> float:
    if not isinstance(kind, FormFactorKind):
        kind = FormFactorKind(FormFactor(kind))
    if kind.kind is FormFactor.INFINITE_T:
        return abs(_z(es, t)) ** 2
    if kind.kind is FormFactor.FINITE_T:
        return abs(partition_function(es.values, kind.beta / 2 - 1j * t)) ** 2
    plus, minus = twofold_form_factors(es, t)
    return plus if kind.kind is FormFactor.TWOFOLD_SYM else minus


def form_factor_series(
    es: EigenSystem,
    kind: FormFactorKind | FormFactor | str,
    times: npt.ArrayLike,
) -> npt.NDArray[np.float64]:
    return np.array([form_factor(es, kind, float(t)) for t in np.asarray(times)])


def form_factor_time_average(
    es: EigenSystem,
    kind: FormFactorKind | FormFactor | str,
    t_max: float,
    n_steps: int,
    *,
    t_min: float = 0.0,
) -> float:
    """Trapezoidal time average over [t_min, t_max]."""
    if not t_max > t_min or n_steps < 1:
        raise InvalidInputError("time average needs t_max > t_min and n_steps ≥ 1")
    times = np.linspace(t_min, t_max, n_steps + 1)
    if not isinstance(kind, FormFactorKind):
        kind = FormFactorKind(FormFactor(kind))
    if kind.kind is FormFactor.INFINITE_T:
        phases = np.exp(1j * np.outer(times, es.values))
        values = np.abs(phases.sum(axis=1)) ** 2
    else:
        values = form_factor_series(es, kind, times)
    return float(integrate.trapezoid(values, times) / (t_max - t_min))


def spacing_ratios(es: EigenSystem) -> tuple[npt.NDArray[np.float64], float]:
    """r̃_l = min(δ_l, δ_{l+1}) / max(δ_l, δ_{l+1}) and their mean."""
    if es.dim < 3:
        raise InvalidInputError(f"spacing ratios need d ≥ 3, got {es.dim}")
    es.require_nondegenerate("spacing_ratios")
    gaps = np.diff(es.values)
    ratios = np.minimum(gaps[:-1], gaps[1:]) / np.maximum(gaps[:-1], gaps[1:])
    return ratios, float(ratios.mean())


def semicircle_density(x: npt.ArrayLike, d: int) -> npt.NDArray[np.float64]:
    """GUE level density (d/2π)√(4 − x²) on [−2, 2]."""
    x = np.asarray(x, dtype=np.float64)
    return d / (2 * np.pi) * np.sqrt(np.clip(4 - x**2, 0.0, None))


def gue_form_factor_box(t: float, d: int) -> float:
    """Box-approximation GUE form factor d²(J₁(2t)/t)² + ∫min(t/2π, ρ(E))dE."""
    t = abs(float(t))
    disconnected = float(d**2) if t == 0 else d**2 * (special.j1(2 * t) / t) ** 2
    if t >= 2 * d:
        return disconnected + d
    # ρ(E) exceeds t/2π on |E| < E0
    e0 = np.sqrt(max(4 - (t / d) ** 2, 0.0))
    inside = t / (2 * np.pi) * 2 * e0
    outside = 2 * d / (2 * np.pi) * (np.pi - (e0 * (t / d) / 2 + 2 * np.arcsin(e0 / 2)))
    return disconnected + inside + outside


def thermal_kernel(
    es: EigenSystem,
    beta: float,
    t: float,
    *,
    regulated: bool = True,
) -> tuple[complex, float]:
    """(K, Z(β)) weighting the time-dependent part of a two-point function.

    Regulated ordering (1/Z(β))Tr(e^{−βH/2}W(t)e^{−βH/2}V) has K = |Z(β/2 − it)|²;
    the plain ordering (1/Z(β))Tr(e^{−βH}W(t)V) has K = Z(β − it)·Z(it).
    At β = 0 both reduce to |Z(it)|² and Z(0) = d.
    """
    if beta < 0:
        raise InvalidInputError(f"β must be non-negative, got {beta}")
    shifted = es.values - es.values[0] if beta > 0 else es.values
    z_beta = partition_function(shifted, beta).real
    if regulated:
        kernel = complex(abs(partition_function(shifted, beta / 2 - 1j * t)) ** 2)
    else:
        kernel = partition_function(shifted, beta - 1j * t) * partition_function(shifted, 1j * t)
    return kernel, z_beta


def decoupled_two_point(
    g: complex,
    tr_wv: complex,
    kernel: complex,
    z_beta: float,
    d: int,
) -> complex:
    """Spectrally decoupled two-point function g/d + (Tr WV − g)(K − Z(β))/(d(d−1)Z(β)).

    ``g`` is the plateau contraction Tr(G·W⊗V) of the eigenvector ensemble.
    """
    return g / d + (tr_wv - g) * (kernel - z_beta) / (d * (d - 1) * z_beta)
