"""C-ensemble and Haar one- and two-point correlators in closed form.

All closed forms share the spectrally decoupled shape
g/d + (Tr WV − g)(K − Z(β))/(d(d−1)Z(β)), where g = Tr(G·W⊗V) is the
plateau contraction and K the (thermal) spectral form factor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt
import pandas as pd
import structlog
from scipy import integrate

from censemble.config import DEFAULT_SETTINGS
from censemble.ensembles.cens import plateau_exact
from censemble.ensembles.haar import haar_plateau
from censemble.ensembles.moments import PlateauOperator
from censemble.errors import InvalidInputError
from censemble.linalg.tensors import EigenSystem, HermitianOperator
from censemble.spectral import (
    FormFactor,
    FormFactorKind,
    decoupled_two_point,
    form_factor,
    form_factor_series,
    form_factor_time_average,
    spacing_ratios,
    thermal_kernel,
)

log = structlog.get_logger()

__all__ = [
    "CorrelatorSeries",
    "FormFactor",
    "FormFactorKind",
    "c_two_point",
    "c_two_point_finite",
    "c_two_point_regulated",
    "c_two_point_series",
    "diagonal_ensemble",
    "direct_two_point",
    "eth_f2",
    "form_factor",
    "form_factor_series",
    "form_factor_time_average",
    "out_eq_expectation",
    "out_eq_time_average",
    "spacing_ratios",
    "time_averaged_two_point",
]

_TIME_CHUNK = 4096


@dataclass
class CorrelatorSeries:
    """A correlator sampled on an increasing time grid."""

    times: npt.NDArray[np.float64]
    values: npt.NDArray[np.complex128]
    meta: dict[str, Any] = field(default_factory=dict)
    stderr: npt.NDArray[np.float64] | None = None

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise InvalidInputError("times and values must be one-dimensional and equally long")
        if self.stderr is not None:
            self.stderr = np.asarray(self.stderr, dtype=np.float64)
            if self.stderr.shape != self.times.shape:
                raise InvalidInputError("stderr must match the time grid")
        if np.any(np.diff(self.times) <= 0):
            raise InvalidInputError("times must be strictly increasing")

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.values.imag) <= 1e-12 * (1 + np.abs(self.values.real))))

    def to_frame(self) -> pd.DataFrame:
        """Columns ``time,value[,value_imag][,stderr]``."""
        frame = pd.DataFrame({"time": self.times, "value": self.values.real})
        if not self.is_real:
            frame["value_imag"] = self.values.imag
        if self.stderr is not None:
            frame["stderr"] = self.stderr
        return frame


def _check_pair(w: HermitianOperator, v: HermitianOperator, es: EigenSystem) -> int:
    if w.dim != v.dim or w.dim != es.dim:
        raise InvalidInputError(
            f"dimension mismatch: W is {w.dim}, V is {v.dim}, spectrum has {es.dim} levels"
        )
    if es.dim < 2:
        raise InvalidInputError("two-point closed forms need d ≥ 2")
    return es.dim


def _plateau_terms(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    plateau: PlateauOperator | None,
) -> tuple[complex, complex]:
    g = plateau_exact(es) if plateau is None else plateau
    return g.contract(w.matrix, v.matrix), complex(np.trace(w.matrix @ v.matrix))


def c_two_point_finite(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    beta: float,
    t: float,
    *,
    regulated: bool = True,
    plateau: PlateauOperator | None = None,
) -> complex:
    """Thermal two-point function averaged over the C-ensemble.

    ``regulated`` selects (1/Z(β))Tr(e^{−βH/2}W(t)e^{−βH/2}V); otherwise the
    plain ordering (1/Z(β))Tr(e^{−βH}W(t)V), which is complex in general.
    Passing ``plateau`` replaces the exact plateau operator, e.g. by the Haar one.
    """
    d = _check_pair(w, v, es)
    g, tr_wv = _plateau_terms(w, v, es, plateau)
    kernel, z_beta = thermal_kernel(es, beta, t, regulated=regulated)
    return decoupled_two_point(g, tr_wv, kernel, z_beta, d)


def c_two_point(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    t: float,
    *,
    plateau: PlateauOperator | None = None,
) -> float:
    """(1/d)⟨Tr W(t)V⟩ over the C-ensemble at infinite temperature."""
    return c_two_point_finite(w, v, es, 0.0, t, plateau=plateau).real


def c_two_point_regulated(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    beta: float,
    t: float,
) -> float:
    if beta < 0:
        raise InvalidInputError(f"β must be non-negative, got {beta}")
    return c_two_point_finite(w, v, es, beta, t, regulated=True).real


def c_two_point_series(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    times: npt.ArrayLike,
    *,
    beta: float = 0.0,
    regulated: bool = True,
    ensemble: str = "c",
) -> CorrelatorSeries:
    """Closed-form two-point function on a time grid for the C or Haar ensemble."""
    d = _check_pair(w, v, es)
    if ensemble == "c":
        plateau = plateau_exact(es)
    elif ensemble == "haar":
        plateau = haar_plateau(d)
    else:
        raise InvalidInputError(f"ensemble must be 'c' or 'haar', got {ensemble!r}")
    grid = np.asarray(times, dtype=np.float64)
    g, tr_wv = _plateau_terms(w, v, es, plateau)
    values = []
    for t in grid:
        kernel, z_beta = thermal_kernel(es, beta, float(t), regulated=regulated)
        values.append(decoupled_two_point(g, tr_wv, kernel, z_beta, d))
    meta = {
        "formula": f"{ensemble}_two_point",
        "beta": beta,
        "regulated": regulated,
        "plateau_contraction": g.real,
    }
    log.debug("correlators.series", ensemble=ensemble, points=grid.size, beta=beta)
    return CorrelatorSeries(grid, np.asarray(values), meta)


def _check_state(rho: HermitianOperator, tol: float) -> None:
    trace = np.trace(rho.matrix).real
    if abs(trace - 1) > tol:
        raise InvalidInputError(f"state must have unit trace, got Tr ρ = {trace:.12g}")
    lowest = float(np.linalg.eigvalsh(rho.matrix)[0])
    if lowest < -tol:
        raise InvalidInputError(f"state must be positive semidefinite, min eigenvalue {lowest:.3e}")


def out_eq_expectation(
    a: HermitianOperator,
    rho: HermitianOperator,
    es: EigenSystem,
    t: float,
    *,
    large_d: bool = False,
    tol: float = DEFAULT_SETTINGS.tolerances.state_trace,
) -> float:
    """Ensemble-averaged Tr(A(t)ρ) for an initial state ρ."""
    d = _check_pair(a, rho, es)
    _check_state(rho, tol)
    g = plateau_exact(es).contract(a.matrix, rho.matrix).real
    initial = float(np.trace(a.matrix @ rho.matrix).real)
    sff = form_factor(es, FormFactor.INFINITE_T, t)
    if large_d:
        weight = sff / d**2
        return weight * initial + (1 - weight) * g
    return d / (d - 1) * (g - initial / d) + sff / (d * (d - 1)) * (initial - g)


def out_eq_time_average(
    a: HermitianOperator,
    rho: HermitianOperator,
    es: EigenSystem,
    *,
    tol: float = DEFAULT_SETTINGS.tolerances.state_trace,
) -> float:
    """Long-time limit Tr(G·A⊗ρ) = Σ_l ⟨E_l|A|E_l⟩⟨E_l|ρ|E_l⟩."""
    _check_pair(a, rho, es)
    _check_state(rho, tol)
    return plateau_exact(es).contract(a.matrix, rho.matrix).real


def _eigenbasis(op: HermitianOperator, es: EigenSystem) -> npt.NDArray[np.complex128]:
    return es.vectors.conj().T @ op.matrix @ es.vectors


def diagonal_ensemble(a: HermitianOperator, es: EigenSystem) -> float:
    """(1/d)Σ_l ⟨E_l|A|E_l⟩²."""
    if a.dim != es.dim:
        raise InvalidInputError(f"operator dimension {a.dim} does not match spectrum {es.dim}")
    diagonal = np.diag(_eigenbasis(a, es)).real
    return float(np.sum(diagonal**2) / es.dim)


def eth_f2(a: HermitianOperator, es: EigenSystem) -> float:
    """⟨A²⟩ minus the diagonal ensemble: the off-diagonal weight (1/d)Σ_{l≠m}|A_lm|²."""
    second_moment = float(np.trace(a.matrix @ a.matrix).real / a.dim)
    return max(0.0, second_moment - diagonal_ensemble(a, es))


def _frequencies_and_weights(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.complex128]]:
    w_e, v_e = _eigenbasis(w, es), _eigenbasis(v, es)
    omega = es.values[:, None] - es.values[None, :]
    return omega.ravel(), (w_e * v_e.T).ravel()


def direct_two_point(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    t: float | npt.ArrayLike,
) -> complex | npt.NDArray[np.complex128]:
    """(1/d)Tr(W(t)V) for the fixed Hamiltonian, with W(t) = e^{iHt}We^{−iHt}."""
    _check_pair(w, v, es)
    omega, weights = _frequencies_and_weights(w, v, es)
    times = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.empty(times.shape, dtype=np.complex128)
    for start in range(0, times.size, _TIME_CHUNK):
        block = times[start : start + _TIME_CHUNK]
        out[start : start + _TIME_CHUNK] = np.exp(1j * np.outer(block, omega)) @ weights / es.dim
    return complex(out[0]) if np.ndim(t) == 0 else out


def time_averaged_two_point(
    w: HermitianOperator,
    v: HermitianOperator,
    es: EigenSystem,
    t_max: float,
    n_steps: int,
    *,
    t_min: float = 0.0,
) -> float:
    """Trapezoidal time average of the direct two-point function over [t_min, t_max]."""
    if not t_max > t_min or n_steps < 1:
        raise InvalidInputError("time average needs t_max > t_min and n_steps ≥ 1")
    times = np.linspace(t_min, t_max, n_steps + 1)
    values = np.asarray(direct_two_point(w, v, es, times)).real
    return float(integrate.trapezoid(values, times) / (t_max - t_min))
