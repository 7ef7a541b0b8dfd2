"""Plot-ready tables for the form-factor, frame-potential and entropy figures."""
from __future__ import annotations

from typing import Sequence

import numpy as np
import pandas as pd
import structlog

from censemble.config import DEFAULT_SETTINGS, BallConvention
from censemble.ensembles.cens import build_diagonalizer, frame_potential2, ipr_bar
from censemble.errors import InvalidInputError
from censemble.linalg.tensors import EigenSystem, eigh
from censemble.models.builders import diagonal_plus_perturbation
from censemble.models.spectra import WIGNER_DYSON_VARIANCE
from censemble.spectral import FormFactor, FormFactorKind, form_factor_series, gue_form_factor_box
from censemble.volume import entropy_estimate, haar_cardinality

log = structlog.get_logger()

ENTROPY_VARIANCES = {
    "equally_spaced": 0.0,
    "wigner_dyson": float(WIGNER_DYSON_VARIANCE),
    "poisson": 1.0,
}


def formfactor_table(
    es: EigenSystem,
    t_max: float,
    steps: int,
    *,
    betas: Sequence[float] = (0.0,),
    gue_box: bool = False,
) -> pd.DataFrame:
    """Columns ``time,value,series``: |Z(β/2 − it)|² per β, optionally the GUE box curve."""
    if t_max <= 0 or steps < 1:
        raise InvalidInputError("form factor table needs t_max > 0 and steps ≥ 1")
    times = np.linspace(0.0, t_max, steps + 1)
    frames = []
    for beta in betas:
        kind = FormFactorKind(FormFactor.FINITE_T if beta > 0 else FormFactor.INFINITE_T, beta)
        values = form_factor_series(es, kind, times)
        frames.append(pd.DataFrame({"time": times, "value": values, "series": f"beta={beta:g}"}))
    if gue_box:
        values = np.array([gue_form_factor_box(t, es.dim) for t in times])
        frames.append(pd.DataFrame({"time": times, "value": values, "series": "gue_box"}))
    return pd.concat(frames, ignore_index=True)


def framepotential_table(
    d: int,
    *,
    strengths: Sequence[float] = (0.0, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0),
    curve_points: int = 101,
    seed: int = 0,
) -> pd.DataFrame:
    """Columns ``ipr_bar,excess,series``: F₂ − 2 along the closed-form curve and for perturbed spectra.

    The curve touches zero at IPR̄ = 2/(d+1); the ``perturbed`` rows place
    diag(0..d−1) + λ·GUE at their own IPR̄.
    """
    if d < 2:
        raise InvalidInputError(f"frame potential table needs d ≥ 2, got {d}")
    critical = 2 / (d + 1)
    grid = np.union1d(np.linspace(1 / d, 1.0, curve_points), [critical])
    curve = pd.DataFrame(
        {
            "ipr_bar": grid,
            "excess": ((d + 1) / (d - 1) * (grid - critical)) ** 2,
            "series": "closed_form",
        }
    )
    rows = []
    energies = np.arange(d, dtype=np.float64)
    for strength in strengths:
        es = eigh(diagonal_plus_perturbation(energies, strength, seed))
        dz = build_diagonalizer(es)
        rows.append(
            {"ipr_bar": ipr_bar(dz), "excess": frame_potential2(dz) - 2, "series": "perturbed", "strength": strength}
        )
    log.debug("figures.framepotential", d=d, points=len(rows))
    return pd.concat([curve, pd.DataFrame(rows)], ignore_index=True)


def entropy_table(
    dims: Sequence[int] = (8, 16, 32, 64),
    *,
    variances: dict[str, float] | None = None,
    epsilon: float = DEFAULT_SETTINGS.volume.epsilon,
    ball: BallConvention | str = DEFAULT_SETTINGS.volume.ball,
) -> pd.DataFrame:
    """Columns ``d,sigma2,series,entropy,haar,ratio`` with ratio = log|E_C|/log|U(d)|."""
    rows = []
    for series, sigma2 in (variances or ENTROPY_VARIANCES).items():
        for d in dims:
            entropy = entropy_estimate(d, sigma2, epsilon=epsilon, ball=ball)
            haar = haar_cardinality(d, epsilon, ball=ball).log_magnitude
            rows.append(
                {
                    "d": d,
                    "sigma2": sigma2,
                    "series": series,
                    "entropy": entropy,
                    "haar": haar,
                    "ratio": entropy / haar,
                }
            )
    return pd.DataFrame(rows)
