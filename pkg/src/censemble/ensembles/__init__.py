from .cens import (
    CEnsembleSample,
    Diagonalizer,
    OrbitRepresentative,
    build_diagonalizer,
    c_moment,
    enumerate_orbit,
    enumerated_moment,
    frame_potential2,
    frame_potential_exact,
    ipr_bar,
    orbit_residual,
    plateau_exact,
    plateau_split,
    sample_batch,
    sample_C,
    u1sd_moment,
)
from .haar import (
    haar_batch,
    haar_long_time_two_point,
    haar_moment,
    haar_plateau,
    haar_sample,
    haar_twofold_channel,
    haar_two_point,
)
from .moments import MomentOperator, PlateauOperator, phase_balanced_mask
from .weingarten import CycleType, weingarten

__all__ = [
    "CEnsembleSample",
    "CycleType",
    "Diagonalizer",
    "MomentOperator",
    "OrbitRepresentative",
    "PlateauOperator",
    "build_diagonalizer",
    "c_moment",
    "enumerate_orbit",
    "enumerated_moment",
    "frame_potential2",
    "frame_potential_exact",
    "haar_batch",
    "haar_long_time_two_point",
    "haar_moment",
    "haar_plateau",
    "haar_sample",
    "haar_twofold_channel",
    "haar_two_point",
    "ipr_bar",
    "orbit_residual",
    "phase_balanced_mask",
    "plateau_exact",
    "plateau_split",
    "sample_C",
    "sample_batch",
    "u1sd_moment",
    "weingarten",
]
