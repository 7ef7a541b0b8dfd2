from .oracles import (
    OracleReport,
    c_moment_mc,
    enumerated_plateau,
    frame_potential_pairs,
    frame_potential_report,
    haar_moment_mc,
    moment_residual,
    one_design_residual,
    otoc_mc,
    time_averaged_two_point_mc,
    two_point_mc,
    z_scores,
)

__all__ = [
    "OracleReport",
    "c_moment_mc",
    "enumerated_plateau",
    "frame_potential_pairs",
    "frame_potential_report",
    "haar_moment_mc",
    "moment_residual",
    "one_design_residual",
    "otoc_mc",
    "time_averaged_two_point_mc",
    "two_point_mc",
    "z_scores",
]
