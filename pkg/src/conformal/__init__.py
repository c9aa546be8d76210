"""
Split conformal keypoint bounds
"""
from src.conformal.calibration import (
    CalibrationRecord,
    KeypointBound,
    Norm,
    bound_for_detection,
    calibrate,
    calibrate_all,
    conformal_rank,
    conformity_score,
    quantile_of_scores,
)

__all__ = [
    "CalibrationRecord",
    "KeypointBound",
    "Norm",
    "bound_for_detection",
    "calibrate",
    "calibrate_all",
    "conformal_rank",
    "conformity_score",
    "quantile_of_scores",
]
