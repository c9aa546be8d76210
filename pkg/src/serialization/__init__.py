"""
JSON and CSV surfaces for calibration records, observations, bounds and reports
"""
from src.serialization.io import (
    bounds_to_json,
    coverage_to_json,
    ellipsoid_from_result,
    load_bounds,
    load_calibration_records,
    load_observations,
    load_results,
    projection_to_json,
    result_to_json,
    toy2d_to_json,
    write_ellipse_slices_csv,
    write_json,
)
from src.serialization.schemas import (
    BoundsFile,
    CalibrationRecordModel,
    IntrinsicsModel,
    KeypointBoundModel,
    ObservationFrame,
    ObservationsFile,
    PoseModel,
    SlueResultModel,
)

__all__ = [
    "BoundsFile",
    "CalibrationRecordModel",
    "IntrinsicsModel",
    "KeypointBoundModel",
    "ObservationFrame",
    "ObservationsFile",
    "PoseModel",
    "SlueResultModel",
    "bounds_to_json",
    "coverage_to_json",
    "ellipsoid_from_result",
    "load_bounds",
    "load_calibration_records",
    "load_observations",
    "load_results",
    "projection_to_json",
    "result_to_json",
    "toy2d_to_json",
    "write_ellipse_slices_csv",
    "write_json",
]
