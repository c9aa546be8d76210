"""
File helpers for every JSON/CSV surface of the command line
"""
import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.conformal import CalibrationRecord, KeypointBound, Norm
from src.constraints import Form
from src.geometry import Pose
from src.harness import CoverageReport, Toy2dReport
from src.projection import AngularBound, ProjectionReport, TranslationBound, angular_axes_deg, ellipse_slices
from src.serialization.schemas import (
    BoundsFile,
    CalibrationRecordModel,
    KeypointBoundModel,
    ObservationFrame,
    ObservationsFile,
    PoseModel,
    SlueResultModel,
)
from src.slue import SlueResult
from src.sos import EllipsoidBound
from src.utils.errors import InputError
from src.utils.logger import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]


def _validation_message(error: ValidationError) -> str:
    first = error.errors()[0]
    where = ".".join(str(p) for p in first.get("loc", ())) or "<root>"
    return f"invalid field '{where}': {first.get('msg')}"


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def _read_json(path: PathLike) -> Any:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: not valid JSON ({e})")


def load_calibration_records(path: PathLike) -> List[CalibrationRecord]:
    """
    Read JSON-lines calibration records

    Args:
        path: file with one {keypoint_id, detected, confidence, ground_truth} object per line

    Returns:
        List of CalibrationRecord
    """
    records = []
    with open(path, "r") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                records.append(CalibrationRecordModel.model_validate_json(line).to_record())
            except ValidationError as e:
                raise InputError(f"{path}:{line_no}: {_validation_message(e)}")
    if not records:
        raise InputError(f"{path}: no calibration records")
    logger.info(f"Loaded {len(records)} calibration records from {path}")
    return records


def load_observations(path: PathLike) -> List[ObservationFrame]:
    """Observation frames from a single frame object or {"frames": [...]}"""
    data = _read_json(path)
    try:
        if isinstance(data, dict) and "frames" in data:
            return ObservationsFile.model_validate(data).frames
        return [ObservationFrame.model_validate(data)]
    except ValidationError as e:
        raise InputError(f"{path}: {_validation_message(e)}")


def load_bounds(path: PathLike) -> Dict[int, KeypointBound]:
    try:
        return BoundsFile.model_validate(_read_json(path)).to_bounds()
    except ValidationError as e:
        raise InputError(f"{path}: {_validation_message(e)}")


def bounds_to_json(bounds: Dict[int, KeypointBound], alpha: float, norm: Union[str, Norm]) -> Dict[str, Any]:
    return BoundsFile(
        alpha=float(alpha),
        norm=Norm.parse(norm).value,
        bounds=[KeypointBoundModel.from_bound(bounds[k]) for k in sorted(bounds)],
    ).model_dump()


def result_to_json(result: SlueResult, frame: int = 0) -> Dict[str, Any]:
    """
    {form, order, status, solve_time_s, center, H (row-major), logdet, ...}
    """
    joint = result.joint
    constraint_set = result.constraint_set
    reference = None
    if constraint_set is not None and constraint_set.reference_quaternion is not None:
        reference = [float(v) for v in constraint_set.reference_quaternion]
    model = SlueResultModel(
        frame=frame,
        form=Form(result.form).value,
        order=result.order,
        status=result.status.value,
        solve_time_s=float(result.solve_time),
        target=result.target.value if result.target is not None else None,
        center=joint.center.tolist() if joint is not None else None,
        H=joint.h.tolist() if joint is not None else None,
        logdet=_finite_or_none(result.logdet),
        ellipsoid_frame=joint.frame.value if joint is not None else None,
        pose_estimate=PoseModel.from_pose(result.pose_estimate) if result.pose_estimate is not None else None,
        reference_quaternion=reference,
        residual=_finite_or_none(result.residual),
        dropped_keypoints=list(result.dropped_keypoints),
        message=result.message,
        axes=list(result.axes),
    )
    return model.model_dump()


def load_results(path: PathLike) -> List[SlueResultModel]:
    """Result objects from a single result or {"results": [...]}"""
    data = _read_json(path)
    items = data.get("results", [data]) if isinstance(data, dict) else data
    try:
        return [SlueResultModel.model_validate(item) for item in items]
    except ValidationError as e:
        raise InputError(f"{path}: {_validation_message(e)}")


def ellipsoid_from_result(model: SlueResultModel) -> Tuple[EllipsoidBound, Optional[Pose]]:
    """Joint bound and pose estimate of a serialized successful result"""
    if model.status != "ok" or model.H is None or model.center is None:
        raise InputError(f"frame {model.frame}: result has status '{model.status}' and no ellipsoid")
    bound = EllipsoidBound(h=np.array(model.H), center=np.array(model.center),
                           frame=model.ellipsoid_frame or "generic")
    pose = model.pose_estimate.to_pose() if model.pose_estimate is not None else None
    return bound, pose


def projection_to_json(report: ProjectionReport) -> Dict[str, Any]:
    """{h_t, center_t, h_theta, representation, volumes, axes_deg}"""
    return {
        "h_t": report.translation.h_t.tolist(),
        "center_t": report.translation.center.tolist(),
        "h_theta": report.angular.h_theta.tolist(),
        "representation": report.angular.representation.value,
        "center_rotation": report.angular.center_rotation.m.tolist(),
        "axes_deg": angular_axes_deg(report.angular).tolist(),
        "volumes": {k: _finite_or_none(v) for k, v in report.volumes.items()},
    }


def coverage_to_json(report: CoverageReport) -> Dict[str, Any]:
    return asdict(report)


def toy2d_to_json(report: Toy2dReport) -> Dict[str, Any]:
    return {
        "center": report.center.tolist(),
        "n_feasible": report.n_feasible,
        "monotone": report.monotone,
        "orders": [
            {
                "order": o.order,
                "H": o.bound.h.tolist(),
                "logdet": _finite_or_none(o.logdet),
                "area": _finite_or_none(o.area),
                "grid_inside": o.grid_inside,
                "n_outside": o.n_outside,
            }
            for o in report.orders
        ],
    }


def write_ellipse_slices_csv(path: PathLike, translation: TranslationBound,
                             angular: Optional[AngularBound] = None,
                             n_points: Optional[int] = None) -> pd.DataFrame:
    """Write 2D outlines of the marginals as CSV point lists"""
    frame = ellipse_slices(translation, angular, n_points)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    logger.info(f"Wrote {len(frame)} slice points to {path}")
    return frame


def write_json(data: Any, path: Optional[PathLike] = None) -> str:
    """Serialize to JSON text; also write it to path when given"""
    text = json.dumps(data, indent=2)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n")
    return text
