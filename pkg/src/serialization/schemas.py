"""
Pydantic schemas for calibration records, observation frames, bounds and results
"""
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator

from src.conformal import CalibrationRecord, KeypointBound, Norm
from src.constraints import ObservationSet, observations_from_bounds
from src.geometry import CameraIntrinsics, Pose, Rotation
from src.utils.errors import InputError

# JSON rotations are rounded; accept them at this tolerance
JSON_ROTATION_TOL = 1e-6


class IntrinsicsModel(BaseModel):
    """Either the full matrix k or the focal/principal-point parameters"""
    k: Optional[List[List[float]]] = None
    fx: Optional[float] = None
    fy: Optional[float] = None
    cx: Optional[float] = None
    cy: Optional[float] = None
    s: float = 0.0

    def to_intrinsics(self) -> CameraIntrinsics:
        if self.k is not None:
            return CameraIntrinsics(np.array(self.k, dtype=float))
        if None in (self.fx, self.fy, self.cx, self.cy):
            raise InputError("intrinsics need either 'k' or all of fx, fy, cx, cy")
        return CameraIntrinsics.from_params(self.fx, self.fy, self.cx, self.cy, self.s)


class PoseModel(BaseModel):
    """Object-to-camera pose"""
    rotation: List[List[float]]  # 3x3, row-major nesting
    translation: List[float]  # meters

    def to_pose(self) -> Pose:
        rotation = Rotation.from_matrix(np.array(self.rotation, dtype=float), tol=JSON_ROTATION_TOL)
        return Pose(rotation, np.array(self.translation, dtype=float))

    @classmethod
    def from_pose(cls, pose: Pose) -> "PoseModel":
        return cls(rotation=pose.rotation.m.tolist(), translation=pose.translation.tolist())


class CalibrationRecordModel(BaseModel):
    """One line of a calibration records file"""
    keypoint_id: int
    detected: List[float] = Field(min_length=2, max_length=2)  # pixels
    confidence: float = Field(gt=0)
    ground_truth: List[float] = Field(min_length=2, max_length=2)  # pixels

    def to_record(self) -> CalibrationRecord:
        return CalibrationRecord(self.keypoint_id, np.array(self.detected),
                                 self.confidence, np.array(self.ground_truth))


class KeypointBoundModel(BaseModel):
    """Calibrated radius; null radius means infinite"""
    keypoint_id: int
    radius: Optional[float]
    norm: str = Norm.INFINITY.value
    alpha: float
    n_records: int = 0

    @classmethod
    def from_bound(cls, bound: KeypointBound) -> "KeypointBoundModel":
        return cls(
            keypoint_id=bound.keypoint_id,
            radius=None if bound.infinite else bound.radius,
            norm=bound.norm.value,
            alpha=bound.alpha,
            n_records=bound.n_records,
        )

    def to_bound(self) -> KeypointBound:
        radius = float("inf") if self.radius is None else self.radius
        return KeypointBound(self.keypoint_id, radius, Norm.parse(self.norm), self.alpha, self.n_records)


class BoundsFile(BaseModel):
    """Output of the calibrate command"""
    alpha: float
    norm: str
    bounds: List[KeypointBoundModel]

    def to_bounds(self) -> Dict[int, KeypointBound]:
        return {b.keypoint_id: b.to_bound() for b in self.bounds}


class ObservationFrame(BaseModel):
    """
    One frame of keypoint observations

    Radii come from `radii` directly, or from calibrated bounds divided by `confidences`.
    """
    intrinsics: IntrinsicsModel
    keypoints_3d: List[List[float]]  # N x 3, meters
    detections: List[List[float]]  # N x 2, pixels
    confidences: Optional[List[float]] = None
    radii: Optional[List[Optional[float]]] = None  # null entries are infinite
    keypoint_ids: Optional[List[int]] = None
    norm: str = Norm.INFINITY.value
    alpha: Optional[float] = None
    pose: Optional[PoseModel] = None

    @field_validator("norm")
    @classmethod
    def _known_norm(cls, value: str) -> str:
        return Norm.parse(value).value

    def to_observation_set(self, bounds: Optional[Dict[int, KeypointBound]] = None) -> ObservationSet:
        """
        Args:
            bounds: calibrated bounds used when the frame carries no radii

        Returns:
            ObservationSet
        """
        intrinsics = self.intrinsics.to_intrinsics()
        b = np.array(self.keypoints_3d, dtype=float)
        y = np.array(self.detections, dtype=float)
        if self.radii is not None:
            radii = np.array([np.inf if r is None else r for r in self.radii], dtype=float)
            return ObservationSet(b, y, radii, intrinsics, norm=self.norm, keypoint_ids=self.keypoint_ids)
        if bounds is None:
            raise InputError("frame has no radii and no calibrated bounds were given")
        confidences = self.confidences if self.confidences is not None else [1.0] * len(b)
        return observations_from_bounds(b, y, confidences, bounds, intrinsics, self.keypoint_ids)


class ObservationsFile(BaseModel):
    frames: List[ObservationFrame]


class SlueResultModel(BaseModel):
    """Result JSON of the bound command"""
    frame: int = 0
    form: str
    order: int
    status: str
    solve_time_s: float
    target: Optional[str] = None
    center: Optional[List[float]] = None
    H: Optional[List[List[float]]] = None
    logdet: Optional[float] = None
    ellipsoid_frame: Optional[str] = None
    pose_estimate: Optional[PoseModel] = None
    reference_quaternion: Optional[List[float]] = None
    residual: Optional[float] = None
    dropped_keypoints: List[int] = Field(default_factory=list)
    message: str = ""
    axes: List[int] = Field(default_factory=list)
