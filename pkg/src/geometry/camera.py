"""
Pinhole camera model and object poses
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.geometry.rotations import Rotation
from src.utils.errors import ChiralityError, InputError


@dataclass(frozen=True)
class CameraIntrinsics:
    """Upper-triangular calibration matrix K in pixels"""
    k: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        if k.shape != (3, 3):
            raise InputError(f"intrinsics must be 3x3, got shape {k.shape}")
        if not np.allclose(k[2], [0.0, 0.0, 1.0]):
            raise InputError("intrinsics last row must be (0, 0, 1)")
        if k[1, 0] != 0.0:
            raise InputError("intrinsics must be upper triangular")
        if k[0, 0] <= 0 or k[1, 1] <= 0:
            raise InputError("focal lengths must be positive")
        object.__setattr__(self, "k", k)

    @classmethod
    def from_params(cls, fx: float, fy: float, cx: float, cy: float, s: float = 0.0) -> "CameraIntrinsics":
        return cls(np.array([[fx, s, cx], [0.0, fy, cy], [0.0, 0.0, 1.0]]))


@dataclass(frozen=True)
class Pose:
    """Object-to-camera transform (R, t), translation in meters"""
    rotation: Rotation
    translation: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.translation, dtype=float).reshape(-1)
        if t.shape != (3,):
            raise InputError(f"translation must be a 3-vector, got {t.shape[0]} entries")
        object.__setattr__(self, "translation", t)

    def transform(self, points: np.ndarray) -> np.ndarray:
        """Map model-frame points (N x 3 or 3) into the camera frame"""
        points = np.asarray(points, dtype=float)
        return points @ self.rotation.m.T + self.translation


def project_keypoint(pose: Pose, k: CameraIntrinsics, b: np.ndarray) -> np.ndarray:
    """
    Project a model-frame point into the image

    Args:
        pose: object pose
        k: camera intrinsics
        b: 3-vector in meters

    Returns:
        2-vector in pixels
    """
    p = pose.transform(np.asarray(b, dtype=float).reshape(3))
    depth = float(p[2])
    if depth <= 0.0:
        raise ChiralityError(f"point has nonpositive depth {depth:.3g}")
    return (k.k @ p / depth)[:2]


def project_points(pose: Pose, k: CameraIntrinsics, points: np.ndarray) -> np.ndarray:
    """Project N model points; returns an N x 2 array"""
    return np.array([project_keypoint(pose, k, b) for b in np.atleast_2d(points)])
