"""
Boundary samples and 2D outlines of ellipsoid bounds, emitted as data for external plotting
"""
from __future__ import annotations

from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.constraints import Form, vector_to_pose
from src.geometry import Pose
from src.projection.marginals import AngularBound, TranslationBound, image_shape
from src.sos import EllipsoidBound, EllipsoidFrame
from src.utils.config_loader import get_config
from src.utils.errors import DegenerateBoundError, InputError
from src.utils.logger import get_logger

logger = get_logger(__name__)
config = get_config()

FRAME_FORMS = {
    EllipsoidFrame.ROTMAT_TRANSLATION: Form.ROTMAT,
    EllipsoidFrame.QUAT_TRANSLATION: Form.QUAT,
}


def inverse_sqrt(h: np.ndarray) -> np.ndarray:
    """H^(-1/2) for a positive definite H"""
    w, v = np.linalg.eigh(0.5 * (h + h.T))
    floor = config.get_float("projection.eig_floor", 1e-12) * max(1.0, float(w.max()))
    if np.any(w <= floor):
        axes = [int(i) for i in np.nonzero(np.abs(v[:, w <= floor]).max(axis=1) > 0.3)[0]]
        raise DegenerateBoundError(axes, "cannot sample the boundary of an unbounded ellipsoid")
    return (v / np.sqrt(w)) @ v.T


def sample_ellipsoid_boundary(bound: EllipsoidBound, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Points c + H^(-1/2) u with u uniform on the unit sphere

    Args:
        bound: full-rank ellipsoid
        n: number of samples
        rng: numpy Generator

    Returns:
        n x d array
    """
    if n < 0:
        raise InputError(f"sample count must be nonnegative, got {n}")
    root = inverse_sqrt(bound.h)
    u = rng.standard_normal((n, bound.dim))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return bound.center + u @ root.T


def ellipse_outline(h: np.ndarray, center: np.ndarray, pair: Tuple[int, int], n_points: int) -> np.ndarray:
    """Outline of the projection of {z : (z - c)^T h (z - c) <= 1} onto a coordinate pair"""
    d = h.shape[0]
    selector = np.zeros((2, d))
    selector[0, pair[0]] = 1.0
    selector[1, pair[1]] = 1.0
    shape = image_shape(h, selector)
    angles = np.linspace(0.0, 2.0 * np.pi, n_points, endpoint=True)
    circle = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return center[list(pair)] + circle @ inverse_sqrt(shape).T


def ellipse_slices(translation: TranslationBound, angular: Optional[AngularBound] = None,
                   n_points: Optional[int] = None,
                   pairs: Sequence[Tuple[int, int]] = tuple(combinations(range(3), 2))) -> pd.DataFrame:
    """
    2D outlines of the translation (and angular) marginals for every coordinate pair

    Returns:
        DataFrame with columns bound, axis_i, axis_j, point, u, v
    """
    n_points = n_points or config.get_int("projection.slice_points", 200)
    frames = []
    sources = [("translation", translation.h_t, translation.center)]
    if angular is not None:
        sources.append((angular.representation.value, angular.h_theta, np.zeros(3)))
    for name, h, center in sources:
        for pair in pairs:
            points = ellipse_outline(h, center, pair, n_points)
            frames.append(pd.DataFrame({
                "bound": name,
                "axis_i": pair[0],
                "axis_j": pair[1],
                "point": np.arange(n_points),
                "u": points[:, 0],
                "v": points[:, 1],
            }))
    return pd.concat(frames, ignore_index=True)


def boundary_poses(joint: EllipsoidBound, n: int, rng: np.random.Generator) -> List[Pose]:
    """
    Poses sampled on the joint ellipsoid surface, rounded to SO(3) (or normalized) per form
    """
    frame = EllipsoidFrame(joint.frame)
    if frame not in FRAME_FORMS:
        raise InputError(f"bound in frame '{frame.value}' does not describe poses")
    points = sample_ellipsoid_boundary(joint, n, rng)
    ones = np.ones((points.shape[0], 1))
    return [vector_to_pose(x, FRAME_FORMS[frame]) for x in np.hstack([ones, points])]

