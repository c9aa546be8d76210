"""
Keypoint observations for one image frame
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.conformal import KeypointBound, Norm, bound_for_detection
from src.geometry import CameraIntrinsics
from src.utils.errors import InputError
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class ObservationSet:
    """
    Detected keypoints with their model points and pixel radii

    keypoints_3d is N x 3 (meters), detections N x 2 (pixels), radii length N (pixels).
    Radii may be infinite; builders reject such sets until drop_unbounded() is applied.
    """
    keypoints_3d: np.ndarray
    detections: np.ndarray
    radii: np.ndarray
    intrinsics: CameraIntrinsics
    norm: Norm = Norm.INFINITY
    keypoint_ids: Optional[Tuple[int, ...]] = field(default=None)

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.keypoints_3d, dtype=float))
        y = np.atleast_2d(np.asarray(self.detections, dtype=float))
        r = np.asarray(self.radii, dtype=float).reshape(-1)
        if b.shape[1] != 3:
            raise InputError(f"keypoints_3d must be N x 3, got shape {b.shape}")
        if y.shape[1] != 2:
            raise InputError(f"detections must be N x 2, got shape {y.shape}")
        if not (b.shape[0] == y.shape[0] == r.shape[0]):
            raise InputError(
                f"length mismatch: {b.shape[0]} keypoints, {y.shape[0]} detections, {r.shape[0]} radii"
            )
        if b.shape[0] < 1:
            raise InputError("an observation set needs at least one keypoint")
        if np.any(np.isnan(r)) or np.any(r < 0):
            raise InputError("radii must be nonnegative")
        ids = tuple(range(b.shape[0])) if self.keypoint_ids is None else tuple(int(i) for i in self.keypoint_ids)
        if len(ids) != b.shape[0]:
            raise InputError("keypoint_ids length does not match the number of keypoints")
        object.__setattr__(self, "keypoints_3d", b)
        object.__setattr__(self, "detections", y)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "norm", Norm.parse(self.norm))
        object.__setattr__(self, "keypoint_ids", ids)

    @property
    def n(self) -> int:
        return int(self.keypoints_3d.shape[0])

    @property
    def unbounded_keypoints(self) -> List[int]:
        return [self.keypoint_ids[i] for i in range(self.n) if math.isinf(self.radii[i])]

    def subset(self, indices: Sequence[int]) -> "ObservationSet":
        idx = list(indices)
        return ObservationSet(
            keypoints_3d=self.keypoints_3d[idx],
            detections=self.detections[idx],
            radii=self.radii[idx],
            intrinsics=self.intrinsics,
            norm=self.norm,
            keypoint_ids=tuple(self.keypoint_ids[i] for i in idx),
        )

    def with_radii(self, radii: Union[Sequence[float], np.ndarray]) -> "ObservationSet":
        return ObservationSet(self.keypoints_3d, self.detections, np.asarray(radii, dtype=float),
                              self.intrinsics, self.norm, self.keypoint_ids)

    def scaled_radii(self, factor: float) -> "ObservationSet":
        return self.with_radii(self.radii * factor)

    def drop_unbounded(self) -> Tuple["ObservationSet", List[int]]:
        """
        Remove keypoints whose radius is infinite

        Returns:
            (reduced observation set, dropped keypoint ids)
        """
        dropped = self.unbounded_keypoints
        if not dropped:
            return self, []
        keep = [i for i in range(self.n) if not math.isinf(self.radii[i])]
        if not keep:
            raise InputError("every keypoint has an infinite radius")
        logger.warning(f"Dropping keypoints with infinite radius: {dropped}")
        return self.subset(keep), dropped


def observations_from_bounds(keypoints_3d: np.ndarray, detections: np.ndarray,
                             confidences: Sequence[float], bounds: dict,
                             intrinsics: CameraIntrinsics,
                             keypoint_ids: Optional[Sequence[int]] = None) -> ObservationSet:
    """
    Build an observation set whose radii come from calibrated keypoint bounds

    Args:
        keypoints_3d: N x 3 model points
        detections: N x 2 detected pixels
        confidences: detector confidences
        bounds: mapping keypoint_id -> KeypointBound
        intrinsics: camera intrinsics
        keypoint_ids: ids per row (defaults to 0..N-1)

    Returns:
        ObservationSet using the norm of the bounds
    """
    n = len(confidences)
    ids = list(range(n)) if keypoint_ids is None else list(keypoint_ids)
    missing = [kid for kid in ids if kid not in bounds]
    if missing:
        raise InputError(f"no calibrated bound for keypoints {missing}")
    used: List[KeypointBound] = [bounds[kid] for kid in ids]
    norms = {b.norm for b in used}
    if len(norms) != 1:
        raise InputError("calibrated bounds mix norms")
    radii = [bound_for_detection(b, c) for b, c in zip(used, confidences)]
    return ObservationSet(keypoints_3d, detections, np.asarray(radii), intrinsics,
                          norm=norms.pop(), keypoint_ids=tuple(ids))
