"""
Synthetic keypoint scenes with known ground-truth poses
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import truncnorm

from src.conformal import CalibrationRecord, Norm
from src.constraints import ObservationSet
from src.geometry import CameraIntrinsics, Pose, project_points, random_rotation
from src.utils.config_loader import get_config
from src.utils.errors import InputError
from src.utils.logger import get_logger

logger = get_logger(__name__)
config = get_config()

# spawn_key roots separating the object model stream from per-frame streams
_MODEL_STREAM = 0
_FRAME_STREAM = 1


class NoiseModel(str, Enum):
    UNIFORM_IN_BOX = "uniform_in_box"
    TRUNCATED_GAUSSIAN = "truncated_gaussian"


class NoiseCorrelation(str, Enum):
    INDEPENDENT = "independent"
    PERFECT = "perfect"


@dataclass(frozen=True)
class SceneConfig:
    """
    Synthetic scene generator settings

    Per-keypoint noise bounds s_i are drawn from radius_range (pixels) or equal
    noise_scale when radius_range is None. Detection noise lies in the box of
    half-width s_i, so infinity-norm radii s_i always contain the ground truth.
    """
    n_keypoints: int = 8
    object_scale: float = 0.1
    t_xy_range: float = 0.1
    depth_range: Tuple[float, float] = (0.5, 1.0)
    noise_model: NoiseModel = NoiseModel.UNIFORM_IN_BOX
    noise_scale: float = 4.0
    radius_range: Optional[Tuple[float, float]] = (2.0, 8.0)
    noise_correlation: NoiseCorrelation = NoiseCorrelation.INDEPENDENT
    norm: Norm = Norm.INFINITY
    intrinsics: CameraIntrinsics = field(
        default_factory=lambda: CameraIntrinsics.from_params(500.0, 500.0, 320.0, 240.0))
    max_retries: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.n_keypoints < 1:
            raise InputError("a scene needs at least one keypoint")
        if self.object_scale <= 0:
            raise InputError("object_scale must be positive")
        lo, hi = (float(v) for v in self.depth_range)
        if hi < lo:
            raise InputError(f"depth_range must be increasing, got {self.depth_range}")
        if self.noise_scale < 0:
            raise InputError("noise_scale must be nonnegative")
        if self.radius_range is not None:
            r_lo, r_hi = (float(v) for v in self.radius_range)
            if r_lo < 0 or r_hi < r_lo:
                raise InputError(f"invalid radius_range {self.radius_range}")
            object.__setattr__(self, "radius_range", (r_lo, r_hi))
        object.__setattr__(self, "depth_range", (lo, hi))
        object.__setattr__(self, "noise_model", NoiseModel(self.noise_model))
        object.__setattr__(self, "noise_correlation", NoiseCorrelation(self.noise_correlation))
        object.__setattr__(self, "norm", Norm.parse(self.norm))

    @classmethod
    def from_config(cls, overrides: Optional[Dict[str, Any]] = None) -> "SceneConfig":
        """Build from the harness config section, with optional field overrides"""
        section = dict(config.get_harness_config())
        section.update(overrides or {})
        intr = section.get("intrinsics") or {}
        if isinstance(intr, CameraIntrinsics):
            intrinsics = intr
        else:
            intrinsics = CameraIntrinsics.from_params(
                float(intr.get("fx", 500.0)), float(intr.get("fy", 500.0)),
                float(intr.get("cx", 320.0)), float(intr.get("cy", 240.0)),
                float(intr.get("s", 0.0)),
            )
        radius_range = section.get("radius_range", (2.0, 8.0))
        return cls(
            n_keypoints=int(section.get("n_keypoints", 8)),
            object_scale=float(section.get("object_scale", 0.1)),
            t_xy_range=float(section.get("t_xy_range", 0.1)),
            depth_range=tuple(section.get("depth_range", (0.5, 1.0))),
            noise_model=section.get("noise_model", NoiseModel.UNIFORM_IN_BOX),
            noise_scale=float(section.get("noise_scale", 4.0)),
            radius_range=tuple(radius_range) if radius_range is not None else None,
            noise_correlation=section.get("noise_correlation", NoiseCorrelation.INDEPENDENT),
            norm=section.get("norm", config.get("conformal.norm", "infinity")),
            intrinsics=intrinsics,
            max_retries=int(section.get("max_retries", 1000)),
            seed=int(section.get("seed", 0)),
        )

    def with_overrides(self, **kwargs) -> "SceneConfig":
        return replace(self, **kwargs)


@dataclass
class Scene:
    """One synthetic frame; unpacks as (obs, ground_truth)"""
    obs: ObservationSet
    ground_truth: Pose
    projections: np.ndarray
    confidences: np.ndarray
    frame: int = 0

    def __iter__(self):
        yield self.obs
        yield self.ground_truth


def frame_rng(seed: int, frame: int) -> np.random.Generator:
    """Independent generator per frame, stable under reordering and parallel maps"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_FRAME_STREAM, frame)))


def object_model(cfg: SceneConfig) -> np.ndarray:
    """Keypoints in an object-scale box, shared by every frame of a seed"""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(_MODEL_STREAM,)))
    half = cfg.object_scale / 2.0
    return rng.uniform(-half, half, size=(cfg.n_keypoints, 3))


def _sample_pose(cfg: SceneConfig, model: np.ndarray, rng: np.random.Generator) -> Pose:
    for _ in range(cfg.max_retries):
        rotation = random_rotation(rng)
        t = np.array([
            rng.uniform(-cfg.t_xy_range, cfg.t_xy_range),
            rng.uniform(-cfg.t_xy_range, cfg.t_xy_range),
            rng.uniform(*cfg.depth_range),
        ])
        pose = Pose(rotation, t)
        if np.all(pose.transform(model)[:, 2] > 0):
            return pose
    raise InputError(f"no pose with positive keypoint depths after {cfg.max_retries} retries")


def _noise_bounds(cfg: SceneConfig, rng: np.random.Generator) -> np.ndarray:
    if cfg.radius_range is None:
        return np.full(cfg.n_keypoints, cfg.noise_scale)
    return rng.uniform(*cfg.radius_range, size=cfg.n_keypoints)


def _unit_noise(cfg: SceneConfig, rng: np.random.Generator, rows: int) -> np.ndarray:
    """Noise in the unit box [-1, 1]^2, one row per keypoint"""
    if cfg.noise_model is NoiseModel.UNIFORM_IN_BOX:
        return rng.uniform(-1.0, 1.0, size=(rows, 2))
    # standard deviation of half the box width, truncated to the box
    return truncnorm.rvs(-2.0, 2.0, scale=0.5, size=(rows, 2), random_state=rng)


def generate_scene(cfg: SceneConfig, frame: int = 0) -> Scene:
    """
    Random pose, exact projections and bounded detection noise

    Args:
        cfg: scene settings
        frame: frame index; the generator for each (seed, frame) is fixed

    Returns:
        Scene with infinity-norm radii s_i (two-norm radii s_i * sqrt(2)) and
        confidences 1 / s_i
    """
    rng = frame_rng(cfg.seed, frame)
    model = object_model(cfg)
    pose = _sample_pose(cfg, model, rng)
    projections = project_points(pose, cfg.intrinsics, model)

    bounds = _noise_bounds(cfg, rng)
    if cfg.noise_correlation is NoiseCorrelation.PERFECT:
        unit = np.repeat(_unit_noise(cfg, rng, 1), cfg.n_keypoints, axis=0)
    else:
        unit = _unit_noise(cfg, rng, cfg.n_keypoints)
    detections = projections + bounds[:, None] * unit

    radii = bounds * (np.sqrt(2.0) if cfg.norm is Norm.TWO else 1.0)
    confidences = np.where(bounds > 0, 1.0 / np.where(bounds > 0, bounds, 1.0), 1.0)
    obs = ObservationSet(model, detections, radii, cfg.intrinsics, norm=cfg.norm)
    return Scene(obs=obs, ground_truth=pose, projections=projections,
                 confidences=confidences, frame=frame)


def generate_scenes(cfg: SceneConfig, n: int, start: int = 0) -> List[Scene]:
    return [generate_scene(cfg, frame) for frame in range(start, start + n)]


def calibration_records_from_scenes(scenes: List[Scene]) -> List[CalibrationRecord]:
    """One record per keypoint per scene: detection, confidence and exact projection"""
    records = []
    for scene in scenes:
        for kid, det, conf, gt in zip(scene.obs.keypoint_ids, scene.obs.detections,
                                      scene.confidences, scene.projections):
            records.append(CalibrationRecord(keypoint_id=int(kid), detected=det,
                                             confidence=float(conf), ground_truth=gt))
    return records
