"""
Rejection sampling of poses inside a pose uncertainty constraint set
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.spatial.transform import Rotation as ScipyRotation

from src.constraints import Form, QuadraticConstraintSet, pose_to_vector
from src.geometry import Pose, Rotation
from src.utils.config_loader import get_config
from src.utils.errors import InputError
from src.utils.logger import get_logger

logger = get_logger(__name__)
config = get_config()

# Lateral translation step relative to |t| at a given proposal scale
LATERAL_FRACTION = 0.3
BATCH = 2000


@dataclass
class SampleBatch:
    poses: List[Pose] = field(default_factory=list)
    proposals: int = 0
    accepted: int = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 0.0


def _propose(seed_pose: Pose, scale: float, count: int, rng: np.random.Generator):
    """
    Perturb rotation by a random rotation vector and translation by a depth scaling
    along t plus an isotropic step
    """
    rotvecs = scale * rng.standard_normal((count, 3))
    deltas = ScipyRotation.from_rotvec(rotvecs).as_matrix()
    rotations = deltas @ seed_pose.rotation.m
    t = seed_pose.translation
    along = 1.0 + scale * rng.uniform(-1.0, 1.0, size=(count, 1))
    lateral = scale * LATERAL_FRACTION * np.linalg.norm(t) * rng.standard_normal((count, 3))
    translations = along * t + lateral
    return rotations, translations


def _to_vectors(constraint_set: QuadraticConstraintSet, rotations: np.ndarray,
                translations: np.ndarray) -> np.ndarray:
    form = constraint_set.form
    if form is Form.ROTMAT:
        vecs = rotations.transpose(0, 2, 1).reshape(len(rotations), 9)
        return np.hstack([np.ones((len(rotations), 1)), vecs, translations])
    if form is Form.QUAT:
        reference = constraint_set.reference_quaternion
        return np.array([
            pose_to_vector(Pose(Rotation(r), t), Form.QUAT, reference)
            for r, t in zip(rotations, translations)
        ])
    raise InputError(f"cannot sample poses for a set in form '{form.value}'")


def rejection_sample(constraint_set: QuadraticConstraintSet, seed_pose: Pose, n: int,
                     rng: np.random.Generator, proposals: Optional[int] = None) -> SampleBatch:
    """
    Propose perturbations of the seed pose on a geometric ladder of scales and keep members

    Args:
        constraint_set: rotmat or quat form set
        seed_pose: pose near the set
        n: maximum number of members returned
        rng: numpy Generator
        proposals: proposal budget (config harness.sampler.proposals)

    Returns:
        SampleBatch with up to n member poses
    """
    if n < 0:
        raise InputError(f"sample count must be nonnegative, got {n}")
    batch = SampleBatch()
    if n == 0:
        return batch

    budget = proposals or config.get_int("harness.sampler.proposals", 20000)
    scales = np.geomspace(
        config.get_float("harness.sampler.min_scale", 1e-5),
        config.get_float("harness.sampler.max_scale", 0.5),
        config.get_int("harness.sampler.n_scales", 16),
    )
    per_scale = max(1, budget // len(scales))

    kept_r, kept_t = [], []
    for scale in scales:
        remaining = per_scale
        while remaining > 0:
            count = min(BATCH, remaining)
            remaining -= count
            rotations, translations = _propose(seed_pose, scale, count, rng)
            mask = constraint_set.members(_to_vectors(constraint_set, rotations, translations))
            batch.proposals += count
            batch.accepted += int(mask.sum())
            kept_r.append(rotations[mask])
            kept_t.append(translations[mask])

    rotations = np.concatenate(kept_r) if kept_r else np.zeros((0, 3, 3))
    translations = np.concatenate(kept_t) if kept_t else np.zeros((0, 3))
    if len(rotations) > n:
        pick = rng.choice(len(rotations), size=n, replace=False)
        rotations, translations = rotations[pick], translations[pick]
    batch.poses = [Pose(Rotation(r), t) for r, t in zip(rotations, translations)]

    if batch.accepted == 0:
        logger.warning(f"Rejection sampler accepted none of {batch.proposals} proposals")
    else:
        logger.debug(f"Rejection sampler acceptance rate {batch.acceptance_rate:.4f}")
    return batch


def sample_feasible_poses(constraint_set: QuadraticConstraintSet, seed_pose: Pose, n: int,
                          rng: Optional[np.random.Generator] = None,
                          proposals: Optional[int] = None) -> List[Pose]:
    """Up to n member poses of the set; empty (with a warning) when nothing is accepted"""
    rng = rng if rng is not None else np.random.default_rng(config.get_int("harness.seed", 0))
    return rejection_sample(constraint_set, seed_pose, n, rng, proposals).poses
