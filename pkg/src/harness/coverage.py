"""
Empirical coverage of keypoint bounds, the pose constraint set and the certified ellipsoid
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from src.conformal import Norm, calibrate_all
from src.constraints import Form, build_constraint_set, check_membership, observations_from_bounds, pose_to_vector
from src.harness.scenes import Scene, SceneConfig, calibration_records_from_scenes, generate_scene
from src.pnp import PnpProblem, pnp_estimate
from src.slue import default_form, pose_in_result, solve_frame
from src.utils.config_loader import get_config
from src.utils.errors import SlueError
from src.utils.logger import get_logger, solve_logger

logger = get_logger(__name__)
config = get_config()


class PoseSource(str, Enum):
    PNP = "pnp"
    GROUND_TRUTH = "ground_truth"


@dataclass
class CoverageReport:
    """
    Fractions of evaluation frames (keypoints for keypoint_coverage) whose bounds contain
    the ground truth. Set coverage counts every frame whose constraint set was built;
    ellipsoid coverage and solved_set_coverage count only frames whose solve succeeded.
    containment_violations counts solved frames with the ground truth in the set but
    outside the ellipsoid.
    """
    alpha: float
    keypoint_coverage: float
    set_coverage: float
    ellipsoid_coverage: Optional[float]
    n_frames: int
    n_failed: int = 0
    order: int = 1
    form: str = Form.ROTMAT.value
    solved_set_coverage: Optional[float] = None
    containment_violations: int = 0


@dataclass
class _FrameOutcome:
    keypoints_covered: int
    keypoints_total: int
    in_set: bool
    in_ellipsoid: Optional[bool]
    failed: bool
    set_built: bool = True


def _keypoints_covered(scene: Scene, radii: np.ndarray, norm: Norm) -> int:
    errors = scene.obs.detections - scene.projections
    order = 2 if norm is Norm.TWO else np.inf
    scores = np.linalg.norm(errors, ord=order, axis=1)
    return int(np.sum(scores <= radii))


def _evaluate_frame(scene: Scene, bounds, form: Form, order: int,
                    solve: bool, pose_source: PoseSource) -> _FrameOutcome:
    obs = observations_from_bounds(
        scene.obs.keypoints_3d, scene.obs.detections, scene.confidences, bounds,
        scene.obs.intrinsics, scene.obs.keypoint_ids,
    )
    covered = _keypoints_covered(scene, obs.radii, obs.norm)

    try:
        if pose_source is PoseSource.PNP:
            estimate = pnp_estimate(PnpProblem(obs)).pose
        else:
            estimate = scene.ground_truth
        constraint_set = build_constraint_set(obs, form, estimate)
    except SlueError as e:
        solve_logger.log_frame_failure(scene.frame, "input_error", str(e))
        return _FrameOutcome(covered, obs.n, False, None, True, set_built=False)

    reference = constraint_set.reference_quaternion
    x_true = pose_to_vector(scene.ground_truth, form, reference)
    in_set, _ = check_membership(constraint_set, x_true)

    if not solve:
        return _FrameOutcome(covered, obs.n, in_set, None, False)
    result = solve_frame(scene.frame, obs, estimate, form, order)
    if not result.ok:
        return _FrameOutcome(covered, obs.n, in_set, None, True)
    in_ellipsoid = pose_in_result(result, scene.ground_truth)
    if in_set and not in_ellipsoid:
        logger.warning(f"Frame {scene.frame}: ground truth in the constraint set but outside the ellipsoid")
    return _FrameOutcome(covered, obs.n, in_set, in_ellipsoid, False)


def evaluate_coverage(cfg: SceneConfig, alpha: float, order: int = 1,
                      form: Optional[Union[str, Form]] = None,
                      n_calibration: int = 200, n_eval: int = 100,
                      solve: bool = True,
                      pose_source: Union[str, PoseSource] = PoseSource.PNP,
                      workers: Optional[int] = None) -> CoverageReport:
    """
    Calibrate on one split of synthetic frames and measure coverage on a disjoint split

    Args:
        cfg: scene settings (norm and seed included)
        alpha: miscoverage level
        order: relaxation order for the ellipsoid solves
        form: constraint form (defaults per order)
        n_calibration: calibration frames, indices [0, n_calibration)
        n_eval: evaluation frames, indices following the calibration split
        solve: also certify an ellipsoid per frame
        pose_source: ellipsoid center provider
        workers: frame-parallel threads (config harness.workers)

    Returns:
        CoverageReport
    """
    form = default_form(order) if form is None else Form(form)
    pose_source = PoseSource(pose_source)
    workers = workers or config.get_int("harness.workers", 1)

    calibration = [generate_scene(cfg, frame) for frame in range(n_calibration)]
    bounds = calibrate_all(calibration_records_from_scenes(calibration), alpha, cfg.norm)
    frames = range(n_calibration, n_calibration + n_eval)

    def _run(frame: int) -> _FrameOutcome:
        return _evaluate_frame(generate_scene(cfg, frame), bounds, form, order, solve, pose_source)

    if workers <= 1:
        outcomes = [_run(f) for f in frames]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run, frames))

    kp_total = sum(o.keypoints_total for o in outcomes)
    kp_covered = sum(o.keypoints_covered for o in outcomes)
    built = [o for o in outcomes if o.set_built]
    solved = [o for o in outcomes if not o.failed]
    n_failed = len(outcomes) - len(solved)
    set_cov = float(np.mean([o.in_set for o in built])) if built else 0.0
    ellipsoid_cov = solved_set_cov = None
    violations = 0
    if solve:
        ellipsoid_cov = float(np.mean([bool(o.in_ellipsoid) for o in solved])) if solved else 0.0
        solved_set_cov = float(np.mean([o.in_set for o in solved])) if solved else 0.0
        violations = sum(1 for o in solved if o.in_set and not o.in_ellipsoid)

    report = CoverageReport(
        alpha=float(alpha),
        keypoint_coverage=kp_covered / kp_total if kp_total else 0.0,
        set_coverage=set_cov,
        ellipsoid_coverage=ellipsoid_cov,
        n_frames=len(outcomes),
        n_failed=n_failed,
        order=order,
        form=form.value,
        solved_set_coverage=solved_set_cov,
        containment_violations=violations,
    )
    logger.info(
        f"Coverage alpha={alpha}: keypoints {report.keypoint_coverage:.3f}, "
        f"set {report.set_coverage:.3f}, ellipsoid {report.ellipsoid_coverage}, "
        f"{n_failed}/{len(outcomes)} frames failed"
    )
    return report
