"""
Pose ellipsoid bounds around a pose estimate (joint or split objective)
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.conformal import Norm
from src.constraints import (
    Form,
    ObservationSet,
    QuadraticConstraintSet,
    build_constraint_set,
    pose_to_vector,
)
from src.geometry import Pose, rotation_to_quat
from src.sos import (
    ConicBackend,
    EllipsoidBound,
    EllipsoidFrame,
    EllipsoidObjective,
    SosCertificate,
    solve_min_volume_ellipsoid,
)
from src.utils.config_loader import get_config
from src.utils.errors import (
    CertificationError,
    DegenerateSetError,
    InputError,
    SlueError,
    UnboundedSetError,
)
from src.utils.logger import get_logger, solve_logger

logger = get_logger(__name__)
config = get_config()


class SlueStatus(str, Enum):
    OK = "ok"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    DEGENERATE = "degenerate"
    NUMERICAL = "numerical"
    INPUT = "input_error"


class SplitTarget(str, Enum):
    ROTATION_ONLY = "rotation_only"
    TRANSLATION_ONLY = "translation_only"


# Index blocks of the non-homogeneous coordinates per form
BLOCKS = {
    Form.ROTMAT: {"rotation": tuple(range(0, 9)), "translation": tuple(range(9, 12))},
    Form.QUAT: {"rotation": tuple(range(0, 4)), "translation": tuple(range(4, 7))},
}

FRAMES = {
    Form.ROTMAT: EllipsoidFrame.ROTMAT_TRANSLATION,
    Form.QUAT: EllipsoidFrame.QUAT_TRANSLATION,
}


@dataclass
class SlueResult:
    form: Form
    order: int
    status: SlueStatus
    solve_time: float
    joint: Optional[EllipsoidBound] = None
    pose_estimate: Optional[Pose] = None
    target: Optional[SplitTarget] = None
    message: str = ""
    axes: List[int] = field(default_factory=list)
    dropped_keypoints: Tuple[int, ...] = ()
    residual: Optional[float] = None
    certificate: Optional[SosCertificate] = field(default=None, repr=False)
    constraint_set: Optional[QuadraticConstraintSet] = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.status is SlueStatus.OK

    @property
    def logdet(self) -> Optional[float]:
        if self.joint is None:
            return None
        if self.target is None:
            return self.joint.logdet
        idx = list(BLOCKS[self.form][_block_name(self.target)])
        w = np.linalg.eigvalsh(self.joint.h[np.ix_(idx, idx)])
        return float(np.sum(np.log(w))) if np.all(w > 0) else float("-inf")


def _block_name(target: SplitTarget) -> str:
    return "rotation" if SplitTarget(target) is SplitTarget.ROTATION_ONLY else "translation"


def default_form(order: int) -> Form:
    """Rotation-matrix form at order 1, quaternion form from order 2"""
    return Form.ROTMAT if order <= 1 else Form.QUAT


def pose_center(pose: Pose, form: Form) -> np.ndarray:
    """Ellipsoid center [vec(R), t] or [q, t] of a pose estimate"""
    form = Form(form)
    reference = rotation_to_quat(pose.rotation).q if form is Form.QUAT else None
    return pose_to_vector(pose, form, reference)[1:]


def _validate(obs: ObservationSet, form: Form, order: int):
    if order < 1:
        raise InputError(f"relaxation order must be at least 1, got {order}")
    if form is Form.QUAT:
        if order == 1:
            raise InputError("the first-order relaxation is not available in quaternion form; "
                             "use order >= 2 or the rotation-matrix form")
        if obs.norm is not Norm.INFINITY:
            raise InputError("the quaternion form supports infinity-norm radii only")
    elif form is not Form.ROTMAT:
        raise InputError(f"unsupported form '{form}'")


def _solve(obs: ObservationSet, pose_estimate: Pose, form: Optional[Union[str, Form]],
           order: int, target: Optional[SplitTarget],
           backend: Optional[ConicBackend], dump_path: Optional[str]) -> SlueResult:
    form = default_form(order) if form is None else Form(form)
    _validate(obs, form, order)

    constraint_set = build_constraint_set(obs, form, pose_estimate)
    center = pose_center(pose_estimate, form)
    if target is None:
        objective = EllipsoidObjective.joint()
    else:
        objective = EllipsoidObjective.subblock(BLOCKS[form][_block_name(target)])

    start = time.perf_counter()
    bound, certificate = solve_min_volume_ellipsoid(
        constraint_set,
        center,
        kappa=order - 1,
        objective=objective,
        frame=FRAMES[form],
        backend=backend,
        dump_path=dump_path,
    )
    elapsed = time.perf_counter() - start

    result = SlueResult(
        form=form,
        order=order,
        status=SlueStatus.OK,
        solve_time=elapsed,
        joint=bound,
        pose_estimate=pose_estimate,
        target=target,
        dropped_keypoints=constraint_set.dropped_keypoints,
        residual=certificate.residual(),
        certificate=certificate,
        constraint_set=constraint_set,
    )
    solve_logger.log_solve(form.value, order, result.status.value, elapsed, result.logdet)
    return result


def slue_joint(obs: ObservationSet, pose_estimate: Pose, form: Optional[Union[str, Form]] = None,
               order: int = 1, backend: Optional[ConicBackend] = None,
               dump_path: Optional[str] = None) -> SlueResult:
    """
    Joint rotation-translation ellipsoid certified to contain the pose uncertainty set

    Args:
        obs: observation set with calibrated radii
        pose_estimate: ellipsoid center; need not lie inside the set
        form: 'rotmat' or 'quat' (default: rotmat at order 1, quat above)
        order: relaxation order (>= 1)
        backend: conic solver adapter
        dump_path: optional LMI dump file

    Returns:
        SlueResult with status ok

    Raises:
        InputError, CertificationError, NumericalSolveError
    """
    return _solve(obs, pose_estimate, form, order, None, backend, dump_path)


def slue_split(obs: ObservationSet, pose_estimate: Pose, form: Optional[Union[str, Form]] = None,
               order: int = 1, target: Union[str, SplitTarget] = SplitTarget.TRANSLATION_ONLY,
               backend: Optional[ConicBackend] = None,
               dump_path: Optional[str] = None) -> SlueResult:
    """
    Ellipsoid over the rotation or translation block only; the other block of H is zero
    """
    return _solve(obs, pose_estimate, form, order, SplitTarget(target), backend, dump_path)


def failure_status(error: Exception) -> SlueStatus:
    if isinstance(error, UnboundedSetError):
        return SlueStatus.UNBOUNDED
    if isinstance(error, DegenerateSetError):
        return SlueStatus.DEGENERATE
    if isinstance(error, CertificationError):
        return SlueStatus.INFEASIBLE
    if isinstance(error, InputError):
        return SlueStatus.INPUT
    return SlueStatus.NUMERICAL


def solve_frame(frame: int, obs: ObservationSet, pose_estimate: Pose,
                form: Optional[Union[str, Form]] = None, order: int = 1,
                target: Optional[Union[str, SplitTarget]] = None,
                backend: Optional[ConicBackend] = None,
                dump_path: Optional[str] = None) -> SlueResult:
    """Solve one frame, converting library errors into a failed SlueResult"""
    resolved = default_form(order) if form is None else Form(form)
    try:
        if target is None:
            return slue_joint(obs, pose_estimate, resolved, order, backend, dump_path)
        return slue_split(obs, pose_estimate, resolved, order, target, backend, dump_path)
    except SlueError as e:
        status = failure_status(e)
        solve_logger.log_frame_failure(frame, status.value, str(e))
        return SlueResult(
            form=resolved,
            order=order,
            status=status,
            solve_time=0.0,
            pose_estimate=pose_estimate,
            target=SplitTarget(target) if target is not None else None,
            message=str(e),
            axes=list(getattr(e, "axes", []) or []),
        )


def slue_batch(frames: Sequence[Tuple[ObservationSet, Pose]], form: Optional[Union[str, Form]] = None,
               order: int = 1, target: Optional[Union[str, SplitTarget]] = None,
               workers: Optional[int] = None) -> List[SlueResult]:
    """
    Solve independent frames; failures are recorded per frame and never abort the batch

    Args:
        frames: (observation set, pose estimate) pairs
        form: constraint form
        order: relaxation order
        target: split target or None for the joint objective
        workers: thread count (config harness.workers)

    Returns:
        One SlueResult per frame, in input order
    """
    workers = workers or config.get_int("harness.workers", 1)

    def _run(item):
        index, (obs, pose) = item
        return solve_frame(index, obs, pose, form, order, target, ConicBackend())

    if workers <= 1:
        results = [_run(item) for item in enumerate(frames)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run, enumerate(frames)))

    failed = sum(1 for r in results if not r.ok)
    logger.info(f"Solved {len(results) - failed}/{len(results)} frames (order {order})")
    return results


def pose_in_result(result: SlueResult, pose: Pose, slack: float = 1e-6) -> bool:
    """Whether a pose lies inside the result's ellipsoid"""
    if result.joint is None:
        raise InputError("result carries no ellipsoid")
    reference = None
    if result.form is Form.QUAT and result.pose_estimate is not None:
        reference = rotation_to_quat(result.pose_estimate.rotation).q
    z = pose_to_vector(pose, result.form, reference)[1:]
    return bool(result.joint.contains(z, slack))
