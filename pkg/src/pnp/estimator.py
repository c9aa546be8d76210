"""
Maximum-likelihood backprojection PnP.

Minimizes f(R, t) = sum_i w_i |(e3^T p_i) y_i - (K p_i)[:2]|^2 with p_i = R b_i + t and
w_i = 1 / sigma_i over R in SO(3). The translation enters linearly and is eliminated in
closed form; the remaining quadratic in x = [1, vec(R)] is minimized by a second-order
moment relaxation over [x]_2 with the SO(3) equalities as localizing constraints. The
least-squares translation is linear in vec(R), so keypoint depths are too and enter the
relaxation as localizing inequalities.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import cvxpy as cp
import numpy as np
from scipy.optimize import least_squares
from scipy.spatial.transform import Rotation as ScipyRotation

from src.constraints import ObservationSet, build_so3_equalities, point_jacobian
from src.geometry import Pose, Rotation, project_to_so3, unvec
from src.sos import (
    ConicBackend,
    coefficient_operator,
    gram_operator,
    monomial_basis,
    shifted_form_operator,
)
from src.utils.config_loader import get_config
from src.utils.errors import InputError
from src.utils.logger import get_logger, solve_logger

logger = get_logger(__name__)
config = get_config()

# Homogeneous variables [1, vec(R)]
ROTATION_VARS = 10
MIN_KEYPOINTS = 3
DLT_MIN_KEYPOINTS = 6


@dataclass
class PnpProblem:
    """Observations plus per-keypoint weights; sigmas default to the keypoint radii"""
    obs: ObservationSet
    sigmas: Optional[np.ndarray] = None

    def __post_init__(self):
        sigmas = self.obs.radii if self.sigmas is None else self.sigmas
        sigmas = np.asarray(sigmas, dtype=float).reshape(-1)
        if sigmas.shape[0] != self.obs.n:
            raise InputError(f"expected {self.obs.n} sigmas, got {sigmas.shape[0]}")
        if np.any(np.isnan(sigmas)) or np.any(sigmas <= 0):
            raise InputError("sigmas must be positive; pass explicit sigmas when some radii are zero")
        self.sigmas = sigmas

    @property
    def weights(self) -> np.ndarray:
        return 1.0 / self.sigmas


@dataclass
class PnpResult:
    pose: Pose
    tightness: float
    method: str
    objective: float
    relaxation_value: Optional[float] = field(default=None, repr=False)

    def __iter__(self):
        yield self.pose
        yield self.tightness


def _residual_rows(obs: ObservationSet) -> np.ndarray:
    """Stacked M_i = (y_i e3^T - K)[:2], shape N x 2 x 3"""
    k = obs.intrinsics.k
    rows = []
    for y in obs.detections:
        m = np.outer(np.concatenate([y, [1.0]]), [0.0, 0.0, 1.0]) - k
        rows.append(m[:2])
    return np.array(rows)


def _linear_system(problem: PnpProblem) -> Tuple[np.ndarray, np.ndarray]:
    """(A, B) with residual vector A vec(R) + B t, weights folded in as sqrt(w_i)"""
    obs = problem.obs
    ms = _residual_rows(obs)
    a_blocks, b_blocks = [], []
    for m, b, w in zip(ms, obs.keypoints_3d, problem.weights):
        jac = m @ point_jacobian(b)
        a_blocks.append(np.sqrt(w) * jac[:, :9])
        b_blocks.append(np.sqrt(w) * jac[:, 9:])
    return np.vstack(a_blocks), np.vstack(b_blocks)


def pnp_objective(problem: PnpProblem, pose: Pose) -> float:
    """f(R, t) = sum_i w_i |(e3^T p_i) y_i - (K p_i)[:2]|^2"""
    a, b = _linear_system(problem)
    r = a @ pose.rotation.vec + b @ pose.translation
    return float(r @ r)


def solve_translation_given_rotation(problem: PnpProblem, rotation: Rotation) -> np.ndarray:
    """Least-squares translation for a fixed rotation"""
    a, b = _linear_system(problem)
    t, *_ = np.linalg.lstsq(b, -a @ rotation.vec, rcond=None)
    return t


def reduced_cost(problem: PnpProblem) -> np.ndarray:
    """
    Cost matrix C over x = [1, vec(R)] with x^T C x = min_t f(R, t)
    """
    a, b = _linear_system(problem)
    q, _ = np.linalg.qr(b)
    a_perp = a - q @ (q.T @ a)
    cost = np.zeros((ROTATION_VARS, ROTATION_VARS))
    cost[1:, 1:] = a_perp.T @ a_perp
    return 0.5 * (cost + cost.T)


def keypoint_depths(obs: ObservationSet, pose: Pose) -> np.ndarray:
    """Camera-frame depths e3^T (R b_i + t)"""
    points = obs.keypoints_3d @ pose.rotation.m.T + pose.translation
    return points[:, 2]


def depth_forms(problem: PnpProblem) -> List[np.ndarray]:
    """
    Quadratic forms G_i over x = [1, vec(R)] with x^T G_i x = depth of keypoint i at the
    least-squares translation, scaled to unit linear part
    """
    a, b = _linear_system(problem)
    translation_map = -np.linalg.pinv(b) @ a
    forms = []
    for kp in problem.obs.keypoints_3d:
        g = point_jacobian(kp)[2, :9] + translation_map[2]
        norm = np.linalg.norm(g)
        if norm == 0:
            continue
        form = np.zeros((ROTATION_VARS, ROTATION_VARS))
        form[0, 1:] = 0.5 * g / norm
        forms.append(form + form.T)
    return forms


def _moment_relaxation(cost: np.ndarray, backend: ConicBackend,
                       inequalities: Sequence[np.ndarray] = ()) -> Tuple[Optional[np.ndarray], Optional[float]]:
    """
    Second-order moment relaxation of min x^T C x over x = [1, vec(R)], R in SO(3)

    Each form G in inequalities adds x^T G x >= 0 through a PSD localizing matrix over [x]_1.

    Returns:
        (order-one moment matrix E[x x^T] or None on failure, relaxation value)
    """
    n = ROTATION_VARS
    out = monomial_basis(n, 4)
    lifted = monomial_basis(n, 2)
    multiplier = monomial_basis(n, 1)
    m = lifted.dim

    scale = float(np.max(np.abs(cost))) or 1.0
    y = cp.Variable(out.dim)
    moment = cp.Variable((m, m), PSD=True)
    gram = gram_operator(lifted, out)
    shifted = shifted_form_operator(n, 2, out)

    constraints = [cp.reshape(moment, (m * m,), order="F") == gram.T @ y]
    anchor = np.zeros((1, n), dtype=np.int64)
    anchor[0, 0] = 4
    constraints.append(y[int(out.index_of(anchor)[0])] == 1.0)
    for q in build_so3_equalities():
        local = coefficient_operator(multiplier, q[:n, :n], out)
        constraints.append(local.T @ y == 0)
    p = multiplier.dim
    for g in inequalities:
        local = coefficient_operator(multiplier, g, out)
        localizing = cp.Variable((p, p), PSD=True)
        constraints.append(cp.reshape(localizing, (p * p,), order="F") == local.T @ y)

    objective = cp.Minimize((cost / scale).reshape(-1, order="F") @ (shifted.T @ y))
    problem = cp.Problem(objective, constraints)
    outcome = backend.solve(problem)
    if not outcome.ok or y.value is None:
        logger.warning(f"PnP relaxation failed with status {outcome.status}")
        return None, None

    second = (shifted.T @ y.value).reshape(n, n, order="F")
    return 0.5 * (second + second.T), float(problem.value) * scale


def _round(second_moment: np.ndarray) -> Rotation:
    w, v = np.linalg.eigh(second_moment)
    top = v[:, -1]
    if abs(top[0]) < 1e-12:
        raise InputError("relaxation solution has no homogeneous component")
    x = top / top[0]
    return project_to_so3(unvec(x[1:], 3))


def dlt_initializer(problem: PnpProblem) -> Pose:
    """
    Direct linear transform on normalized image points followed by SO(3) projection

    Needs at least six keypoints; falls back to the identity rotation otherwise.
    """
    obs = problem.obs
    if obs.n < DLT_MIN_KEYPOINTS:
        logger.debug(f"DLT needs {DLT_MIN_KEYPOINTS} keypoints, have {obs.n}; using identity")
        rotation = Rotation.identity()
        return Pose(rotation, solve_translation_given_rotation(problem, rotation))

    k_inv = np.linalg.inv(obs.intrinsics.k)
    rows = []
    for b, y in zip(obs.keypoints_3d, obs.detections):
        u, v, _ = k_inv @ np.array([y[0], y[1], 1.0])
        xh = np.concatenate([b, [1.0]])
        zero = np.zeros(4)
        rows.append(np.concatenate([zero, -xh, v * xh]))
        rows.append(np.concatenate([xh, zero, -u * xh]))
    _, _, vt = np.linalg.svd(np.array(rows))
    p = vt[-1].reshape(3, 4)
    u_r, _, v_rt = np.linalg.svd(p[:, :3])
    rotation_m = u_r @ v_rt
    if np.linalg.det(rotation_m) < 0:
        rotation_m = -rotation_m
    rotation = Rotation(rotation_m)
    return Pose(rotation, solve_translation_given_rotation(problem, rotation))


def refine_pose(problem: PnpProblem, initial: Pose, max_nfev: Optional[int] = None) -> Pose:
    """
    Local polish of f over a rotation vector and the translation with scipy least_squares
    """
    a, b = _linear_system(problem)
    max_nfev = max_nfev or config.get_int("pnp.max_nfev", 200)

    def residuals(params):
        rotation_m = ScipyRotation.from_rotvec(params[:3]).as_matrix()
        return a @ rotation_m.reshape(-1, order="F") + b @ params[3:]

    x0 = np.concatenate([ScipyRotation.from_matrix(initial.rotation.m).as_rotvec(), initial.translation])
    fit = least_squares(residuals, x0, max_nfev=max_nfev)
    rotation = Rotation(ScipyRotation.from_rotvec(fit.x[:3]).as_matrix())
    return Pose(rotation, fit.x[3:])


def _gap(value: float, relaxation_value: Optional[float], scale: float) -> float:
    """Relative gap (f - f_relax) / (1 + |f|) on the cost normalized to unit max entry"""
    if relaxation_value is None:
        return float("inf")
    return max(0.0, (value - relaxation_value) / (scale + abs(value)))


def _in_front(problem: PnpProblem, pose: Pose) -> bool:
    return bool(np.all(keypoint_depths(problem.obs, pose) > 0))


def _pick(problem: PnpProblem, candidates: List[Tuple[Pose, str]]) -> Tuple[Pose, str, float]:
    """Lowest objective among candidates in front of the camera, else lowest overall"""
    scored = [(pnp_objective(problem, pose), pose, method) for pose, method in candidates]
    in_front = [s for s in scored if _in_front(problem, s[1])]
    value, pose, method = min(in_front or scored, key=lambda s: s[0])
    return pose, method, value


def pnp_estimate(problem: PnpProblem, backend: Optional[ConicBackend] = None,
                 refine: Optional[bool] = None) -> PnpResult:
    """
    Pose estimate minimizing the weighted backprojection error over poses in front of the camera

    Args:
        problem: PnpProblem
        backend: conic solver adapter for the relaxation
        refine: polish with least_squares when the gap exceeds pnp.gap_tol (config pnp.refine)

    Returns:
        PnpResult; unpacks as (pose, tightness)
    """
    n = problem.obs.n
    if n < MIN_KEYPOINTS:
        raise InputError(f"PnP needs at least {MIN_KEYPOINTS} keypoints, got {n}")
    if n == MIN_KEYPOINTS:
        logger.warning("PnP with three keypoints may return one of several valid poses")

    gap_tol = config.get_float("pnp.gap_tol", 1e-6)
    refine = config.get_bool("pnp.refine", True) if refine is None else refine
    backend = backend or ConicBackend()

    cost = reduced_cost(problem)
    scale = float(np.max(np.abs(cost))) or 1.0
    forms = depth_forms(problem) if config.get_bool("pnp.depth_constraints", True) else []
    second_moment, relaxation_value = _moment_relaxation(cost, backend, forms)
    fallback_method = "dlt" if n >= DLT_MIN_KEYPOINTS else "identity"
    candidates: List[Tuple[Pose, str]] = []
    if second_moment is not None:
        rotation = _round(second_moment)
        candidates.append((Pose(rotation, solve_translation_given_rotation(problem, rotation)), "sdp"))
    if not candidates or not _in_front(problem, candidates[0][0]):
        candidates.append((dlt_initializer(problem), fallback_method))

    pose, method, value = _pick(problem, candidates)
    tightness = _gap(value, relaxation_value, scale)
    if refine and tightness > gap_tol:
        polished = refine_pose(problem, pose)
        polished_value = pnp_objective(problem, polished)
        keeps_depth = _in_front(problem, polished) or not _in_front(problem, pose)
        if polished_value < value and keeps_depth:
            pose, value = polished, polished_value
            method = f"{method}+refine"
            tightness = _gap(value, relaxation_value, scale)

    if not _in_front(problem, pose):
        logger.warning(f"PnP estimate ({method}) has a keypoint behind the camera")
    solve_logger.log_pnp(method, tightness, value)
    return PnpResult(pose=pose, tightness=tightness, method=method, objective=value,
                     relaxation_value=relaxation_value)
