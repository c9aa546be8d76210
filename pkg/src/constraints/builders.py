"""
Constraint-matrix builders for the pose uncertainty set.

Each keypoint i contributes linear functionals w^T (R b_i + t) <= 0: one chirality
term (w = -e3) and, for the infinity norm, four backprojection terms
w = +-M^T e_j - r_i e3 with M = y_i e3^T - K. In rotation-matrix form a linear value
l^T z is stored as A[0, 1:] = A[1:, 0] = l / 2. In quaternion form w^T R b is
rewritten as -q^T Omega1(w) Omega2(b) q.

The rotation-matrix form also takes redundant products of pairs of those linear terms.
"""
from __future__ import annotations

from dataclasses import replace
from typing import List, Optional, Tuple

import numpy as np

from src.conformal import Norm
from src.constraints.constraint_set import (
    QUAT_DIM,
    ROTMAT_DIM,
    Form,
    Label,
    QuadraticConstraintSet,
)
from src.constraints.observations import ObservationSet
from src.geometry import Pose, homogenize, omega1, omega2, rotation_to_quat, sym
from src.utils.config_loader import get_config
from src.utils.errors import InputError
from src.utils.logger import get_logger

logger = get_logger(__name__)
config = get_config()

PRODUCT_PAIRS = ("none", "keypoint", "all")

E3 = np.array([0.0, 0.0, 1.0])

# (i, j, value) triples, 1-indexed into x = [1, vec(R), t]; (i, j, l) sets Q[i, j] = Q[j, i] = l
SO3_TRIPLES: Tuple[Tuple[Tuple[int, int, float], ...], ...] = (
    # unit columns
    ((2, 2, 1), (3, 3, 1), (4, 4, 1), (1, 1, -1)),
    ((5, 5, 1), (6, 6, 1), (7, 7, 1), (1, 1, -1)),
    ((8, 8, 1), (9, 9, 1), (10, 10, 1), (1, 1, -1)),
    # orthogonal columns
    ((2, 5, 1), (3, 6, 1), (4, 7, 1)),
    ((2, 8, 1), (3, 9, 1), (4, 10, 1)),
    ((5, 8, 1), (6, 9, 1), (7, 10, 1)),
    # r1 x r2 = r3
    ((3, 7, 1), (4, 6, -1), (1, 8, -1)),
    ((4, 5, 1), (2, 7, -1), (1, 9, -1)),
    ((2, 6, 1), (3, 5, -1), (1, 10, -1)),
    # r2 x r3 = r1
    ((6, 10, 1), (7, 9, -1), (1, 2, -1)),
    ((7, 8, 1), (5, 10, -1), (1, 3, -1)),
    ((5, 9, 1), (6, 8, -1), (1, 4, -1)),
    # r3 x r1 = r2
    ((9, 4, 1), (10, 3, -1), (1, 5, -1)),
    ((10, 2, 1), (8, 4, -1), (1, 6, -1)),
    ((8, 3, 1), (9, 2, -1), (1, 7, -1)),
)


def _from_triples(triples, dim: int = ROTMAT_DIM) -> np.ndarray:
    q = np.zeros((dim, dim))
    for i, j, value in triples:
        q[i - 1, j - 1] = value
        q[j - 1, i - 1] = value
    return q


def build_so3_equalities() -> List[np.ndarray]:
    """The 15 quadratic equalities with x^T Q_j x = 0 iff R is in SO(3) (given x[0] = 1)"""
    return [_from_triples(t) for t in SO3_TRIPLES]


def point_jacobian(b: np.ndarray) -> np.ndarray:
    """J with R b + t == J @ [vec(R), t]"""
    b = np.asarray(b, dtype=float).reshape(1, 3)
    return np.hstack([np.kron(b, np.eye(3)), np.eye(3)])


def _rotmat_linear(b: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Homogeneous matrix whose quadratic form is w^T (R b + t)"""
    ell = point_jacobian(b).T @ w
    a = np.zeros((ROTMAT_DIM, ROTMAT_DIM))
    a[0, 1:] = ell / 2.0
    a[1:, 0] = ell / 2.0
    return a


def _quat_linear(b: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Homogeneous matrix whose quadratic form is w^T (R(q) b + t) for unit q"""
    a = np.zeros((QUAT_DIM, QUAT_DIM))
    a[1:5, 1:5] = -sym(omega1(homogenize(w)) @ omega2(homogenize(b)))
    a[0, 5:8] = w / 2.0
    a[5:8, 0] = w / 2.0
    return a


def _backprojection_functionals(y: np.ndarray, r: float, k: np.ndarray) -> List[np.ndarray]:
    """The four w vectors of one infinity-norm keypoint, ordered (+e1, -e1, +e2, -e2)"""
    m = np.outer(np.concatenate([y, [1.0]]), E3) - k
    out = []
    for j in range(2):
        row = m[j]
        out.append(row - r * E3)
        out.append(-row - r * E3)
    return out


def _require_finite(obs: ObservationSet):
    bad = obs.unbounded_keypoints
    if bad:
        raise InputError(f"infinite radius for keypoints {bad}; call drop_unbounded() first")


def build_chirality(obs: ObservationSet, form: Form = Form.ROTMAT) -> List[np.ndarray]:
    """One matrix per keypoint with value -depth_i"""
    build = _rotmat_linear if Form(form) is Form.ROTMAT else _quat_linear
    return [build(b, -E3) for b in obs.keypoints_3d]


def build_backprojection_inf(obs: ObservationSet, form: Form = Form.ROTMAT) -> List[np.ndarray]:
    """Four matrices per keypoint bounding each pixel coordinate of the reprojection error"""
    if obs.norm is not Norm.INFINITY:
        raise InputError("infinity-norm backprojection requires an infinity-norm observation set")
    _require_finite(obs)
    build = _rotmat_linear if Form(form) is Form.ROTMAT else _quat_linear
    k = obs.intrinsics.k
    mats = []
    for b, y, r in zip(obs.keypoints_3d, obs.detections, obs.radii):
        mats.extend(build(b, w) for w in _backprojection_functionals(y, float(r), k))
    return mats


def build_backprojection_2norm(obs: ObservationSet) -> List[np.ndarray]:
    """
    One matrix per keypoint: ||(y e3^T - K)(Rb + t)||^2 - (r e3^T (Rb + t))^2 <= 0

    Only the first two rows of y e3^T - K enter the norm (the third row is zero).
    """
    if obs.norm is not Norm.TWO:
        raise InputError("2-norm backprojection requires a 2-norm observation set")
    _require_finite(obs)
    k = obs.intrinsics.k
    mats = []
    for b, y, r in zip(obs.keypoints_3d, obs.detections, obs.radii):
        m = (np.outer(np.concatenate([y, [1.0]]), E3) - k)[:2]
        jac = point_jacobian(b)
        a = np.zeros((ROTMAT_DIM, ROTMAT_DIM))
        a[1:, 1:] = jac.T @ (m.T @ m - (float(r) ** 2) * np.outer(E3, E3)) @ jac
        mats.append(sym(a))
    return mats


def _linear_functionals(obs: ObservationSet) -> List[List[np.ndarray]]:
    """Per keypoint, unit vectors l over [vec(R), t] of its linear constraints l^T z <= 0"""
    k = obs.intrinsics.k
    out = []
    for b, y, r in zip(obs.keypoints_3d, obs.detections, obs.radii):
        ws = [-E3]
        if obs.norm is Norm.INFINITY:
            ws += _backprojection_functionals(y, float(r), k)
        jac = point_jacobian(b)
        ells = [jac.T @ w for w in ws]
        out.append([ell / np.linalg.norm(ell) for ell in ells])
    return out


def build_product_cuts(obs: ObservationSet, pairs: str = "keypoint") -> List[np.ndarray]:
    """
    Redundant inequalities -l_a(z) l_b(z) <= 0 over x = [1, vec(R), t]

    Both factors are nonpositive on the set, so every product holds there. For infinity-norm
    radii they are the only constraints with a translation-translation block, which a
    first-order certificate needs to bound translation.

    Args:
        obs: observation set with finite radii
        pairs: 'keypoint' pairs the linear constraints of each keypoint, 'all' pairs every
            linear constraint with every other, 'none' builds nothing

    Returns:
        List of 13x13 matrices
    """
    if pairs not in PRODUCT_PAIRS:
        raise InputError(f"product cut pairs must be one of {PRODUCT_PAIRS}, got '{pairs}'")
    if pairs == "none":
        return []
    _require_finite(obs)
    groups = _linear_functionals(obs)
    if pairs == "all":
        groups = [[ell for group in groups for ell in group]]

    mats = []
    for group in groups:
        for a in range(len(group)):
            for b in range(a + 1, len(group)):
                m = np.zeros((ROTMAT_DIM, ROTMAT_DIM))
                m[1:, 1:] = -sym(np.outer(group[a], group[b]))
                mats.append(m)
    return mats


def add_product_cuts(constraint_set: QuadraticConstraintSet, obs: ObservationSet,
                     pairs: Optional[str] = None) -> QuadraticConstraintSet:
    """Append build_product_cuts (config constraints.product_cuts) to a rotation-matrix set"""
    if constraint_set.form is not Form.ROTMAT:
        raise InputError("product cuts apply to the rotation-matrix form only")
    pairs = pairs or str(config.get("constraints.product_cuts", "keypoint"))
    cuts = build_product_cuts(obs, pairs)
    if not cuts:
        return constraint_set
    return replace(
        constraint_set,
        inequalities=constraint_set.inequalities + tuple(cuts),
        inequality_labels=constraint_set.inequality_labels + (Label.PRODUCT,) * len(cuts),
    )


def build_rotmat_set(obs: ObservationSet) -> QuadraticConstraintSet:
    """
    Pose uncertainty set over x = [1, vec(R), t]

    Args:
        obs: observation set with finite radii

    Returns:
        QuadraticConstraintSet with N chirality + 4N (or N) backprojection inequalities
        and 15 SO(3) equalities
    """
    _require_finite(obs)
    chirality = build_chirality(obs, Form.ROTMAT)
    if obs.norm is Norm.INFINITY:
        bp = build_backprojection_inf(obs, Form.ROTMAT)
        bp_label = Label.BACKPROJECTION
    else:
        bp = build_backprojection_2norm(obs)
        bp_label = Label.BP2

    return QuadraticConstraintSet(
        dim=ROTMAT_DIM,
        inequalities=tuple(chirality + bp),
        equalities=tuple(build_so3_equalities()),
        inequality_labels=(Label.CHIRALITY,) * len(chirality) + (bp_label,) * len(bp),
        equality_labels=(Label.SO3,) * 15,
        form=Form.ROTMAT,
        likely_unbounded=_likely_unbounded(obs),
    )


def build_quaternion_set(obs: ObservationSet, pose_estimate: Pose) -> QuadraticConstraintSet:
    """
    Pose uncertainty set over x = [1, q, t]

    Args:
        obs: infinity-norm observation set with finite radii
        pose_estimate: supplies the reference quaternion for the hemisphere constraint

    Returns:
        QuadraticConstraintSet with 5N + 1 inequalities and the unit-norm equality
    """
    if obs.norm is not Norm.INFINITY:
        raise InputError("the quaternion form supports infinity-norm radii only")
    _require_finite(obs)
    q_ref = rotation_to_quat(pose_estimate.rotation).q

    chirality = build_chirality(obs, Form.QUAT)
    bp = build_backprojection_inf(obs, Form.QUAT)

    hemisphere = np.zeros((QUAT_DIM, QUAT_DIM))
    hemisphere[0, 1:5] = -q_ref / 2.0
    hemisphere[1:5, 0] = -q_ref / 2.0

    unit = np.diag([-1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0])

    return QuadraticConstraintSet(
        dim=QUAT_DIM,
        inequalities=tuple(chirality + bp + [hemisphere]),
        equalities=(unit,),
        inequality_labels=((Label.CHIRALITY,) * len(chirality)
                           + (Label.BACKPROJECTION,) * len(bp)
                           + (Label.HEMISPHERE,)),
        equality_labels=(Label.UNIT_QUAT,),
        form=Form.QUAT,
        likely_unbounded=_likely_unbounded(obs),
        reference_quaternion=q_ref,
    )


def build_constraint_set(obs: ObservationSet, form: Form,
                         pose_estimate: Optional[Pose] = None,
                         drop_unbounded: bool = True) -> QuadraticConstraintSet:
    """
    Build the set in the requested form, dropping infinite-radius keypoints first

    Args:
        obs: observation set
        form: 'rotmat' or 'quat'
        pose_estimate: required for the quaternion form
        drop_unbounded: drop keypoints with infinite radius (with a warning) instead of failing

    Returns:
        QuadraticConstraintSet carrying the dropped keypoint ids; the rotation-matrix form
        also carries the product cuts
    """
    dropped: List[int] = []
    if drop_unbounded:
        obs, dropped = obs.drop_unbounded()
    form = Form(form)
    if form is Form.ROTMAT:
        built = add_product_cuts(build_rotmat_set(obs), obs)
    elif form is Form.QUAT:
        if pose_estimate is None:
            raise InputError("the quaternion form needs a pose estimate for its hemisphere constraint")
        built = build_quaternion_set(obs, pose_estimate)
    else:
        raise InputError(f"cannot build a pose constraint set in form '{form}'")
    if dropped:
        built = replace(built, dropped_keypoints=tuple(dropped))
    return built


def _likely_unbounded(obs: ObservationSet) -> bool:
    if obs.n < 3:
        logger.warning(f"Only {obs.n} keypoints: the pose set is likely unbounded")
        return True
    return False
