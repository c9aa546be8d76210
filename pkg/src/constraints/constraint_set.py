"""
Homogeneous quadratic constraint sets and pose vector layouts.

Rotation-matrix form: x = [1, vec(R), t] (13 entries).
Quaternion form:      x = [1, q, t]      (8 entries).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from src.geometry import Pose, UnitQuaternion, project_to_so3, quat_to_rotation, rotation_to_quat, unvec
from src.utils.config_loader import get_config
from src.utils.errors import InputError

config = get_config()

ROTMAT_DIM = 13
QUAT_DIM = 8


class Form(str, Enum):
    ROTMAT = "rotmat"
    QUAT = "quat"
    GENERIC = "generic"


class Label(str, Enum):
    CHIRALITY = "chirality"
    BACKPROJECTION = "backprojection"
    SO3 = "so3"
    UNIT_QUAT = "unit_quat"
    HEMISPHERE = "hemisphere"
    BP2 = "bp2"
    PRODUCT = "product"
    GENERIC = "generic"


@dataclass(frozen=True)
class QuadraticConstraintSet:
    """
    {x : x[h] = 1, x^T A_i x <= 0, x^T Q_j x = 0}

    Matrices are symmetric and the set is immutable once built.
    """
    dim: int
    inequalities: Tuple[np.ndarray, ...]
    equalities: Tuple[np.ndarray, ...] = ()
    inequality_labels: Tuple[Label, ...] = ()
    equality_labels: Tuple[Label, ...] = ()
    homogenization: int = 0
    form: Form = Form.GENERIC
    likely_unbounded: bool = False
    reference_quaternion: Optional[np.ndarray] = None
    dropped_keypoints: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        ineq = tuple(self._check(a) for a in self.inequalities)
        eq = tuple(self._check(q) for q in self.equalities)
        ineq_labels = tuple(self.inequality_labels) or (Label.GENERIC,) * len(ineq)
        eq_labels = tuple(self.equality_labels) or (Label.GENERIC,) * len(eq)
        if len(ineq_labels) != len(ineq) or len(eq_labels) != len(eq):
            raise InputError("one label is required per constraint matrix")
        if not 0 <= self.homogenization < self.dim:
            raise InputError(f"homogenization index {self.homogenization} out of range")
        object.__setattr__(self, "inequalities", ineq)
        object.__setattr__(self, "equalities", eq)
        object.__setattr__(self, "inequality_labels", ineq_labels)
        object.__setattr__(self, "equality_labels", eq_labels)
        object.__setattr__(self, "form", Form(self.form))

    def _check(self, m: np.ndarray) -> np.ndarray:
        m = np.asarray(m, dtype=float)
        if m.shape != (self.dim, self.dim):
            raise InputError(f"constraint matrix must be {self.dim}x{self.dim}, got {m.shape}")
        return 0.5 * (m + m.T)

    @property
    def n_inequalities(self) -> int:
        return len(self.inequalities)

    @property
    def n_equalities(self) -> int:
        return len(self.equalities)

    def evaluate(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Raw values x^T A_i x and x^T Q_j x"""
        x = np.asarray(x, dtype=float)
        ineq = np.array([x @ a @ x for a in self.inequalities])
        eq = np.array([x @ q @ x for q in self.equalities])
        return ineq, eq

    def evaluate_batch(self, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Values for each row of a B x dim array; returns (B x n_ineq, B x n_eq)"""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        ineq = np.einsum("bi,mij,bj->bm", xs, np.array(self.inequalities).reshape(-1, self.dim, self.dim), xs)
        eq = np.einsum("bi,mij,bj->bm", xs, np.array(self.equalities).reshape(-1, self.dim, self.dim), xs)
        return ineq, eq

    def members(self, xs: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
        """Boolean membership mask for each row of a B x dim array"""
        if tol is None:
            tol = config.get_float("constraints.membership_tol", 1e-8)
        ineq, eq = self.evaluate_batch(xs)
        return np.all(ineq <= tol, axis=1) & np.all(np.abs(eq) <= tol, axis=1)

    def normalized(self) -> "QuadraticConstraintSet":
        """Copy with every matrix scaled to unit Frobenius norm (same feasible set)"""
        def _unit(m: np.ndarray) -> np.ndarray:
            n = np.linalg.norm(m)
            return m / n if n > 0 else m

        return replace(
            self,
            inequalities=tuple(_unit(a) for a in self.inequalities),
            equalities=tuple(_unit(q) for q in self.equalities),
        )

    def restricted(self, keep_inequalities: List[int]) -> "QuadraticConstraintSet":
        return replace(
            self,
            inequalities=tuple(self.inequalities[i] for i in keep_inequalities),
            inequality_labels=tuple(self.inequality_labels[i] for i in keep_inequalities),
        )


def check_membership(constraint_set: QuadraticConstraintSet, x: np.ndarray,
                     tol: Optional[float] = None) -> Tuple[bool, np.ndarray]:
    """
    Test whether a homogeneous point satisfies every constraint

    Args:
        constraint_set: constraint set
        x: dim-vector with x[homogenization] == 1
        tol: slack on inequalities and equalities (config constraints.membership_tol)

    Returns:
        (member, margins) where margins are inequality values followed by equality values
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != constraint_set.dim:
        raise InputError(f"point has {x.shape[0]} entries, set dimension is {constraint_set.dim}")
    if abs(x[constraint_set.homogenization] - 1.0) > 1e-12:
        raise InputError("homogenizing coordinate must equal 1")
    if tol is None:
        tol = config.get_float("constraints.membership_tol", 1e-8)

    ineq, eq = constraint_set.evaluate(x)
    member = bool(np.all(ineq <= tol) and np.all(np.abs(eq) <= tol))
    return member, np.concatenate([ineq, eq])


def pose_to_rotmat_vector(pose: Pose) -> np.ndarray:
    return np.concatenate([[1.0], pose.rotation.vec, pose.translation])


def pose_to_quat_vector(pose: Pose, reference: Optional[np.ndarray] = None) -> np.ndarray:
    """[1, q, t] with q on the same hemisphere as the reference quaternion"""
    q = rotation_to_quat(pose.rotation, reference=reference)
    return np.concatenate([[1.0], q.q, pose.translation])


def pose_to_vector(pose: Pose, form: Form, reference: Optional[np.ndarray] = None) -> np.ndarray:
    if Form(form) is Form.ROTMAT:
        return pose_to_rotmat_vector(pose)
    if Form(form) is Form.QUAT:
        return pose_to_quat_vector(pose, reference)
    raise InputError(f"no pose layout for form '{form}'")


def vector_to_pose(x: np.ndarray, form: Form) -> Pose:
    """
    Pose from a homogeneous vector, projecting onto SO(3) / the unit sphere as needed
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    form = Form(form)
    if form is Form.ROTMAT:
        if x.shape[0] != ROTMAT_DIM:
            raise InputError(f"rotation-matrix vector must have {ROTMAT_DIM} entries")
        return Pose(project_to_so3(unvec(x[1:10], 3)), x[10:13])
    if form is Form.QUAT:
        if x.shape[0] != QUAT_DIM:
            raise InputError(f"quaternion vector must have {QUAT_DIM} entries")
        return Pose(quat_to_rotation(UnitQuaternion.normalized(x[1:5])), x[5:8])
    raise InputError(f"no pose layout for form '{form}'")

