"""
Rotation matrices and unit quaternions.

Quaternions are scalar-first, q = (w, x, y, z), and compose with the Hamilton product.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.transform import Rotation as ScipyRotation

from src.geometry.linalg import skew, vec
from src.utils.errors import InputError

ORTHONORMALITY_TOL = 1e-8
UNIT_NORM_TOL = 1e-8

# Indices into vec(R) (column-major) of the entries forming vee(R - R^T)
SKEW_PAIRS = ((5, 7), (6, 2), (1, 3))


@dataclass(frozen=True)
class Rotation:
    """Element of SO(3) stored as a 3x3 direction-cosine matrix"""
    m: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.shape != (3, 3):
            raise InputError(f"rotation must be 3x3, got shape {m.shape}")
        object.__setattr__(self, "m", m)

    @classmethod
    def from_matrix(cls, m: np.ndarray, tol: float = ORTHONORMALITY_TOL) -> "Rotation":
        """
        Validate a raw matrix as a rotation

        Args:
            m: 3x3 matrix
            tol: orthonormality and determinant tolerance

        Returns:
            Rotation
        """
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise InputError(f"rotation must be 3x3, got shape {m.shape}")
        if np.max(np.abs(m.T @ m - np.eye(3))) > tol:
            raise InputError("rotation columns are not orthonormal")
        if abs(np.linalg.det(m) - 1.0) > tol:
            raise InputError("rotation determinant is not +1")
        return cls(m)

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(np.eye(3))

    @property
    def vec(self) -> np.ndarray:
        return vec(self.m)

    def compose(self, other: "Rotation") -> "Rotation":
        return Rotation(self.m @ other.m)

    def angle_to(self, other: "Rotation") -> float:
        """Geodesic distance in radians"""
        c = (np.trace(self.m.T @ other.m) - 1.0) / 2.0
        return float(np.arccos(np.clip(c, -1.0, 1.0)))


@dataclass(frozen=True)
class UnitQuaternion:
    """Scalar-first unit quaternion"""
    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).reshape(-1)
        if q.shape != (4,):
            raise InputError(f"quaternion must have 4 entries, got {q.shape[0]}")
        if abs(np.linalg.norm(q) - 1.0) > UNIT_NORM_TOL:
            raise InputError(f"quaternion is not unit norm (|q| = {np.linalg.norm(q):.6g})")
        object.__setattr__(self, "q", q)

    @classmethod
    def normalized(cls, q: np.ndarray) -> "UnitQuaternion":
        q = np.asarray(q, dtype=float)
        n = np.linalg.norm(q)
        if n == 0:
            raise InputError("cannot normalize the zero quaternion")
        return cls(q / n)

    def __neg__(self) -> "UnitQuaternion":
        return UnitQuaternion(-self.q)


def quat_product_matrices(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Left and right Hamilton product matrices

    Args:
        a: 4-vector (need not be unit)

    Returns:
        (omega1, omega2) with omega1(a) @ b == a * b and omega2(a) @ c == c * a
    """
    a = np.asarray(a, dtype=float).reshape(-1)
    if a.shape != (4,):
        raise InputError(f"quaternion must have 4 entries, got {a.shape[0]}")
    w, x, y, z = a
    omega1 = np.array([
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ])
    omega2 = np.array([
        [w, -x, -y, -z],
        [x, w, z, -y],
        [y, -z, w, x],
        [z, y, -x, w],
    ])
    return omega1, omega2


def omega1(a: np.ndarray) -> np.ndarray:
    return quat_product_matrices(a)[0]


def omega2(a: np.ndarray) -> np.ndarray:
    return quat_product_matrices(a)[1]


def homogenize(x: np.ndarray) -> np.ndarray:
    """Embed a 3-vector as the pure quaternion (0, x)"""
    return np.concatenate([[0.0], np.asarray(x, dtype=float).reshape(3)])


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product a * b"""
    return omega1(a) @ np.asarray(b, dtype=float)


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.concatenate([q[:1], -q[1:]])


def _unit_axis(axis: np.ndarray) -> np.ndarray:
    axis = np.asarray(axis, dtype=float).reshape(-1)
    if axis.shape != (3,):
        raise InputError(f"axis must be a 3-vector, got {axis.shape[0]} entries")
    if abs(np.linalg.norm(axis) - 1.0) > UNIT_NORM_TOL:
        raise InputError(f"axis is not unit norm (|axis| = {np.linalg.norm(axis):.6g})")
    return axis


def rotation_from_axis_angle(axis: np.ndarray, angle: float) -> Rotation:
    """
    Rodrigues' formula I + sin(a) W + (1 - cos(a)) W^2

    Args:
        axis: unit 3-vector
        angle: radians

    Returns:
        Rotation
    """
    w = skew(_unit_axis(axis))
    m = np.eye(3) + np.sin(angle) * w + (1.0 - np.cos(angle)) * (w @ w)
    return Rotation(m)


def quat_from_axis_angle(axis: np.ndarray, angle: float) -> UnitQuaternion:
    axis = _unit_axis(axis)
    q = np.concatenate([[np.cos(angle / 2.0)], np.sin(angle / 2.0) * axis])
    return UnitQuaternion.normalized(q)


def quat_to_rotation(q: UnitQuaternion) -> Rotation:
    """Rotation matrix of a unit quaternion; q and -q map to the same matrix"""
    if not isinstance(q, UnitQuaternion):
        q = UnitQuaternion(q)
    w, x, y, z = q.q
    m = np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])
    return Rotation(m)


def rotation_to_quat(rotation: Rotation, reference: Optional[np.ndarray] = None) -> UnitQuaternion:
    """
    Quaternion of a rotation matrix

    Args:
        rotation: Rotation
        reference: if given, the sign is chosen so that q . reference >= 0;
            otherwise the scalar part is made non-negative

    Returns:
        UnitQuaternion
    """
    xyzw = ScipyRotation.from_matrix(rotation.m).as_quat()
    q = np.concatenate([xyzw[3:], xyzw[:3]])
    ref = np.array([1.0, 0.0, 0.0, 0.0]) if reference is None else np.asarray(reference, dtype=float)
    if float(q @ ref) < 0:
        q = -q
    return UnitQuaternion.normalized(q)


def axis_angle_skew_part(rotation: Rotation) -> np.ndarray:
    """vee(R - R^T), equal to 2 sin(theta) * axis"""
    v = rotation.vec
    return np.array([v[i] - v[j] for i, j in SKEW_PAIRS])


def project_to_so3(m: np.ndarray) -> Rotation:
    """Closest rotation in Frobenius norm (orthogonal polar factor with det +1)"""
    u, _, vt = np.linalg.svd(np.asarray(m, dtype=float))
    d = np.sign(np.linalg.det(u @ vt)) or 1.0
    return Rotation(u @ np.diag([1.0, 1.0, d]) @ vt)


def random_rotation(rng: np.random.Generator) -> Rotation:
    """Uniformly distributed rotation"""
    return Rotation(ScipyRotation.random(random_state=rng).as_matrix())


def random_unit_vector(rng: np.random.Generator, dim: int = 3) -> np.ndarray:
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)
