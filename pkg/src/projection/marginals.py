"""
Translation and axis-angle marginals of a joint pose ellipsoid, and their volumes
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from src.geometry import Rotation, UnitQuaternion, omega2, quat_to_rotation, rotation_to_quat
from src.geometry.rotations import SKEW_PAIRS
from src.sos import EllipsoidBound, EllipsoidFrame
from src.utils.config_loader import get_config
from src.utils.errors import DegenerateBoundError, InputError
from src.utils.logger import get_logger

logger = get_logger(__name__)
config = get_config()

UNIT_BALL_VOLUME = 4.0 * np.pi / 3.0
MAX_AXIS_DEG = 90.0

ROTATION_INDICES = {
    EllipsoidFrame.ROTMAT_TRANSLATION: tuple(range(0, 9)),
    EllipsoidFrame.QUAT_TRANSLATION: tuple(range(0, 4)),
}
TRANSLATION_INDICES = {
    EllipsoidFrame.ROTMAT_TRANSLATION: (9, 10, 11),
    EllipsoidFrame.QUAT_TRANSLATION: (4, 5, 6),
}


class AngleRepresentation(str, Enum):
    SIN_THETA = "sin_theta"
    SIN_HALF_THETA = "sin_half_theta"


@dataclass(frozen=True)
class TranslationBound:
    """{t : (t - center)^T h_t (t - center) <= 1}, h_t in 1/m^2"""
    h_t: np.ndarray
    center: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h_t", np.asarray(self.h_t, dtype=float))
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(-1))

    def value(self, t: np.ndarray) -> float:
        d = np.asarray(t, dtype=float) - self.center
        return float(d @ self.h_t @ d)

    def contains(self, t: np.ndarray, slack: float = 1e-8) -> bool:
        return self.value(t) <= 1.0 + slack


@dataclass(frozen=True)
class AngularBound:
    """
    {u : u^T h_theta u <= 1} for u = axis * sin(angle) (sin_theta) or axis * sin(angle / 2)
    (sin_half_theta), where R = R_axis(angle) @ center_rotation
    """
    h_theta: np.ndarray
    representation: AngleRepresentation
    center_rotation: Rotation = field(default_factory=Rotation.identity)

    def __post_init__(self):
        object.__setattr__(self, "h_theta", np.asarray(self.h_theta, dtype=float))
        object.__setattr__(self, "representation", AngleRepresentation(self.representation))

    def coordinates(self, rotation: Rotation) -> np.ndarray:
        """Axis-angle coordinates of a rotation relative to the center rotation"""
        delta = rotation.m @ self.center_rotation.m.T
        if self.representation is AngleRepresentation.SIN_THETA:
            v = Rotation(delta).vec
            return 0.5 * np.array([v[i] - v[j] for i, j in SKEW_PAIRS])
        q = rotation_to_quat(Rotation(delta))
        return q.q[1:]

    def value(self, rotation: Rotation) -> float:
        u = self.coordinates(rotation)
        return float(u @ self.h_theta @ u)

    def contains(self, rotation: Rotation, slack: float = 1e-8) -> bool:
        return self.value(rotation) <= 1.0 + slack


@dataclass
class ProjectionReport:
    translation: TranslationBound
    angular: AngularBound
    volumes: Dict[str, float]


def skew_projection() -> np.ndarray:
    """P with P @ vec(R) == vee(R - R^T)"""
    p = np.zeros((3, 9))
    for row, (i, j) in enumerate(SKEW_PAIRS):
        p[row, i] = 1.0
        p[row, j] = -1.0
    return p


def _selector(indices, d: int) -> np.ndarray:
    s = np.zeros((len(indices), d))
    s[np.arange(len(indices)), list(indices)] = 1.0
    return s


def image_shape(h: np.ndarray, linear_map: np.ndarray, eig_floor: Optional[float] = None) -> np.ndarray:
    """
    Shape matrix of {L z : z^T h z <= 1}, i.e. (L h^+ L^T)^-1

    A singular h is a cylinder; its image stays bounded only when L annihilates the
    null space of h. Otherwise DegenerateBoundError names the offending output axes.

    Args:
        h: d x d PSD shape matrix
        linear_map: k x d matrix L
        eig_floor: relative eigenvalue floor (config projection.eig_floor)

    Returns:
        k x k PSD matrix
    """
    floor = config.get_float("projection.eig_floor", 1e-12) if eig_floor is None else eig_floor
    h = 0.5 * (np.asarray(h, dtype=float) + np.asarray(h, dtype=float).T)
    lmap = np.asarray(linear_map, dtype=float)
    w, v = np.linalg.eigh(h)
    if w.size and w.min() < -floor * max(1.0, float(np.abs(w).max())):
        raise InputError(f"shape matrix is not PSD (min eigenvalue {w.min():.3e})")
    cutoff = floor * max(1.0, float(w.max()) if w.size else 1.0)
    keep = w > cutoff

    null = v[:, ~keep]
    if null.size:
        leak = np.linalg.norm(lmap @ null, axis=1)
        bad = [int(i) for i in np.nonzero(leak > np.sqrt(floor))[0]]
        if bad:
            raise DegenerateBoundError(bad)

    vk = v[:, keep]
    inverse = (vk / w[keep]) @ vk.T
    cov = lmap @ inverse @ lmap.T
    cw, cv = np.linalg.eigh(0.5 * (cov + cov.T))
    flat = cw <= floor * max(1.0, float(cw.max()))
    if np.any(flat):
        bad = [int(i) for i in np.nonzero(np.abs(cv[:, flat]).max(axis=1) > 0.3)[0]]
        raise DegenerateBoundError(bad, "projected ellipsoid is flat along some axes")
    shape = (cv / cw) @ cv.T
    return 0.5 * (shape + shape.T)


def _frame(joint: EllipsoidBound) -> EllipsoidFrame:
    return EllipsoidFrame(joint.frame)


def project_translation(joint: EllipsoidBound) -> TranslationBound:
    """
    Orthogonal projection onto the translation coordinates: h_t = (P_t H^-1 P_t^T)^-1

    Generic-frame bounds use their last three coordinates.
    """
    indices = TRANSLATION_INDICES.get(_frame(joint), tuple(range(joint.dim - 3, joint.dim)))
    p_t = _selector(indices, joint.dim)
    h_t = image_shape(joint.h, p_t)
    return TranslationBound(h_t=h_t, center=joint.center[list(indices)].copy())


def project_rotation_block(joint: EllipsoidBound) -> np.ndarray:
    """H_r = (P_r H^-1 P_r^T)^-1 over vec(R) or q"""
    frame = _frame(joint)
    if frame not in ROTATION_INDICES:
        raise InputError(f"bound in frame '{frame.value}' has no rotation block")
    return image_shape(joint.h, _selector(ROTATION_INDICES[frame], joint.dim))


def project_axis_angle_rotmat(joint: EllipsoidBound, center_rotation: Rotation) -> AngularBound:
    """
    Axis-angle marginal in axis * sin(angle) coordinates for a rotation-matrix frame bound

    With K = (R_c^T kron I3), vec(R) - vec(R_c) = K (vec(R_w) - vec(I)) and
    P_theta vec(R_w) = 2 sin(angle) axis, so
    h_theta = 4 (P_theta [K^T H_r K]^-1 P_theta^T)^-1. Sound for angles up to 90 degrees.

    Args:
        joint: bound in the rotmat_translation frame
        center_rotation: R_c, usually the pose estimate's rotation

    Returns:
        AngularBound with sin_theta representation
    """
    if _frame(joint) is not EllipsoidFrame.ROTMAT_TRANSLATION:
        raise InputError("project_axis_angle_rotmat needs a rotmat_translation bound")
    k = np.kron(center_rotation.m.T, np.eye(3))
    p_r = _selector(ROTATION_INDICES[EllipsoidFrame.ROTMAT_TRANSLATION], joint.dim)
    linear_map = skew_projection() @ k.T @ p_r
    h_theta = 4.0 * image_shape(joint.h, linear_map)
    return AngularBound(h_theta=h_theta, representation=AngleRepresentation.SIN_THETA,
                        center_rotation=center_rotation)


def project_axis_angle_quat(joint: EllipsoidBound, center_quat: UnitQuaternion) -> AngularBound:
    """
    Axis-angle marginal in axis * sin(angle / 2) coordinates for a quaternion frame bound

    q = q_w * q_c = Omega2(q_c) q_w, so the vector part of Omega2(q_c)^T (q - q_c) is
    axis * sin(angle / 2): h_theta = (P_theta [Omega2(q_c)^T H_q Omega2(q_c)]^-1 P_theta^T)^-1.
    """
    if _frame(joint) is not EllipsoidFrame.QUAT_TRANSLATION:
        raise InputError("project_axis_angle_quat needs a quat_translation bound")
    if not isinstance(center_quat, UnitQuaternion):
        center_quat = UnitQuaternion(center_quat)
    p_q = _selector(ROTATION_INDICES[EllipsoidFrame.QUAT_TRANSLATION], joint.dim)
    linear_map = _selector((1, 2, 3), 4) @ omega2(center_quat.q).T @ p_q
    h_theta = image_shape(joint.h, linear_map)
    return AngularBound(h_theta=h_theta, representation=AngleRepresentation.SIN_HALF_THETA,
                        center_rotation=quat_to_rotation(center_quat))


def _check_psd(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise InputError(f"{name} must be 3x3, got {m.shape}")
    w = np.linalg.eigvalsh(0.5 * (m + m.T))
    if w.min() < -1e-9 * max(1.0, float(np.abs(w).max())):
        raise InputError(f"{name} is not PSD (min eigenvalue {w.min():.3e})")
    return w


def angular_axes_deg(a: AngularBound) -> np.ndarray:
    """Principal semi-axes in degrees, clipped at 90"""
    w = _check_psd(a.h_theta, "h_theta")
    with np.errstate(divide="ignore"):
        lengths = np.where(w > 0, 1.0 / np.sqrt(np.clip(w, 1e-300, None)), np.inf)
    s = np.minimum(1.0, lengths)
    angles = np.degrees(np.arcsin(s))
    if AngleRepresentation(a.representation) is AngleRepresentation.SIN_HALF_THETA:
        angles = 2.0 * angles
    return np.minimum(MAX_AXIS_DEG, angles)


def bound_volumes(t: TranslationBound, a: AngularBound) -> Tuple[float, float]:
    """
    Ellipsoid volumes of the marginals

    Args:
        t: translation bound
        a: angular bound

    Returns:
        (translation volume in m^3, angular volume in deg^3)
    """
    v_ang = UNIT_BALL_VOLUME * float(np.prod(angular_axes_deg(a)))
    return translation_volume(t.h_t), v_ang


def project_joint(joint: EllipsoidBound, center_rotation: Rotation,
                  reference_quaternion: Optional[np.ndarray] = None) -> ProjectionReport:
    """
    Translation and angular marginals plus volumes for a joint bound in either frame

    Args:
        joint: joint bound
        center_rotation: rotation of the pose estimate
        reference_quaternion: the ellipsoid's quaternion center sign (quat frame only)

    Returns:
        ProjectionReport
    """
    translation = project_translation(joint)
    if _frame(joint) is EllipsoidFrame.QUAT_TRANSLATION:
        q_c = reference_quaternion if reference_quaternion is not None else joint.center[:4]
        angular = project_axis_angle_quat(joint, UnitQuaternion.normalized(q_c))
    else:
        angular = project_axis_angle_rotmat(joint, center_rotation)
    v_t, v_ang = bound_volumes(translation, angular)
    logger.debug(f"Projected volumes: translation {v_t:.3e} m^3, angular {v_ang:.3e} deg^3")
    return ProjectionReport(translation=translation, angular=angular,
                            volumes={"translation_m3": v_t, "angular_deg3": v_ang})


def translation_volume(h_t: np.ndarray) -> float:
    w = _check_psd(h_t, "h_t")
    det = float(np.prod(w))
    return float(UNIT_BALL_VOLUME / np.sqrt(det)) if det > 0 else float("inf")

