"""
Rotations, quaternion algebra and camera projection
"""
from src.geometry.camera import CameraIntrinsics, Pose, project_keypoint, project_points
from src.geometry.linalg import kron_vec_operator, psd_clip, skew, sym, unvec, vec
from src.geometry.rotations import (
    Rotation,
    UnitQuaternion,
    axis_angle_skew_part,
    homogenize,
    omega1,
    omega2,
    project_to_so3,
    quat_conjugate,
    quat_from_axis_angle,
    quat_multiply,
    quat_product_matrices,
    quat_to_rotation,
    random_rotation,
    random_unit_vector,
    rotation_from_axis_angle,
    rotation_to_quat,
)

__all__ = [
    "CameraIntrinsics",
    "Pose",
    "Rotation",
    "UnitQuaternion",
    "axis_angle_skew_part",
    "homogenize",
    "kron_vec_operator",
    "omega1",
    "omega2",
    "project_keypoint",
    "project_points",
    "project_to_so3",
    "psd_clip",
    "quat_conjugate",
    "quat_from_axis_angle",
    "quat_multiply",
    "quat_product_matrices",
    "quat_to_rotation",
    "random_rotation",
    "random_unit_vector",
    "rotation_from_axis_angle",
    "rotation_to_quat",
    "skew",
    "sym",
    "unvec",
    "vec",
]
