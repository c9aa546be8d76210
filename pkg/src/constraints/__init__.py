"""
Quadratic constraint sets describing the poses consistent with keypoint bounds
"""
from src.constraints.builders import (
    PRODUCT_PAIRS,
    add_product_cuts,
    build_backprojection_2norm,
    build_backprojection_inf,
    build_chirality,
    build_constraint_set,
    build_product_cuts,
    build_quaternion_set,
    build_rotmat_set,
    build_so3_equalities,
    point_jacobian,
)
from src.constraints.constraint_set import (
    QUAT_DIM,
    ROTMAT_DIM,
    Form,
    Label,
    QuadraticConstraintSet,
    check_membership,
    pose_to_quat_vector,
    pose_to_rotmat_vector,
    pose_to_vector,
    vector_to_pose,
)
from src.constraints.observations import ObservationSet, observations_from_bounds

__all__ = [
    "QUAT_DIM",
    "ROTMAT_DIM",
    "Form",
    "Label",
    "PRODUCT_PAIRS",
    "ObservationSet",
    "QuadraticConstraintSet",
    "add_product_cuts",
    "build_backprojection_2norm",
    "build_backprojection_inf",
    "build_chirality",
    "build_constraint_set",
    "build_product_cuts",
    "build_quaternion_set",
    "build_rotmat_set",
    "build_so3_equalities",
    "check_membership",
    "observations_from_bounds",
    "point_jacobian",
    "pose_to_quat_vector",
    "pose_to_rotmat_vector",
    "pose_to_vector",
    "vector_to_pose",
]
