"""
Translation and axis-angle marginals of joint pose ellipsoids
"""
from src.projection.marginals import (
    AngleRepresentation,
    AngularBound,
    ProjectionReport,
    TranslationBound,
    angular_axes_deg,
    bound_volumes,
    image_shape,
    project_axis_angle_quat,
    project_axis_angle_rotmat,
    project_joint,
    project_rotation_block,
    project_translation,
    skew_projection,
    translation_volume,
)
from src.projection.sampling import (
    boundary_poses,
    ellipse_outline,
    ellipse_slices,
    inverse_sqrt,
    sample_ellipsoid_boundary,
)

__all__ = [
    "AngleRepresentation",
    "AngularBound",
    "ProjectionReport",
    "TranslationBound",
    "angular_axes_deg",
    "boundary_poses",
    "bound_volumes",
    "ellipse_outline",
    "ellipse_slices",
    "image_shape",
    "inverse_sqrt",
    "project_axis_angle_quat",
    "project_axis_angle_rotmat",
    "project_joint",
    "project_rotation_block",
    "project_translation",
    "sample_ellipsoid_boundary",
    "skew_projection",
    "translation_volume",
]
