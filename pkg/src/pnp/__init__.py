"""
Default pose-estimate provider
"""
from src.pnp.estimator import (
    PnpProblem,
    PnpResult,
    depth_forms,
    dlt_initializer,
    keypoint_depths,
    pnp_estimate,
    pnp_objective,
    reduced_cost,
    refine_pose,
    solve_translation_given_rotation,
)

__all__ = [
    "PnpProblem",
    "PnpResult",
    "depth_forms",
    "dlt_initializer",
    "keypoint_depths",
    "pnp_estimate",
    "pnp_objective",
    "reduced_cost",
    "refine_pose",
    "solve_translation_given_rotation",
]
