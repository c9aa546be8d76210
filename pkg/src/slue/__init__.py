"""
Pose-level front door: ellipsoid bounds around a pose estimate
"""
from src.slue.solver import (
    BLOCKS,
    SlueResult,
    SlueStatus,
    SplitTarget,
    default_form,
    failure_status,
    pose_center,
    pose_in_result,
    slue_batch,
    slue_joint,
    slue_split,
    solve_frame,
)

__all__ = [
    "BLOCKS",
    "SlueResult",
    "SlueStatus",
    "SplitTarget",
    "default_form",
    "failure_status",
    "pose_center",
    "pose_in_result",
    "slue_batch",
    "slue_joint",
    "slue_split",
    "solve_frame",
]
