"""
Synthetic scenes, feasible-pose sampling, coverage evaluation and benchmarks
"""
from src.harness.bench import run_benchmark
from src.harness.coverage import CoverageReport, PoseSource, evaluate_coverage
from src.harness.sampler import SampleBatch, rejection_sample, sample_feasible_poses
from src.harness.scenes import (
    NoiseCorrelation,
    NoiseModel,
    Scene,
    SceneConfig,
    calibration_records_from_scenes,
    frame_rng,
    generate_scene,
    generate_scenes,
    object_model,
)
from src.harness.toy2d import (
    Toy2dReport,
    ToyOrderResult,
    default_toy_constraints,
    disk_constraint,
    feasible_grid,
    toy2d,
)

__all__ = [
    "CoverageReport",
    "NoiseCorrelation",
    "NoiseModel",
    "PoseSource",
    "SampleBatch",
    "Scene",
    "SceneConfig",
    "Toy2dReport",
    "ToyOrderResult",
    "calibration_records_from_scenes",
    "default_toy_constraints",
    "disk_constraint",
    "evaluate_coverage",
    "feasible_grid",
    "frame_rng",
    "generate_scene",
    "generate_scenes",
    "object_model",
    "rejection_sample",
    "run_benchmark",
    "sample_feasible_poses",
    "toy2d",
]
