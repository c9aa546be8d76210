"""
Shared fixtures: seeded generators, intrinsics and synthetic scenes
"""
import os

import numpy as np
import pytest

os.environ.setdefault("SLUE_LOG_DIR", os.path.join(os.path.dirname(__file__), "..", "logs", "tests"))

from src.geometry import CameraIntrinsics  # noqa: E402
from src.harness import SceneConfig, generate_scene  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def intrinsics():
    return CameraIntrinsics.from_params(500.0, 500.0, 320.0, 240.0)


@pytest.fixture
def scene_config(intrinsics):
    return SceneConfig(
        n_keypoints=8,
        object_scale=0.1,
        t_xy_range=0.05,
        depth_range=(0.5, 1.0),
        noise_scale=4.0,
        radius_range=(2.0, 8.0),
        intrinsics=intrinsics,
        seed=7,
    )


@pytest.fixture
def noiseless_config(scene_config):
    return scene_config.with_overrides(noise_scale=0.0, radius_range=None)


@pytest.fixture
def scene(scene_config):
    return generate_scene(scene_config, frame=0)


@pytest.fixture
def noiseless_scene(noiseless_config):
    return generate_scene(noiseless_config, frame=0)
