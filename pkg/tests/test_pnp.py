"""
Tests for the backprojection PnP estimator
"""
import numpy as np
import pytest

from src.geometry import Pose, Rotation, random_rotation, rotation_from_axis_angle
from src.pnp import (
    PnpProblem,
    depth_forms,
    dlt_initializer,
    keypoint_depths,
    pnp_estimate,
    pnp_objective,
    reduced_cost,
    refine_pose,
    solve_translation_given_rotation,
)
from src.harness import generate_scenes
from src.utils.errors import InputError


@pytest.fixture
def noiseless_problem(noiseless_scene):
    return PnpProblem(noiseless_scene.obs, sigmas=np.ones(noiseless_scene.obs.n))


class TestProblem:
    def test_sigmas_default_to_radii(self, scene):
        problem = PnpProblem(scene.obs)
        assert np.allclose(problem.weights, 1.0 / scene.obs.radii)

    def test_zero_radius_needs_sigmas(self, noiseless_scene):
        with pytest.raises(InputError):
            PnpProblem(noiseless_scene.obs)

    def test_sigma_count(self, scene):
        with pytest.raises(InputError):
            PnpProblem(scene.obs, sigmas=np.ones(3))


class TestObjective:
    def test_zero_at_ground_truth(self, noiseless_scene, noiseless_problem):
        assert pnp_objective(noiseless_problem, noiseless_scene.ground_truth) == pytest.approx(0.0, abs=1e-12)

    def test_translation_given_rotation(self, noiseless_scene, noiseless_problem):
        gt = noiseless_scene.ground_truth
        t = solve_translation_given_rotation(noiseless_problem, gt.rotation)
        assert np.allclose(t, gt.translation, atol=1e-9)

    def test_reduced_cost_matches_objective(self, scene, rng):
        problem = PnpProblem(scene.obs)
        cost = reduced_cost(problem)
        for _ in range(5):
            rotation = random_rotation(rng)
            pose = Pose(rotation, solve_translation_given_rotation(problem, rotation))
            x = np.concatenate([[1.0], rotation.vec])
            assert x @ cost @ x == pytest.approx(pnp_objective(problem, pose), rel=1e-8, abs=1e-10)


class TestEstimate:
    def test_noiseless_recovery(self, noiseless_scene, noiseless_problem):
        result = pnp_estimate(noiseless_problem, refine=True)
        gt = noiseless_scene.ground_truth
        assert result.pose.rotation.angle_to(gt.rotation) < 1e-4
        assert np.allclose(result.pose.translation, gt.translation, atol=1e-4)
        assert result.tightness < 1e-5

    def test_unpacks(self, scene):
        pose, tightness = pnp_estimate(PnpProblem(scene.obs))
        assert isinstance(pose, Pose)
        assert tightness >= 0.0

    def test_common_sigma_scale_does_not_move_estimate(self, scene):
        base = pnp_estimate(PnpProblem(scene.obs), refine=True).pose
        scaled = pnp_estimate(PnpProblem(scene.obs, sigmas=3.0 * scene.obs.radii), refine=True).pose
        assert base.rotation.angle_to(scaled.rotation) < 1e-4
        assert np.allclose(base.translation, scaled.translation, atol=1e-4)

    def test_noisy_estimate_is_close(self, scene):
        result = pnp_estimate(PnpProblem(scene.obs))
        assert result.pose.rotation.angle_to(scene.ground_truth.rotation) < 0.2

    def test_needs_three_keypoints(self, scene):
        with pytest.raises(InputError):
            pnp_estimate(PnpProblem(scene.obs.subset([0, 1])))


class TestLocal:
    def test_dlt_noiseless(self, noiseless_scene, noiseless_problem):
        pose = dlt_initializer(noiseless_problem)
        assert pose.rotation.angle_to(noiseless_scene.ground_truth.rotation) < 1e-6

    def test_dlt_falls_back_to_identity(self, noiseless_scene):
        obs = noiseless_scene.obs.subset([0, 1, 2, 3])
        pose = dlt_initializer(PnpProblem(obs, sigmas=np.ones(4)))
        assert np.allclose(pose.rotation.m, np.eye(3))

    def test_refine_from_perturbed(self, noiseless_scene, noiseless_problem):
        gt = noiseless_scene.ground_truth
        delta = rotation_from_axis_angle(np.array([0.0, 0.0, 1.0]), 0.05)
        start = Pose(Rotation(delta.m @ gt.rotation.m), gt.translation + 0.01)
        pose = refine_pose(noiseless_problem, start)
        assert pose.rotation.angle_to(gt.rotation) < 1e-6
        assert np.allclose(pose.translation, gt.translation, atol=1e-6)


class TestDepth:
    def test_depth_forms_track_least_squares_depth(self, scene, rng):
        problem = PnpProblem(scene.obs)
        forms = depth_forms(problem)
        assert len(forms) == scene.obs.n
        ratios = []
        for _ in range(4):
            rotation = random_rotation(rng)
            pose = Pose(rotation, solve_translation_given_rotation(problem, rotation))
            x = np.concatenate([[1.0], rotation.vec])
            values = np.array([x @ g @ x for g in forms])
            ratios.append(values / keypoint_depths(scene.obs, pose))
        ratios = np.array(ratios)
        assert np.all(ratios > 0)
        assert np.allclose(ratios, ratios[0], rtol=1e-6)

    def test_ground_truth_satisfies_depth_forms(self, noiseless_scene, noiseless_problem):
        x = np.concatenate([[1.0], noiseless_scene.ground_truth.rotation.vec])
        assert all(x @ g @ x > 0 for g in depth_forms(noiseless_problem))

    def test_noisy_estimates_are_in_front_of_camera(self, scene_config):
        for scene in generate_scenes(scene_config, 10):
            result = pnp_estimate(PnpProblem(scene.obs))
            assert np.all(keypoint_depths(scene.obs, result.pose) > 0), result.method
            assert result.pose.rotation.angle_to(scene.ground_truth.rotation) < 0.5

    def test_estimate_never_worse_than_ground_truth_when_tight(self, scene_config):
        for scene in generate_scenes(scene_config, 5):
            problem = PnpProblem(scene.obs)
            result = pnp_estimate(problem)
            if result.tightness < 1e-6:
                assert result.objective <= pnp_objective(problem, scene.ground_truth) * (1 + 1e-6) + 1e-9
