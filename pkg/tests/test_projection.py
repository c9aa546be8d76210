"""
Tests for translation/angular marginals, volumes and boundary sampling
"""
import numpy as np
import pytest

from src.geometry import Rotation, omega2, random_rotation, random_unit_vector, rotation_from_axis_angle, rotation_to_quat
from src.projection import (
    AngleRepresentation,
    AngularBound,
    TranslationBound,
    angular_axes_deg,
    bound_volumes,
    boundary_poses,
    ellipse_slices,
    project_axis_angle_quat,
    project_axis_angle_rotmat,
    project_joint,
    project_translation,
    sample_ellipsoid_boundary,
    translation_volume,
)
from src.sos import EllipsoidBound
from src.utils.errors import DegenerateBoundError, InputError


def _rotmat_bound(h, rotation=None, t=None):
    rotation = rotation or Rotation.identity()
    t = np.zeros(3) if t is None else t
    return EllipsoidBound(h=h, center=np.concatenate([rotation.vec, t]), frame="rotmat_translation")


def _random_pd(rng, d):
    a = rng.standard_normal((d, d))
    return a @ a.T + 0.1 * np.eye(d)


class TestTranslation:
    def test_identity(self):
        t = project_translation(_rotmat_bound(np.eye(12), t=np.array([0.1, 0.0, 1.0])))
        assert np.allclose(t.h_t, np.eye(3))
        assert np.allclose(t.center, [0.1, 0.0, 1.0])

    def test_block_diagonal_keeps_block(self, rng):
        c3 = _random_pd(rng, 3)
        h = np.zeros((12, 12))
        h[:9, :9] = _random_pd(rng, 9)
        h[9:, 9:] = c3
        assert np.allclose(project_translation(_rotmat_bound(h)).h_t, c3)

    def test_support_function_matches(self, rng):
        h = _random_pd(rng, 12)
        bound = _rotmat_bound(h, t=np.array([0.0, 0.1, 0.8]))
        t = project_translation(bound)
        h_inv = np.linalg.inv(h)
        for _ in range(20):
            d = random_unit_vector(rng)
            full = np.zeros(12)
            full[9:] = d
            assert np.sqrt(d @ np.linalg.inv(t.h_t) @ d) == pytest.approx(np.sqrt(full @ h_inv @ full), rel=1e-8)

    def test_boundary_samples_project_inside(self, rng):
        bound = _rotmat_bound(_random_pd(rng, 12))
        t = project_translation(bound)
        points = sample_ellipsoid_boundary(bound, 200, rng)
        assert np.allclose(bound.value(points), 1.0)
        assert all(t.contains(p[9:], slack=1e-9) for p in points)

    def test_flat_translation_axis_is_degenerate(self):
        h = np.eye(12)
        h[11, 11] = 0.0
        with pytest.raises(DegenerateBoundError) as err:
            project_translation(_rotmat_bound(h))
        assert 2 in err.value.axes

    def test_generic_frame_uses_last_coordinates(self):
        bound = EllipsoidBound(h=np.diag([1.0, 4.0, 9.0, 16.0]), center=np.zeros(4))
        assert np.allclose(project_translation(bound).h_t, np.diag([4.0, 9.0, 16.0]))


class TestAngular:
    def test_identity_rotmat(self):
        a = project_axis_angle_rotmat(_rotmat_bound(np.eye(12)), Rotation.identity())
        assert a.representation is AngleRepresentation.SIN_THETA
        assert np.allclose(a.h_theta, 2.0 * np.eye(3))

    def test_rotmat_ball_contains_rotations(self, rng):
        center = random_rotation(rng)
        a = project_axis_angle_rotmat(_rotmat_bound(4.0 * np.eye(12), center), center)
        assert np.allclose(a.h_theta, 8.0 * np.eye(3))
        max_angle = 2.0 * np.arcsin(0.5 / np.sqrt(8.0))
        for _ in range(100):
            delta = rotation_from_axis_angle(random_unit_vector(rng), rng.uniform(0.0, max_angle))
            rotation = Rotation(delta.m @ center.m)
            assert np.linalg.norm(rotation.vec - center.vec) <= 0.5 + 1e-12
            assert a.contains(rotation, slack=1e-9)

    def test_quaternion_explicit_formula(self, rng):
        q_c = rotation_to_quat(random_rotation(rng))
        h = _random_pd(rng, 7)
        bound = EllipsoidBound(h=h, center=np.concatenate([q_c.q, [0.0, 0.0, 1.0]]), frame="quat_translation")
        a = project_axis_angle_quat(bound, q_c)
        h_q = np.linalg.inv(np.linalg.inv(h)[:4, :4])
        m = omega2(q_c.q).T @ np.linalg.inv(h_q) @ omega2(q_c.q)
        assert np.allclose(a.h_theta, np.linalg.inv(m[1:, 1:]))
        assert a.representation is AngleRepresentation.SIN_HALF_THETA
        assert a.value(a.center_rotation) == pytest.approx(0.0, abs=1e-12)

    def test_quaternion_ball_contains_rotations(self, rng):
        center = random_rotation(rng)
        q_c = rotation_to_quat(center)
        bound = EllipsoidBound(h=4.0 * np.eye(7), center=np.concatenate([q_c.q, np.zeros(3)]),
                               frame="quat_translation")
        report = project_joint(bound, center, reference_quaternion=q_c.q)
        assert np.allclose(report.angular.h_theta, 4.0 * np.eye(3))
        max_angle = 4.0 * np.arcsin(0.25)
        for _ in range(100):
            delta = rotation_from_axis_angle(random_unit_vector(rng), rng.uniform(0.0, max_angle))
            assert report.angular.contains(Rotation(delta.m @ center.m), slack=1e-9)

    def test_rotmat_joint_needs_rotmat_frame(self):
        bound = EllipsoidBound(h=np.eye(7), center=np.zeros(7), frame="quat_translation")
        with pytest.raises(InputError):
            project_axis_angle_rotmat(bound, Rotation.identity())


class TestVolumes:
    def test_unit_ball(self):
        assert translation_volume(np.eye(3)) == pytest.approx(4.0 * np.pi / 3.0)

    def test_half_radius(self):
        assert translation_volume(4.0 * np.eye(3)) == pytest.approx(4.0 * np.pi / 3.0 / 8.0)

    def test_angular_axes_clip_at_ninety(self):
        a = AngularBound(h_theta=0.25 * np.eye(3), representation="sin_theta")
        assert np.allclose(angular_axes_deg(a), 90.0)
        _, v_ang = bound_volumes(TranslationBound(np.eye(3), np.zeros(3)), a)
        assert v_ang == pytest.approx(4.0 * np.pi / 3.0 * 90.0 ** 3)

    def test_half_angle_axes_double(self):
        a = AngularBound(h_theta=4.0 * np.eye(3), representation="sin_half_theta")
        assert np.allclose(angular_axes_deg(a), 60.0)

    def test_joint_report(self):
        report = project_joint(_rotmat_bound(np.eye(12)), Rotation.identity())
        assert report.volumes["translation_m3"] == pytest.approx(4.0 * np.pi / 3.0)
        assert report.volumes["angular_deg3"] > 0

    def test_not_psd(self):
        with pytest.raises(InputError):
            translation_volume(-np.eye(3))


class TestSampling:
    def test_ellipse_slices(self):
        t = TranslationBound(np.diag([1.0, 4.0, 9.0]), np.array([0.0, 0.0, 1.0]))
        frame = ellipse_slices(t, n_points=16)
        assert list(frame.columns) == ["bound", "axis_i", "axis_j", "point", "u", "v"]
        assert len(frame) == 3 * 16
        xy = frame[(frame["axis_i"] == 0) & (frame["axis_j"] == 1)]
        assert np.allclose(xy["u"] ** 2 + 4.0 * xy["v"] ** 2, 1.0)

    def test_ellipse_slices_with_angular(self):
        t = TranslationBound(np.eye(3), np.zeros(3))
        a = AngularBound(h_theta=2.0 * np.eye(3), representation="sin_theta")
        frame = ellipse_slices(t, a, n_points=8)
        assert set(frame["bound"]) == {"translation", "sin_theta"}
        assert len(frame) == 6 * 8

    def test_boundary_values(self, rng):
        bound = EllipsoidBound(h=_random_pd(rng, 5), center=rng.standard_normal(5))
        points = sample_ellipsoid_boundary(bound, 50, rng)
        assert points.shape == (50, 5)
        assert np.allclose(bound.value(points), 1.0)

    def test_unbounded_boundary_refused(self, rng):
        bound = EllipsoidBound(h=np.diag([1.0, 0.0]), center=np.zeros(2))
        with pytest.raises(DegenerateBoundError):
            sample_ellipsoid_boundary(bound, 5, rng)

    def test_boundary_poses(self, rng):
        poses = boundary_poses(_rotmat_bound(100.0 * np.eye(12), t=np.array([0.0, 0.0, 1.0])), 10, rng)
        assert len(poses) == 10
        for pose in poses:
            assert np.linalg.det(pose.rotation.m) == pytest.approx(1.0)
            assert np.linalg.norm(pose.translation - [0.0, 0.0, 1.0]) <= 0.1 + 1e-12

    def test_boundary_poses_need_pose_frame(self, rng):
        with pytest.raises(InputError):
            boundary_poses(EllipsoidBound(h=np.eye(3), center=np.zeros(3)), 3, rng)
