"""
Tests for split conformal keypoint calibration
"""
import math

import numpy as np
import pytest

from src.conformal import (
    CalibrationRecord,
    KeypointBound,
    Norm,
    bound_for_detection,
    calibrate,
    calibrate_all,
    conformal_rank,
    conformity_score,
    quantile_of_scores,
)
from src.utils.errors import InputError


def _record(error, confidence=1.0, keypoint_id=0):
    return CalibrationRecord(keypoint_id, np.asarray(error, dtype=float), confidence, np.zeros(2))


class TestConformityScore:
    def test_two_norm(self):
        assert conformity_score(_record((3.0, -4.0)), Norm.TWO) == pytest.approx(5.0)

    def test_infinity_norm(self):
        assert conformity_score(_record((3.0, -4.0)), Norm.INFINITY) == pytest.approx(4.0)

    def test_confidence_scales_linearly(self):
        assert conformity_score(_record((3.0, -4.0), 0.5), "two") == pytest.approx(2.5)

    def test_nonpositive_confidence_rejected(self):
        with pytest.raises(InputError):
            conformity_score(_record((1.0, 0.0), 0.0))

    def test_norm_aliases(self):
        assert Norm.parse("inf") is Norm.INFINITY
        assert Norm.parse("L2") is Norm.TWO
        with pytest.raises(InputError):
            Norm.parse("one")


class TestQuantile:
    def test_rank(self):
        assert conformal_rank(4, 0.5) == 3
        assert conformal_rank(9, 0.1) == 9

    def test_hand_enumerated_quantile(self):
        assert quantile_of_scores([4.0, 1.0, 3.0, 2.0], 0.5) == 3.0

    def test_too_few_scores_is_infinite(self):
        assert math.isinf(quantile_of_scores([5.0], 0.1))

    def test_uniform_scores(self, rng):
        r = quantile_of_scores(rng.uniform(0.0, 1.0, 10000), 0.1)
        assert 0.88 <= r <= 0.92

    def test_rank_just_past_n_is_infinite(self):
        alpha = 0.01 - 1e-12
        assert conformal_rank(99, alpha) == 100
        assert math.isinf(quantile_of_scores(np.arange(1.0, 100.0), alpha))
        assert quantile_of_scores(np.arange(1.0, 100.0), 0.01) == 99.0

    def test_exact_integer_rank(self):
        assert conformal_rank(19, 0.05) == 19
        assert conformal_rank(99, 0.3) == 70
        assert conformal_rank(9, np.float64(0.1)) == 9

    def test_radius_monotone_in_alpha(self, rng):
        scores = rng.exponential(1.0, 200)
        alphas = [0.01, 0.05, 0.1, 0.2, 0.4, 0.7, 0.95]
        radii = [quantile_of_scores(scores, a) for a in alphas]
        assert all(a >= b for a, b in zip(radii, radii[1:]))
        assert radii[0] > radii[-1]

    def test_alpha_range(self):
        with pytest.raises(InputError):
            quantile_of_scores([1.0], 0.0)
        with pytest.raises(InputError):
            quantile_of_scores([1.0], 1.0)

    def test_empty_scores(self):
        with pytest.raises(InputError):
            quantile_of_scores([], 0.1)


class TestCalibrate:
    def test_calibrate_single_keypoint(self):
        records = [_record((s, 0.0)) for s in (1.0, 2.0, 3.0, 4.0)]
        bound = calibrate(records, 0.5)
        assert bound.radius == 3.0
        assert bound.n_records == 4
        assert not bound.infinite

    def test_mixed_ids_rejected(self):
        with pytest.raises(InputError):
            calibrate([_record((1.0, 0.0), keypoint_id=0), _record((1.0, 0.0), keypoint_id=1)], 0.1)

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            calibrate([], 0.1)
        with pytest.raises(InputError):
            calibrate_all([], 0.1)

    def test_calibrate_all_groups_by_id(self, rng):
        records = [_record(rng.uniform(-1, 1, 2), keypoint_id=k) for k in (0, 1, 2) for _ in range(50)]
        bounds = calibrate_all(records, 0.2, "two")
        assert sorted(bounds) == [0, 1, 2]
        assert all(b.norm is Norm.TWO and b.n_records == 50 for b in bounds.values())

    def test_infinite_flag_for_small_groups(self):
        bound = calibrate([_record((1.0, 0.0))], 0.1)
        assert bound.infinite


class TestBoundForDetection:
    def test_confidence_division(self):
        bound = KeypointBound(0, 3.0, Norm.INFINITY, 0.1)
        assert bound_for_detection(bound, 1.0) == 3.0
        assert bound_for_detection(bound, 0.5) == 6.0

    def test_infinite_propagates(self):
        bound = KeypointBound(0, math.inf, Norm.INFINITY, 0.1)
        assert math.isinf(bound_for_detection(bound, 0.3))

    def test_nonpositive_confidence(self):
        with pytest.raises(InputError):
            bound_for_detection(KeypointBound(0, 3.0, Norm.INFINITY, 0.1), 0.0)
