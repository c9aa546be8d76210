"""
Tests for the JSON/CSV file surfaces
"""
import json
import math

import numpy as np
import pandas as pd
import pytest

from src.conformal import KeypointBound, Norm
from src.constraints import Form
from src.projection import TranslationBound
from src.serialization import (
    PoseModel,
    bounds_to_json,
    ellipsoid_from_result,
    load_bounds,
    load_calibration_records,
    load_observations,
    load_results,
    result_to_json,
    write_ellipse_slices_csv,
    write_json,
)
from src.slue import solve_frame
from src.utils.errors import InputError

INTRINSICS = {"fx": 500.0, "fy": 500.0, "cx": 320.0, "cy": 240.0}


def _frame(scene, **extra):
    data = {
        "intrinsics": INTRINSICS,
        "keypoints_3d": scene.obs.keypoints_3d.tolist(),
        "detections": scene.obs.detections.tolist(),
        "radii": scene.obs.radii.tolist(),
    }
    data.update(extra)
    return data


def _write(path, data):
    path.write_text(json.dumps(data))
    return path


class TestCalibrationRecords:
    def test_load(self, tmp_path):
        path = tmp_path / "records.jsonl"
        path.write_text(
            '{"keypoint_id": 0, "detected": [1, 2], "confidence": 0.5, "ground_truth": [1.5, 2]}\n'
            "\n"
            '{"keypoint_id": 1, "detected": [0, 0], "confidence": 1, "ground_truth": [0, 3]}\n'
        )
        records = load_calibration_records(path)
        assert [r.keypoint_id for r in records] == [0, 1]
        assert np.allclose(records[0].ground_truth, [1.5, 2.0])

    def test_bad_line_names_location(self, tmp_path):
        path = tmp_path / "records.jsonl"
        path.write_text(
            '{"keypoint_id": 0, "detected": [1, 2], "confidence": 0.5, "ground_truth": [1, 2]}\n'
            '{"keypoint_id": 0, "detected": [1, 2, 3], "confidence": 0.5, "ground_truth": [1, 2]}\n'
        )
        with pytest.raises(InputError, match=r"records.jsonl:2: invalid field 'detected'"):
            load_calibration_records(path)

    def test_nonpositive_confidence(self, tmp_path):
        path = tmp_path / "records.jsonl"
        path.write_text('{"keypoint_id": 0, "detected": [1, 2], "confidence": 0, "ground_truth": [1, 2]}\n')
        with pytest.raises(InputError, match="confidence"):
            load_calibration_records(path)

    def test_empty(self, tmp_path):
        path = tmp_path / "records.jsonl"
        path.write_text("\n")
        with pytest.raises(InputError):
            load_calibration_records(path)


class TestObservations:
    def test_single_frame(self, scene, tmp_path):
        frames = load_observations(_write(tmp_path / "obs.json", _frame(scene)))
        assert len(frames) == 1
        obs = frames[0].to_observation_set()
        assert np.allclose(obs.detections, scene.obs.detections)
        assert np.allclose(obs.intrinsics.k, scene.obs.intrinsics.k)

    def test_frames_with_pose(self, scene, tmp_path):
        pose = PoseModel.from_pose(scene.ground_truth).model_dump()
        data = {"frames": [_frame(scene, pose=pose), _frame(scene)]}
        frames = load_observations(_write(tmp_path / "obs.json", data))
        assert len(frames) == 2
        assert np.allclose(frames[0].pose.to_pose().translation, scene.ground_truth.translation)
        assert frames[1].pose is None

    def test_null_radius_is_infinite(self, scene, tmp_path):
        radii = [None] + scene.obs.radii[1:].tolist()
        frames = load_observations(_write(tmp_path / "obs.json", _frame(scene, radii=radii)))
        obs = frames[0].to_observation_set()
        assert math.isinf(obs.radii[0])
        assert obs.unbounded_keypoints == [0]

    def test_radii_from_bounds(self, scene, tmp_path):
        data = _frame(scene, confidences=[0.5] * 8)
        del data["radii"]
        frame = load_observations(_write(tmp_path / "obs.json", data))[0]
        bounds = {k: KeypointBound(k, 2.0, Norm.INFINITY, 0.1, 10) for k in range(8)}
        assert np.allclose(frame.to_observation_set(bounds).radii, 4.0)
        with pytest.raises(InputError):
            frame.to_observation_set()

    def test_full_intrinsics_matrix(self, scene, tmp_path):
        data = _frame(scene, intrinsics={"k": scene.obs.intrinsics.k.tolist()})
        obs = load_observations(_write(tmp_path / "obs.json", data))[0].to_observation_set()
        assert np.allclose(obs.intrinsics.k, scene.obs.intrinsics.k)

    def test_unknown_norm(self, scene, tmp_path):
        with pytest.raises(InputError, match="norm"):
            load_observations(_write(tmp_path / "obs.json", _frame(scene, norm="l7")))

    def test_bad_json(self, tmp_path):
        path = tmp_path / "obs.json"
        path.write_text("{not json")
        with pytest.raises(InputError, match="not valid JSON"):
            load_observations(path)

    def test_non_rotation_pose(self):
        with pytest.raises(InputError):
            PoseModel(rotation=(2.0 * np.eye(3)).tolist(), translation=[0.0, 0.0, 1.0]).to_pose()


class TestBounds:
    def test_round_trip_keeps_infinite(self, tmp_path):
        bounds = {
            0: KeypointBound(0, 3.5, Norm.TWO, 0.1, 40),
            1: KeypointBound(1, math.inf, Norm.TWO, 0.1, 3),
        }
        data = bounds_to_json(bounds, 0.1, "two")
        assert data["bounds"][1]["radius"] is None
        write_json(data, tmp_path / "bounds.json")
        loaded = load_bounds(tmp_path / "bounds.json")
        assert loaded[0] == bounds[0]
        assert loaded[1].infinite


class TestResults:
    def test_ok_result(self, scene, tmp_path):
        result = solve_frame(0, scene.obs, scene.ground_truth, Form.ROTMAT, order=1)
        data = result_to_json(result, frame=5)
        assert data["status"] == "ok"
        assert data["frame"] == 5
        assert len(data["H"]) == 12
        write_json({"results": [data]}, tmp_path / "results.json")
        models = load_results(tmp_path / "results.json")
        bound, pose = ellipsoid_from_result(models[0])
        assert np.allclose(bound.h, result.joint.h)
        assert bound.frame.value == "rotmat_translation"
        assert np.allclose(pose.translation, scene.ground_truth.translation)

    def test_failed_result(self, scene, tmp_path):
        result = solve_frame(1, scene.obs, scene.ground_truth, Form.QUAT, order=1)
        data = result_to_json(result, frame=1)
        assert data["status"] == "input_error"
        assert data["H"] is None
        assert data["logdet"] is None
        write_json(data, tmp_path / "result.json")
        model = load_results(tmp_path / "result.json")[0]
        with pytest.raises(InputError, match="input_error"):
            ellipsoid_from_result(model)


def test_slices_csv(tmp_path):
    path = tmp_path / "out" / "slices.csv"
    frame = write_ellipse_slices_csv(path, TranslationBound(np.eye(3), np.zeros(3)), n_points=10)
    loaded = pd.read_csv(path)
    assert len(loaded) == len(frame) == 30
    assert np.allclose(loaded["u"] ** 2 + loaded["v"] ** 2, 1.0)


def test_write_json_returns_text(tmp_path):
    text = write_json({"a": 1})
    assert json.loads(text) == {"a": 1}
    assert not list(tmp_path.iterdir())
