"""
Tests for the click command line
"""
import json

import numpy as np
import pytest
from click.testing import CliRunner

from src.cli.commands import cli
from src.serialization import PoseModel


@pytest.fixture
def runner():
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        return CliRunner()


def _invoke(runner, args):
    result = runner.invoke(cli, args, catch_exceptions=False)
    return result, (json.loads(result.stdout) if result.exit_code == 0 else None)


@pytest.fixture
def observations(scene, tmp_path):
    frame = {
        "intrinsics": {"k": scene.obs.intrinsics.k.tolist()},
        "keypoints_3d": scene.obs.keypoints_3d.tolist(),
        "detections": scene.obs.detections.tolist(),
        "radii": scene.obs.radii.tolist(),
        "pose": PoseModel.from_pose(scene.ground_truth).model_dump(),
    }
    path = tmp_path / "obs.json"
    path.write_text(json.dumps({"frames": [frame]}))
    return path


def test_calibrate(runner, tmp_path):
    lines = [
        json.dumps({"keypoint_id": k, "detected": [float(i), 0.0], "confidence": 1.0, "ground_truth": [0.0, 0.0]})
        for k in range(2) for i in range(1, 20)
    ]
    records = tmp_path / "records.jsonl"
    records.write_text("\n".join(lines) + "\n")
    out = tmp_path / "bounds.json"
    result, data = _invoke(runner, ["calibrate", str(records), "--alpha", "0.1", "-o", str(out)])
    assert result.exit_code == 0
    assert data["alpha"] == 0.1
    assert [b["radius"] for b in data["bounds"]] == [18.0, 18.0]
    assert json.loads(out.read_text()) == data


def test_calibrate_rejects_alpha(runner, tmp_path):
    records = tmp_path / "records.jsonl"
    records.write_text('{"keypoint_id": 0, "detected": [1, 0], "confidence": 1, "ground_truth": [0, 0]}\n')
    result = runner.invoke(cli, ["calibrate", str(records), "--alpha", "1.5"])
    assert result.exit_code == 2


def test_calibrate_bad_file(runner, tmp_path):
    records = tmp_path / "records.jsonl"
    records.write_text('{"keypoint_id": "x"}\n')
    result = runner.invoke(cli, ["calibrate", str(records)])
    assert result.exit_code == 1


def test_bound_then_project(runner, observations, tmp_path):
    results_path = tmp_path / "results.json"
    result, data = _invoke(runner, ["bound", str(observations), "--order", "1", "-o", str(results_path)])
    assert result.exit_code == 0
    entry = data["results"][0]
    assert entry["status"] == "ok"
    assert entry["form"] == "rotmat"
    assert np.array(entry["H"]).shape == (12, 12)

    slices = tmp_path / "slices.csv"
    result, data = _invoke(runner, ["project", str(results_path), "--slices", str(slices), "--n-points", "16"])
    assert result.exit_code == 0
    projection = data["projections"][0]
    assert np.array(projection["h_t"]).shape == (3, 3)
    assert projection["representation"] == "sin_theta"
    assert projection["volumes"]["translation_m3"] > 0
    assert slices.exists()


def test_bound_dumps_lmi(runner, observations, tmp_path):
    dump = tmp_path / "lmi"
    result, _ = _invoke(runner, ["bound", str(observations), "--split", "translation_only",
                                 "--dump-lmi", str(dump)])
    assert result.exit_code == 0
    assert (dump / "frame_0000.lmi").exists()


def test_bound_quaternion_order_one_fails_frame(runner, observations):
    result, data = _invoke(runner, ["bound", str(observations), "--form", "quat", "--order", "1"])
    assert result.exit_code == 0
    assert data["results"][0]["status"] == "input_error"


def test_bound_without_pose(runner, scene, tmp_path):
    frame = {
        "intrinsics": {"fx": 500, "fy": 500, "cx": 320, "cy": 240},
        "keypoints_3d": scene.obs.keypoints_3d.tolist(),
        "detections": scene.obs.detections.tolist(),
        "radii": scene.obs.radii.tolist(),
    }
    path = tmp_path / "obs.json"
    path.write_text(json.dumps(frame))
    result = runner.invoke(cli, ["bound", str(path)])
    assert result.exit_code == 2


def test_pnp(runner, observations):
    result, data = _invoke(runner, ["pnp", str(observations)])
    assert result.exit_code == 0
    assert len(data["estimates"]) == 1
    assert np.array(data["estimates"][0]["pose"]["rotation"]).shape == (3, 3)


def test_toy2d(runner, tmp_path):
    constraints = tmp_path / "disk.json"
    constraints.write_text(json.dumps({"constraints": [[[-0.25, 0, 0], [0, 1, 0], [0, 0, 1]]]}))
    result, data = _invoke(runner, ["toy2d", str(constraints), "--kappa-max", "1", "--grid-points", "51"])
    assert result.exit_code == 0
    assert [o["order"] for o in data["orders"]] == [1, 2]
    assert np.allclose(data["orders"][0]["H"], 4.0 * np.eye(2), atol=1e-4)
    assert data["monotone"]


def test_toy2d_bad_constraints(runner, tmp_path):
    constraints = tmp_path / "bad.json"
    constraints.write_text(json.dumps({"constraints": [[1, 2], [3, 4]]}))
    result = runner.invoke(cli, ["toy2d", str(constraints)])
    assert result.exit_code == 1


def test_coverage_without_solve(runner):
    result, data = _invoke(runner, ["--seed", "3", "coverage", "--n-calibration", "20", "--n-eval", "5",
                                    "--no-solve", "--pose-source", "ground_truth"])
    assert result.exit_code == 0
    assert data["n_frames"] == 5
    assert data["ellipsoid_coverage"] is None


def test_bench(runner, tmp_path):
    csv_path = tmp_path / "bench.csv"
    result, data = _invoke(runner, ["bench", "--frames", "1", "--case", "rotmat:1", "--csv", str(csv_path)])
    assert result.exit_code == 0
    assert data[0]["form"] == "rotmat"
    assert csv_path.exists()


def test_bench_bad_case(runner):
    result = runner.invoke(cli, ["bench", "--case", "rotmat"])
    assert result.exit_code == 2
