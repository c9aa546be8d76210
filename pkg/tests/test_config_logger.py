"""
Tests for configuration loading and structured logging
"""
import json
import logging
import sys

import pytest

from src.utils.config_loader import ConfigLoader, get_config
from src.utils.logger import SolveLogger, get_logger


@pytest.fixture
def yaml_config(tmp_path, monkeypatch):
    monkeypatch.setenv("TEST_SOLVER", "SCS")
    monkeypatch.delenv("TEST_MISSING", raising=False)
    path = tmp_path / "config.yaml"
    path.write_text(
        "solver:\n"
        "  name: \"${TEST_SOLVER:CLARABEL}\"\n"
        "  fallback: \"${TEST_MISSING:CLARABEL}\"\n"
        "  raw: \"${TEST_MISSING}\"\n"
        "conformal:\n"
        "  alpha: 0.2\n"
        "  norm: two\n"
        "pnp:\n"
        "  refine: \"yes\"\n"
        "  gap_tol: not-a-number\n"
    )
    return ConfigLoader(str(path))


class TestConfigLoader:
    def test_env_substitution(self, yaml_config):
        assert yaml_config.get("solver.name") == "SCS"
        assert yaml_config.get("solver.fallback") == "CLARABEL"
        assert yaml_config.get("solver.raw") == "${TEST_MISSING}"

    def test_typed_getters(self, yaml_config):
        assert yaml_config.get_float("conformal.alpha", 0.1) == 0.2
        assert yaml_config.get_float("pnp.gap_tol", 1e-6) == 1e-6
        assert yaml_config.get_int("harness.workers", 3) == 3
        assert yaml_config.get_bool("pnp.refine", False) is True
        assert yaml_config.get("missing.key", "d") == "d"

    def test_sections(self, yaml_config):
        assert yaml_config.get_conformal_config() == {"alpha": 0.2, "norm": "two"}
        assert yaml_config.get_harness_config() == {}

    def test_merge(self, yaml_config):
        yaml_config.merge({"conformal": {"alpha": 0.05}, "harness": {"seed": 4}})
        assert yaml_config.get_float("conformal.alpha", 0.1) == 0.05
        assert yaml_config.get("conformal.norm") == "two"
        assert yaml_config.get_int("harness.seed", 0) == 4

    def test_json_and_reload(self, yaml_config, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"projection": {"slice_points": 50}}))
        yaml_config.reload(str(path))
        assert yaml_config.get_int("projection.slice_points", 200) == 50
        assert yaml_config.get("solver.name") is None

    def test_missing_file(self, tmp_path):
        loader = ConfigLoader(str(tmp_path / "nope.yaml"))
        assert loader.config == {}

    def test_global_instance(self):
        assert get_config() is get_config()


class TestLogger:
    def test_handlers_reused(self):
        a = get_logger("slue.tests.reuse")
        b = get_logger("slue.tests.reuse")
        assert a is b
        assert len(a.handlers) == len(b.handlers)

    def test_console_goes_to_stderr(self):
        logger = get_logger("slue.tests.stream")
        streams = [h for h in logger.handlers if type(h) is logging.StreamHandler]
        assert streams
        assert all(h.stream is sys.stderr for h in streams)
        assert logger.propagate is False

    def test_explicit_level(self):
        logger = get_logger("slue.tests.level", "debug")
        assert logger.level == logging.DEBUG

    def test_solve_logger_events(self, caplog):
        solve_logger = SolveLogger("slue.tests.solves")
        solve_logger.logger.propagate = True
        with caplog.at_level(logging.INFO, logger="slue.tests.solves"):
            solve_logger.log_calibration(0, 0.1, 3.5, 40, "infinity")
            solve_logger.log_solve("rotmat", 1, "ok", 0.5, -12.0)
            solve_logger.log_frame_failure(2, "unbounded", "slab")
            solve_logger.log_pnp("sdp", 1e-9, 0.1)
            solve_logger.log_error("InputError", "bad radii", {"frame": 3})
        messages = [r.getMessage() for r in caplog.records]
        assert messages == ["Keypoint calibrated", "Ellipsoid solve", "Frame failed",
                            "Pose estimated", "InputError: bad radii"]
        assert caplog.records[1].form == "rotmat"
        assert caplog.records[2].status == "unbounded"
