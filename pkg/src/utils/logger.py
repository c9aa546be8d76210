"""
Logging configuration for the pose uncertainty library
"""
import logging
import os
import sys
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, Optional

from pythonjsonlogger import jsonlogger


def _json_formatter() -> jsonlogger.JsonFormatter:
    return jsonlogger.JsonFormatter(
        '%(asctime)s %(name)s %(levelname)s %(message)s',
        timestamp=True
    )


def get_logger(name: str, log_level: Optional[str] = None) -> logging.Logger:
    """
    Get configured logger instance

    Args:
        name: Logger name (typically __name__)
        log_level: Logging level; defaults to the LOG_LEVEL environment variable or INFO

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    # Avoid adding handlers multiple times
    if logger.handlers:
        return logger

    level = (log_level or os.getenv("LOG_LEVEL", "INFO")).upper()
    logger.setLevel(getattr(logging, level, logging.INFO))
    logger.propagate = False

    # stdout is reserved for CLI JSON output
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.DEBUG)
    console_handler.setFormatter(logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    ))
    logger.addHandler(console_handler)

    try:
        log_dir = Path(os.getenv("SLUE_LOG_DIR", "logs"))
        log_dir.mkdir(parents=True, exist_ok=True)

        file_handler = RotatingFileHandler(
            log_dir / "slue.log",
            maxBytes=10 * 1024 * 1024,  # 10MB
            backupCount=5
        )
        file_handler.setLevel(logging.INFO)
        file_handler.setFormatter(_json_formatter())
        logger.addHandler(file_handler)
    except (OSError, PermissionError):
        # Read-only filesystem: console only
        pass

    return logger


class SolveLogger:
    """Structured event log for calibrations, ellipsoid solves and pose estimates"""

    def __init__(self, name: str = "slue.solves"):
        self.logger = get_logger(name)

        try:
            log_dir = Path(os.getenv("SLUE_LOG_DIR", "logs"))
            log_dir.mkdir(parents=True, exist_ok=True)
            solve_handler = RotatingFileHandler(
                log_dir / "slue_solves.log",
                maxBytes=10 * 1024 * 1024,
                backupCount=10
            )
            solve_handler.setFormatter(_json_formatter())
            self.logger.addHandler(solve_handler)
        except (OSError, PermissionError):
            pass

    def log_calibration(self, keypoint_id: int, alpha: float, radius: float,
                        n_records: int, norm: str):
        """Log a conformal calibration result"""
        self.logger.info(
            "Keypoint calibrated",
            extra={
                "keypoint_id": keypoint_id,
                "alpha": alpha,
                "radius": radius,
                "n_records": n_records,
                "norm": norm
            }
        )

    def log_solve(self, form: str, order: int, status: str, solve_time: float,
                  logdet: Optional[float] = None, solver: Optional[str] = None):
        """Log an ellipsoid solve"""
        self.logger.info(
            "Ellipsoid solve",
            extra={
                "form": form,
                "order": order,
                "status": status,
                "solve_time_s": solve_time,
                "logdet": logdet,
                "solver": solver
            }
        )

    def log_frame_failure(self, frame: int, status: str, message: str):
        """Log a frame that produced no bound"""
        self.logger.warning(
            "Frame failed",
            extra={"frame": frame, "status": status, "detail": message}
        )

    def log_pnp(self, method: str, tightness: float, objective: float):
        """Log a pose estimate"""
        self.logger.info(
            "Pose estimated",
            extra={"method": method, "tightness": tightness, "objective": objective}
        )

    def log_error(self, error_type: str, error_message: str, context: Optional[Dict[str, Any]] = None):
        """Log error with context"""
        self.logger.error(
            f"{error_type}: {error_message}",
            extra={"context": context or {}}
        )


# Global solve logger instance
solve_logger = SolveLogger()
