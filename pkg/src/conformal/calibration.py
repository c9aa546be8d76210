"""
Split conformal calibration of per-keypoint pixel radii
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Union

import numpy as np

from src.utils.errors import InputError
from src.utils.logger import get_logger, solve_logger

logger = get_logger(__name__)

class Norm(str, Enum):
    TWO = "two"
    INFINITY = "infinity"

    @classmethod
    def parse(cls, value: Union[str, "Norm"]) -> "Norm":
        if isinstance(value, Norm):
            return value
        aliases = {"2": cls.TWO, "l2": cls.TWO, "two": cls.TWO,
                   "inf": cls.INFINITY, "infinity": cls.INFINITY, "linf": cls.INFINITY}
        try:
            return aliases[str(value).strip().lower()]
        except KeyError:
            raise InputError(f"unknown norm '{value}' (expected 'two' or 'infinity')")


@dataclass(frozen=True)
class CalibrationRecord:
    keypoint_id: int
    detected: np.ndarray
    confidence: float
    ground_truth: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "detected", np.asarray(self.detected, dtype=float).reshape(2))
        object.__setattr__(self, "ground_truth", np.asarray(self.ground_truth, dtype=float).reshape(2))


@dataclass(frozen=True)
class KeypointBound:
    """Calibrated score quantile for one keypoint; the per-detection radius is radius / confidence"""
    keypoint_id: int
    radius: float
    norm: Norm
    alpha: float
    n_records: int = 0

    @property
    def infinite(self) -> bool:
        return math.isinf(self.radius)


def conformity_score(record: CalibrationRecord, norm: Union[str, Norm] = Norm.INFINITY) -> float:
    """
    Confidence-weighted reprojection error c * ||y - z||_p

    Args:
        record: calibration record
        norm: 'two' or 'infinity'

    Returns:
        Score
    """
    if record.confidence <= 0:
        raise InputError(f"confidence must be positive, got {record.confidence}")
    order = 2 if Norm.parse(norm) is Norm.TWO else np.inf
    return float(record.confidence * np.linalg.norm(record.detected - record.ground_truth, ord=order))


def conformal_rank(n: int, alpha: float) -> int:
    """
    1-indexed rank ceil((1 - alpha)(n + 1)) of the calibration quantile

    Evaluated in exact rational arithmetic on the shortest decimal form of alpha, so
    alpha = 0.1, n = 9 gives rank 9 and any alpha a hair below 1 / (n + 1) gives n + 1.
    """
    exact = (1 - Fraction(repr(float(alpha)))) * (n + 1)
    return int(math.ceil(exact))


def quantile_of_scores(scores: Iterable[float], alpha: float) -> float:
    """Adjusted (1 - alpha)(1 + 1/n) empirical quantile; inf when the rank exceeds n"""
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    s = np.sort(np.asarray(list(scores), dtype=float))
    if s.size == 0:
        raise InputError("cannot calibrate on an empty record set")
    k = conformal_rank(s.size, alpha)
    if k > s.size:
        return math.inf
    return float(s[max(k, 1) - 1])


def calibrate(records: List[CalibrationRecord], alpha: float,
              norm: Union[str, Norm] = Norm.INFINITY) -> KeypointBound:
    """
    Calibrate one keypoint

    Args:
        records: records sharing a keypoint_id
        alpha: miscoverage level in (0, 1)
        norm: score norm

    Returns:
        KeypointBound, flagged infinite when too few records exist for this alpha
    """
    if not records:
        raise InputError("cannot calibrate on an empty record set")
    ids = {r.keypoint_id for r in records}
    if len(ids) != 1:
        raise InputError(f"records mix keypoint ids {sorted(ids)}")
    norm = Norm.parse(norm)

    radius = quantile_of_scores((conformity_score(r, norm) for r in records), alpha)
    bound = KeypointBound(
        keypoint_id=records[0].keypoint_id,
        radius=radius,
        norm=norm,
        alpha=float(alpha),
        n_records=len(records),
    )
    if bound.infinite:
        logger.warning(
            f"Keypoint {bound.keypoint_id}: {len(records)} records are too few for alpha={alpha}; "
            "bound is infinite"
        )
    solve_logger.log_calibration(bound.keypoint_id, bound.alpha, bound.radius, len(records), norm.value)
    return bound


def calibrate_all(records: Iterable[CalibrationRecord], alpha: float,
                  norm: Union[str, Norm] = Norm.INFINITY) -> Dict[int, KeypointBound]:
    """Group records by keypoint_id and calibrate each group"""
    groups: Dict[int, List[CalibrationRecord]] = defaultdict(list)
    for record in records:
        groups[record.keypoint_id].append(record)
    if not groups:
        raise InputError("cannot calibrate on an empty record set")
    return {kid: calibrate(groups[kid], alpha, norm) for kid in sorted(groups)}


def bound_for_detection(bound: KeypointBound, confidence: float) -> float:
    """Radius r / c for a test detection with the given confidence (inf propagates)"""
    if confidence <= 0:
        raise InputError(f"confidence must be positive, got {confidence}")
    if bound.infinite:
        return math.inf
    return bound.radius / confidence
