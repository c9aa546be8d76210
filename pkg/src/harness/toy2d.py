"""
Planar toy sets for inspecting the relaxation hierarchy against a dense grid
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from src.constraints import Form, QuadraticConstraintSet
from src.sos import EllipsoidBound, solve_min_volume_ellipsoid
from src.utils.errors import InputError
from src.utils.logger import get_logger

logger = get_logger(__name__)

MONOTONE_TOL = 1e-5


def disk_constraint(center: Sequence[float], radius: float, outside: bool = False) -> np.ndarray:
    """
    Homogeneous 3 x 3 matrix A over x = [1, u, v] with x^T A x = |z - c|^2 - r^2

    Args:
        center: disk center
        radius: disk radius
        outside: negate the form to describe the complement of the open disk

    Returns:
        3 x 3 symmetric matrix
    """
    c = np.asarray(center, dtype=float).reshape(2)
    if radius <= 0:
        raise InputError(f"radius must be positive, got {radius}")
    a = np.zeros((3, 3))
    a[0, 0] = c @ c - radius ** 2
    a[0, 1:] = -c
    a[1:, 0] = -c
    a[1:, 1:] = np.eye(2)
    return -a if outside else a


def default_toy_constraints() -> List[np.ndarray]:
    """Crescent: the unit disk minus a disk shifted along the first axis"""
    return [disk_constraint((0.0, 0.0), 1.0), disk_constraint((0.6, 0.0), 0.7, outside=True)]


@dataclass
class ToyOrderResult:
    order: int
    bound: EllipsoidBound
    logdet: float
    area: float
    grid_inside: bool
    n_outside: int


@dataclass
class Toy2dReport:
    constraints: List[np.ndarray] = field(repr=False)
    center: np.ndarray
    n_feasible: int
    orders: List[ToyOrderResult]

    @property
    def monotone(self) -> bool:
        logdets = [o.logdet for o in self.orders]
        return all(b >= a - MONOTONE_TOL for a, b in zip(logdets, logdets[1:]))


def toy_set(constraints: Sequence[np.ndarray]) -> QuadraticConstraintSet:
    return QuadraticConstraintSet(dim=3, inequalities=tuple(constraints), form=Form.GENERIC)


def feasible_grid(constraints: Sequence[np.ndarray], extent: float, grid_points: int) -> np.ndarray:
    """Grid points of [-extent, extent]^2 satisfying every constraint"""
    axis = np.linspace(-extent, extent, grid_points)
    u, v = np.meshgrid(axis, axis, indexing="ij")
    pts = np.stack([u.ravel(), v.ravel()], axis=1)
    mask = toy_set(constraints).members(np.hstack([np.ones((len(pts), 1)), pts]), tol=0.0)
    return pts[mask]


def toy2d(constraints: Optional[Sequence[np.ndarray]] = None, kappa_max: int = 3,
          extent: float = 2.0, grid_points: int = 201,
          center: Optional[Sequence[float]] = None) -> Toy2dReport:
    """
    Certify ellipses at orders 1..kappa_max + 1 and check them against grid-feasible points

    Args:
        constraints: 3 x 3 homogeneous matrices (default crescent)
        kappa_max: largest multiplier half-degree
        extent: half-width of the checking grid
        grid_points: grid resolution per axis
        center: ellipse center (default: centroid of the feasible grid points)

    Returns:
        Toy2dReport with one entry per order
    """
    constraints = list(default_toy_constraints() if constraints is None else constraints)
    if kappa_max < 0:
        raise InputError(f"kappa_max must be nonnegative, got {kappa_max}")
    feasible = feasible_grid(constraints, extent, grid_points)
    if feasible.size == 0:
        raise InputError("no grid point satisfies the constraints")
    c = feasible.mean(axis=0) if center is None else np.asarray(center, dtype=float).reshape(2)

    constraint_set = toy_set(constraints)
    results = []
    for kappa in range(kappa_max + 1):
        bound, _ = solve_min_volume_ellipsoid(constraint_set, c, kappa)
        inside = bound.contains(feasible)
        logdet = bound.logdet
        results.append(ToyOrderResult(
            order=kappa + 1,
            bound=bound,
            logdet=logdet,
            area=float(np.pi * np.exp(-0.5 * logdet)),
            grid_inside=bool(np.all(inside)),
            n_outside=int(np.sum(~inside)),
        ))
        logger.info(f"Toy order {kappa + 1}: logdet {logdet:.6f}, {int(np.sum(~inside))} grid points outside")

    report = Toy2dReport(constraints=constraints, center=c, n_feasible=len(feasible), orders=results)
    if not report.monotone:
        logger.warning("Toy ellipse logdet decreased with order beyond tolerance")
    return report
