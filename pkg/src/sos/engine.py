"""
Minimum-volume ellipsoid bounds of quadratic constraint sets via the SOS S-lemma.

For x = [1, z] and an ellipsoid {z : (z - c)^T H (z - c) <= 1} define
W(H) = G^T H G - e1 e1^T with G = [-c, I]. The ellipsoid contains the set when

    s(x) = sum_i lambda_i(x) x^T A_i x + sum_j mu_j(x) x^T Q_j x - x1^(2k) x^T W(H) x

is a sum of squares with SOS multipliers lambda_i = [x]_k^T L_i [x]_k and free
multipliers mu_j = [x]_k^T M_j [x]_k. The identity is imposed coefficientwise against a
PSD Gram matrix of s over [x]_(k+1). Level k embeds in level k+1 (multiply by x1^2),
so the certified log-determinant is nondecreasing in k.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import cvxpy as cp
import numpy as np
import scipy.sparse as sp

from src.constraints import QuadraticConstraintSet
from src.geometry import psd_clip
from src.sos.backend import ConicBackend, SolveOutcome
from src.sos.basis import MonomialBasis, monomial_basis
from src.sos.operators import coefficient_operator, gram_operator, shifted_form_operator
from src.utils.config_loader import get_config
from src.utils.errors import (
    CertificationError,
    DegenerateSetError,
    InputError,
    NumericalSolveError,
    UnboundedSetError,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)
config = get_config()

# Eigenvector loading above which a coordinate is reported as a degenerate axis
AXIS_LOADING = 0.3


class EllipsoidFrame(str, Enum):
    ROTMAT_TRANSLATION = "rotmat_translation"
    QUAT_TRANSLATION = "quat_translation"
    GENERIC = "generic"


@dataclass(frozen=True)
class EllipsoidObjective:
    """Maximize logdet of H (joint) or of the principal block on `indices` with the rest zero"""
    indices: Optional[Tuple[int, ...]] = None

    @classmethod
    def joint(cls) -> "EllipsoidObjective":
        return cls(None)

    @classmethod
    def subblock(cls, indices: Sequence[int]) -> "EllipsoidObjective":
        return cls(tuple(int(i) for i in indices))

    @property
    def is_joint(self) -> bool:
        return self.indices is None

    def target(self, d: int) -> Tuple[int, ...]:
        if self.indices is None:
            return tuple(range(d))
        if not self.indices or min(self.indices) < 0 or max(self.indices) >= d:
            raise InputError(f"subblock indices {self.indices} out of range for dimension {d}")
        if len(set(self.indices)) != len(self.indices):
            raise InputError("subblock indices must be distinct")
        return tuple(sorted(self.indices))


@dataclass(frozen=True)
class EllipsoidBound:
    """{z : (z - center)^T h (z - center) <= 1}"""
    h: np.ndarray
    center: np.ndarray
    frame: EllipsoidFrame = EllipsoidFrame.GENERIC

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        c = np.asarray(self.center, dtype=float).reshape(-1)
        if h.shape != (c.size, c.size):
            raise InputError(f"shape matrix {h.shape} does not match center of length {c.size}")
        object.__setattr__(self, "h", 0.5 * (h + h.T))
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "frame", EllipsoidFrame(self.frame))

    @property
    def dim(self) -> int:
        return int(self.center.size)

    def value(self, z: np.ndarray) -> np.ndarray:
        """(z - c)^T H (z - c) for a point or each row of a batch"""
        diff = np.asarray(z, dtype=float) - self.center
        if diff.ndim == 1:
            return float(diff @ self.h @ diff)
        return np.einsum("ij,jk,ik->i", diff, self.h, diff)

    def contains(self, z: np.ndarray, slack: float = 1e-6):
        return self.value(z) <= 1.0 + slack

    @property
    def logdet(self) -> float:
        w = np.linalg.eigvalsh(self.h)
        if np.any(w <= 0):
            return float("-inf")
        return float(np.sum(np.log(w)))

    def log_volume(self) -> float:
        """Log volume up to the unit-ball constant: -logdet / 2"""
        return -0.5 * self.logdet


@dataclass
class AssembledLmi:
    """
    Coefficient-matching system sum_b op_b @ vec(X_b) == 0 with one block per variable
    """
    n: int
    kappa: int
    target: Tuple[int, ...]
    constraint_set: QuadraticConstraintSet = field(repr=False)
    w_operator: sp.csr_matrix = field(repr=False)
    gram: sp.csr_matrix = field(repr=False)
    inequality_ops: List[sp.csr_matrix] = field(repr=False)
    equality_ops: List[sp.csr_matrix] = field(repr=False)
    multiplier_dim: int = 1
    lifted_dim: int = 1

    def blocks(self):
        """(name, kind, side, operator) for every variable block, W first and the Gram matrix last"""
        p, m = self.multiplier_dim, self.lifted_dim
        out = [("W", "affine", self.n, -self.w_operator)]
        out += [(f"lambda_{i}", "psd", p, op) for i, op in enumerate(self.inequality_ops)]
        out += [(f"mu_{j}", "sym", p, op) for j, op in enumerate(self.equality_ops)]
        out.append(("S", "psd", m, -self.gram))
        return out


@dataclass
class SosCertificate:
    lambda_mats: List[np.ndarray]
    mu_mats: List[np.ndarray]
    slack_mat: np.ndarray
    w_mat: np.ndarray
    kappa: int
    lmi: AssembledLmi = field(repr=False)

    def residual(self) -> float:
        return certificate_residual(self)


def _vec(m: np.ndarray) -> np.ndarray:
    return np.asarray(m, dtype=float).reshape(-1, order="F")


def certificate_residual(certificate: SosCertificate) -> float:
    """
    Max coefficient mismatch of the SOS identity, relative to max(1, max |coef of the W term|)
    """
    lmi = certificate.lmi
    w_coef = lmi.w_operator @ _vec(certificate.w_mat)
    total = -w_coef - lmi.gram @ _vec(certificate.slack_mat)
    for op, lam in zip(lmi.inequality_ops, certificate.lambda_mats):
        total = total + op @ _vec(lam)
    for op, mu in zip(lmi.equality_ops, certificate.mu_mats):
        total = total + op @ _vec(mu)
    scale = max(1.0, float(np.max(np.abs(w_coef))) if w_coef.size else 1.0)
    return float(np.max(np.abs(total)) / scale) if total.size else 0.0


def dump_lmi(lmi: AssembledLmi, path) -> Path:
    """
    Write the coefficient-matching system as sparse triplets

    Header lines start with '#'. Each block is announced as
    '# block <index> <name> <kind> <side>' where kind is affine, psd or sym and the block
    variable is a side x side matrix. Data lines are '<block> <row> <col> <value>' with
    row the coefficient index and col the column-major vec index of the block variable.
    The system is sum over blocks of op_b vec(X_b) = 0.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write(f"# sos-lmi n={lmi.n} kappa={lmi.kappa} target={list(lmi.target)}\n")
        blocks = lmi.blocks()
        for index, (name, kind, side, _) in enumerate(blocks):
            f.write(f"# block {index} {name} {kind} {side}\n")
        for index, (_, _, _, op) in enumerate(blocks):
            coo = op.tocoo()
            for r, c, v in zip(coo.row, coo.col, coo.data):
                if v != 0.0:
                    f.write(f"{index} {r} {c} {v:.17g}\n")
    logger.info(f"LMI written to {path}")
    return path


def _flat(expr, size: int):
    return cp.reshape(expr, (size,), order="F")


def _assemble(constraint_set: QuadraticConstraintSet, kappa: int,
              target: Tuple[int, ...]) -> Tuple[AssembledLmi, MonomialBasis, MonomialBasis]:
    n = constraint_set.dim
    multiplier = monomial_basis(n, kappa)
    lifted = monomial_basis(n, kappa + 1)
    out = monomial_basis(n, 2 * kappa + 2)
    lmi = AssembledLmi(
        n=n,
        kappa=kappa,
        target=target,
        constraint_set=constraint_set,
        w_operator=shifted_form_operator(n, 2 * kappa, out),
        gram=gram_operator(lifted, out),
        inequality_ops=[coefficient_operator(multiplier, a, out) for a in constraint_set.inequalities],
        equality_ops=[coefficient_operator(multiplier, q, out) for q in constraint_set.equalities],
        multiplier_dim=multiplier.dim,
        lifted_dim=lifted.dim,
    )
    return lmi, multiplier, lifted


class _Program:
    """cvxpy model of one certification problem"""

    def __init__(self, lmi: AssembledLmi, multiplier: MonomialBasis, lifted: MonomialBasis,
                 center: np.ndarray, objective: str, cap: Optional[float] = None):
        n, p, m = lmi.n, multiplier.dim, lifted.dim
        target = list(lmi.target)
        k = len(target)

        g = np.hstack([-center.reshape(-1, 1), np.eye(n - 1)])[target]
        e11 = np.zeros((n, n))
        e11[0, 0] = 1.0
        self.g = g
        self.e11 = e11

        self.h = cp.Variable((k, k), PSD=True)
        w = g.T @ self.h @ g - e11
        if p == 1:
            self.lam = [cp.Variable((1, 1), nonneg=True) for _ in lmi.inequality_ops]
            self.mu = [cp.Variable((1, 1)) for _ in lmi.equality_ops]
        else:
            self.lam = [cp.Variable((p, p), PSD=True) for _ in lmi.inequality_ops]
            self.mu = [cp.Variable((p, p), symmetric=True) for _ in lmi.equality_ops]
        self.s = cp.Variable((m, m), PSD=True)

        rhs = lmi.gram @ _flat(self.s, m * m) + lmi.w_operator @ _flat(w, n * n)
        lhs = 0
        if self.lam:
            stacked = sp.hstack(lmi.inequality_ops).tocsr()
            lhs = lhs + stacked @ cp.hstack([_flat(v, p * p) for v in self.lam])
        if self.mu:
            stacked = sp.hstack(lmi.equality_ops).tocsr()
            lhs = lhs + stacked @ cp.hstack([_flat(v, p * p) for v in self.mu])
        constraints = [lhs == rhs]

        if objective == "logdet":
            goal = cp.Maximize(cp.log_det(self.h))
        else:
            goal = cp.Maximize(cp.trace(self.h))
            constraints.append(self.h << cap * np.eye(k))
        self.problem = cp.Problem(goal, constraints)

    def w_value(self, h_target: np.ndarray) -> np.ndarray:
        return self.g.T @ h_target @ self.g - self.e11


def _null_axes(h_target: np.ndarray, target: Sequence[int], threshold: float) -> List[int]:
    w, v = np.linalg.eigh(0.5 * (h_target + h_target.T))
    null = v[:, w < threshold]
    if null.size == 0:
        return []
    loading = np.linalg.norm(null, axis=1)
    return [int(target[i]) for i in np.nonzero(loading > AXIS_LOADING)[0]]


def _capped_axes(h_target: np.ndarray, target: Sequence[int], cap: float) -> List[int]:
    w, v = np.linalg.eigh(0.5 * (h_target + h_target.T))
    top = v[:, w > 0.99 * cap]
    if top.size == 0:
        return []
    loading = np.linalg.norm(top, axis=1)
    return [int(target[i]) for i in np.nonzero(loading > AXIS_LOADING)[0]]


def _check_flat(h_target: np.ndarray, target: Sequence[int]):
    """
    Raise UnboundedSetError when an optimal H is flat along some direction

    Eigenvalues below flat_axis_rtol * max(1, largest eigenvalue) count as zero, including
    slightly negative ones left by the solver.
    """
    w = np.linalg.eigvalsh(0.5 * (h_target + h_target.T))
    threshold = config.get_float("solver.flat_axis_rtol", 1e-8) * max(1.0, float(w[-1]))
    if w[0] >= threshold:
        return
    axes = _null_axes(h_target, target, threshold)
    if not axes:
        raise NumericalSolveError("non_psd", f"shape matrix has min eigenvalue {w[0]:.3e}")
    raise UnboundedSetError(axes)


def _diagnose(lmi, multiplier, lifted, center, backend: ConicBackend, outcome: SolveOutcome):
    """Classify a failed logdet solve; always raises"""
    target = lmi.target
    if outcome.unbounded:
        cap = config.get_float("solver.diagnostic_cap", 1e6)
        capped = _Program(lmi, multiplier, lifted, center, "trace", cap=cap)
        capped_outcome = backend.solve(capped.problem)
        if capped_outcome.ok and capped.h.value is not None:
            axes = _capped_axes(capped.h.value, target, cap)
            raise DegenerateSetError(axes)
        raise DegenerateSetError([], "log-determinant unbounded above; degenerate axes not identified")

    capped = _Program(lmi, multiplier, lifted, center, "trace", cap=1.0)
    capped_outcome = backend.solve(capped.problem)
    if capped_outcome.ok and capped.h.value is not None:
        axes = _null_axes(capped.h.value, target, threshold=1e-5)
        if axes:
            raise UnboundedSetError(axes)
        if outcome.infeasible:
            raise CertificationError()
    raise NumericalSolveError(outcome.status)


def solve_min_volume_ellipsoid(constraint_set: QuadraticConstraintSet, center: np.ndarray,
                               kappa: int, objective: Optional[EllipsoidObjective] = None,
                               frame: EllipsoidFrame = EllipsoidFrame.GENERIC,
                               backend: Optional[ConicBackend] = None,
                               dump_path: Optional[str] = None) -> Tuple[EllipsoidBound, SosCertificate]:
    """
    Largest-logdet ellipsoid certified to contain the constraint set

    Args:
        constraint_set: homogeneous set with homogenizing coordinate 0
        center: ellipsoid center in the non-homogeneous coordinates (dim - 1 entries)
        kappa: multiplier half-degree (relaxation order is kappa + 1)
        objective: joint (default) or subblock
        frame: coordinate frame tag for the returned bound
        backend: conic solver adapter
        dump_path: optional file receiving the assembled LMI as sparse triplets

    Returns:
        (EllipsoidBound, SosCertificate)
    """
    if kappa < 0:
        raise InputError(f"kappa must be nonnegative, got {kappa}")
    if constraint_set.homogenization != 0:
        raise InputError("the engine expects the homogenizing coordinate at index 0")
    d = constraint_set.dim - 1
    center = np.asarray(center, dtype=float).reshape(-1)
    if center.size != d:
        raise InputError(f"center must have {d} entries, got {center.size}")
    objective = objective or EllipsoidObjective.joint()
    target = objective.target(d)
    backend = backend or ConicBackend()

    working = constraint_set.normalized() if config.get_bool("solver.normalize_constraints", True) \
        else constraint_set
    lmi, multiplier, lifted = _assemble(working, kappa, target)
    if dump_path:
        dump_lmi(lmi, dump_path)

    program = _Program(lmi, multiplier, lifted, center, "logdet")
    outcome = backend.solve(program.problem)
    logger.debug(
        f"kappa={kappa} dim={constraint_set.dim} status={outcome.status} "
        f"solver={outcome.solver} time={outcome.solve_time:.3f}s"
    )
    if not outcome.ok or program.h.value is None:
        _diagnose(lmi, multiplier, lifted, center, backend, outcome)

    h_raw = np.asarray(program.h.value, dtype=float)
    _check_flat(h_raw, target)
    try:
        h_target = psd_clip(h_raw, config.get_float("solver.psd_clip_tol", 1e-8))
    except ValueError as e:
        raise NumericalSolveError("non_psd", f"solver returned a non-PSD shape matrix: {e}")

    h = np.zeros((d, d))
    h[np.ix_(target, target)] = h_target

    certificate = SosCertificate(
        lambda_mats=[np.asarray(v.value) for v in program.lam],
        mu_mats=[np.asarray(v.value) for v in program.mu],
        slack_mat=np.asarray(program.s.value),
        w_mat=program.w_value(h_target),
        kappa=kappa,
        lmi=lmi,
    )
    residual = certificate_residual(certificate)
    tol = config.get_float("solver.certificate_tol", 1e-5)
    if residual > tol:
        raise NumericalSolveError(
            "certificate", f"SOS identity residual {residual:.2e} exceeds {tol:.0e}; bound not certified"
        )

    bound = EllipsoidBound(h=h, center=center, frame=frame)
    return bound, certificate
