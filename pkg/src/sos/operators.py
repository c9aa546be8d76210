"""
Sparse linear maps from Gram-style coefficient matrices to polynomial coefficients.

All maps act on column-major vec() of their matrix argument and return coefficient
vectors indexed by a homogeneous monomial basis of the output degree.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
import scipy.sparse as sp

from src.sos.basis import MonomialBasis, monomial_basis
from src.utils.errors import InputError


def gram_operator(basis: MonomialBasis, out: Optional[MonomialBasis] = None) -> sp.csr_matrix:
    """
    G with G @ vec(S) == coefficients of [x]^T S [x]

    Args:
        basis: basis [x]_k of size m
        out: basis of degree 2k (built when omitted)

    Returns:
        sparse (out.dim x m^2) matrix
    """
    out = out or monomial_basis(basis.n, 2 * basis.kappa)
    base = out.kappa + 1
    codes = basis.codes(base)
    m = basis.dim
    i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    rows = out.lookup_codes(codes[i] + codes[j], base).ravel()
    cols = (i + m * j).ravel()
    return sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(out.dim, m * m))


def _shift_table(multiplier: MonomialBasis, lifted: MonomialBasis) -> np.ndarray:
    """T[a, k] = index in the lifted basis of (monomial a) * x_k"""
    base = lifted.kappa + 1
    codes = multiplier.codes(base)
    unit = np.power(np.int64(base), np.arange(multiplier.n, dtype=np.int64))
    return lifted.lookup_codes(codes[:, None] + unit[None, :], base)


def placement_operator(multiplier: MonomialBasis, constraint: np.ndarray,
                       lifted: Optional[MonomialBasis] = None) -> sp.csr_matrix:
    """
    P with unvec(P @ vec(L)) == the lifted matrix of ([x]_k^T L [x]_k)(x^T A x) over [x]_(k+1)

    Entry (idx(m_a x_k), idx(m_b x_l)) of the lifted matrix receives L[a, b] * A[k, l];
    collisions of the same lifted pair add.
    """
    a_mat = np.asarray(constraint, dtype=float)
    n = multiplier.n
    if a_mat.shape != (n, n):
        raise InputError(f"constraint must be {n}x{n}, got {a_mat.shape}")
    lifted = lifted or monomial_basis(n, multiplier.kappa + 1)
    shift = _shift_table(multiplier, lifted)
    p, m = multiplier.dim, lifted.dim

    rows, cols, vals = [], [], []
    a_idx, b_idx = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    for k, l in zip(*np.nonzero(a_mat)):
        rows.append((shift[a_idx, k] + m * shift[b_idx, l]).ravel())
        cols.append((a_idx + p * b_idx).ravel())
        vals.append(np.full(a_idx.size, a_mat[k, l]))
    if not rows:
        return sp.csr_matrix((m * m, p * p))
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(m * m, p * p),
    )


def coefficient_operator(multiplier: MonomialBasis, constraint: np.ndarray,
                         out: Optional[MonomialBasis] = None) -> sp.csr_matrix:
    """
    C with C @ vec(L) == coefficients of ([x]_k^T L [x]_k)(x^T A x)

    Equal to gram_operator(lifted) @ placement_operator(...), assembled directly.
    """
    a_mat = np.asarray(constraint, dtype=float)
    n = multiplier.n
    if a_mat.shape != (n, n):
        raise InputError(f"constraint must be {n}x{n}, got {a_mat.shape}")
    out = out or monomial_basis(n, 2 * multiplier.kappa + 2)
    base = out.kappa + 1
    codes = multiplier.codes(base)
    unit = np.power(np.int64(base), np.arange(n, dtype=np.int64))
    p = multiplier.dim

    pair = codes[:, None] + codes[None, :]
    a_idx, b_idx = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    cols_ab = (a_idx + p * b_idx).ravel()
    pair = pair.ravel()

    rows, cols, vals = [], [], []
    for k, l in zip(*np.nonzero(a_mat)):
        rows.append(pair + unit[k] + unit[l])
        cols.append(cols_ab)
        vals.append(np.full(cols_ab.size, a_mat[k, l]))
    if not rows:
        return sp.csr_matrix((out.dim, p * p))
    keys = np.concatenate(rows)
    return sp.csr_matrix(
        (np.concatenate(vals), (out.lookup_codes(keys, base), np.concatenate(cols))),
        shape=(out.dim, p * p),
    )


def shifted_form_operator(n: int, shift_degree: int, out: Optional[MonomialBasis] = None) -> sp.csr_matrix:
    """
    T with T @ vec(W) == coefficients of x1^shift_degree * x^T W x
    """
    out = out or monomial_basis(n, shift_degree + 2)
    base = out.kappa + 1
    unit = np.power(np.int64(base), np.arange(n, dtype=np.int64))
    k, l = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    keys = (shift_degree * unit[0] + unit[k] + unit[l]).ravel()
    rows = out.lookup_codes(keys, base)
    cols = (k + n * l).ravel()
    return sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(out.dim, n * n))


def lift_product(multiplier: MonomialBasis, constraint: np.ndarray, coeff_mat: np.ndarray) -> np.ndarray:
    """
    Lifted symmetric matrix Y over [x]_(k+1) with
    [x]_(k+1)^T Y [x]_(k+1) == ([x]_k^T L [x]_k)(x^T A x)

    Args:
        multiplier: basis [x]_k
        constraint: n x n symmetric matrix A
        coeff_mat: p x p symmetric matrix L

    Returns:
        m x m symmetric matrix, m = dim [x]_(k+1)
    """
    coeff_mat = np.asarray(coeff_mat, dtype=float)
    p = multiplier.dim
    if coeff_mat.shape != (p, p):
        raise InputError(f"coefficient matrix must be {p}x{p}, got {coeff_mat.shape}")
    lifted = monomial_basis(multiplier.n, multiplier.kappa + 1)
    placed = placement_operator(multiplier, constraint, lifted) @ coeff_mat.reshape(-1, order="F")
    y = placed.reshape(lifted.dim, lifted.dim, order="F")
    return 0.5 * (y + y.T)


def polynomial_coefficients(basis: MonomialBasis, gram: np.ndarray) -> np.ndarray:
    """Coefficient vector of [x]^T S [x] in the basis of degree 2k"""
    return gram_operator(basis) @ np.asarray(gram, dtype=float).reshape(-1, order="F")
