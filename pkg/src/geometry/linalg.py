"""
Vectorization and small matrix helpers.

vec() stacks columns (column-major / Fortran order) throughout the library.
"""
import numpy as np


def vec(m: np.ndarray) -> np.ndarray:
    """Stack the columns of a matrix into a vector"""
    return np.asarray(m, dtype=float).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int) -> np.ndarray:
    """Inverse of vec() for a matrix with the given number of rows"""
    v = np.asarray(v, dtype=float)
    return v.reshape(rows, -1, order="F")


def skew(w: np.ndarray) -> np.ndarray:
    """Cross-product matrix: skew(w) @ v == np.cross(w, v)"""
    w = np.asarray(w, dtype=float)
    return np.array([
        [0.0, -w[2], w[1]],
        [w[2], 0.0, -w[0]],
        [-w[1], w[0], 0.0],
    ])


def sym(m: np.ndarray) -> np.ndarray:
    """Symmetric part (M + M^T) / 2"""
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)


def kron_vec_operator(b: np.ndarray, m: np.ndarray) -> np.ndarray:
    """
    Operator L with L @ vec(R) == vec(M R b) == M R b

    Args:
        b: 3-vector
        m: k x 3 matrix

    Returns:
        k x 9 matrix (b^T kron M)
    """
    b = np.asarray(b, dtype=float).reshape(1, -1)
    return np.kron(b, np.asarray(m, dtype=float))


def psd_clip(m: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """
    Symmetrize and clip slightly negative eigenvalues to zero

    Raises ValueError when an eigenvalue is below -tol (relative to the largest).
    """
    s = sym(m)
    w, v = np.linalg.eigh(s)
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    if w.size and w.min() < -tol * scale:
        raise ValueError(f"matrix is not PSD (min eigenvalue {w.min():.3e})")
    w = np.clip(w, 0.0, None)
    return sym((v * w) @ v.T)
