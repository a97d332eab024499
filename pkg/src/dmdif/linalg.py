"""
Dense linear-algebra kernels for desk-scale problems.

Matrices are plain 2-D ``numpy`` arrays; every routine here is deterministic
and free of randomized algorithms.
"""

from typing import NamedTuple

import numpy as np


#: eigenvalues at or below ``RANK_TOL * lambda_max`` count as zero
RANK_TOL = 1e-10


class SymEigen(NamedTuple):
    """Eigen-decomposition of a symmetric matrix, ``m = Q diag(w) Q^T``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_matrix(m):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def matvec(m, v):
    """Matrix-vector product with a dimension check."""
    m = _as_matrix(m)
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != m.shape[1]:
        raise ValueError(
            f"dimension mismatch: matrix is {m.shape}, vector has shape {v.shape}")
    return m @ v


def sym_eigen(m, sym_tol=1e-12):
    """
    Eigenpairs of a symmetric matrix, eigenvalues ascending.

    Parameters
    ----------
    m : array_like
        Square matrix, symmetric up to ``sym_tol`` (relative to its largest
        entry).
    sym_tol : float, optional
        Symmetry tolerance.

    Returns
    -------
    SymEigen
        Ascending eigenvalues and orthonormal eigenvectors (as columns).
    """
    m = _as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if np.max(np.abs(m - m.T), initial=0.0) > sym_tol * scale:
        raise ValueError("matrix is not symmetric")
    w, q = np.linalg.eigh(m)
    return SymEigen(w, q)


def min_norm_lstsq(a, b):
    """
    Minimum-norm least-squares solution ``pinv(a) @ b``.

    When ``a.T @ a`` is nonsingular this is the unique minimizer of
    ``0.5 * ||a x - b||^2``.
    """
    a = _as_matrix(a)
    b = np.asarray(b, dtype=float)
    if b.ndim != 1 or b.shape[0] != a.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix is {a.shape}, rhs has shape {b.shape}")
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    return x


def pinv_psd(m, tol=RANK_TOL):
    """
    Moore-Penrose pseudo-inverse of a symmetric positive semi-definite matrix.

    Eigenvalues above ``tol * lambda_max`` are inverted, the rest are zeroed.
    A negative eigenvalue below ``-tol * max(1, lambda_max)`` means the input
    is not PSD and raises ``ValueError``.
    """
    w, q = sym_eigen(m)
    top = float(w[-1]) if w.size else 0.0
    if w.size and w[0] < -tol * max(1.0, abs(top)):
        raise ValueError(f"matrix is not positive semi-definite (min eigenvalue {w[0]:.3e})")
    keep = w > tol * top if top > 0 else np.zeros_like(w, dtype=bool)
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    return (q * inv) @ q.T
