"""Symmetric eigenvalues, singular values and threshold counting."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DataError, ParameterError

__all__ = [
    "symmetrize",
    "symmetric_eigenvalues",
    "singular_values_symmetric",
    "top_singular_value",
    "count_above_threshold",
]

ASYMMETRY_TOL = 1e-6


def symmetrize(M) -> np.ndarray:
    """Return ``(M + M^T) / 2`` after checking M is square, finite and nearly symmetric.

    Asymmetry above ``1e-6 * ||M||_F`` is an input error, not noise.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DataError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DataError("matrix has non-finite entries")
    skew = np.linalg.norm(M - M.T)
    if skew > ASYMMETRY_TOL * np.linalg.norm(M):
        raise DataError(f"matrix is not symmetric (||M - M^T||_F = {skew:.3g})")
    return 0.5 * (M + M.T)


def symmetric_eigenvalues(M, debug: bool = False) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, sorted descending.

    With ``debug=True`` the eigenvectors are computed as well and the
    reconstruction ``||Q diag(w) Q^T - M||_F <= 1e-9 (1 + ||M||_F)`` is
    asserted.
    """
    S = symmetrize(M)
    if S.size == 0:
        return np.empty(0)
    if debug:
        w, Q = np.linalg.eigh(S)
        err = np.linalg.norm((Q * w) @ Q.T - S)
        if err > 1e-9 * (1.0 + np.linalg.norm(S)):
            raise ArithmeticError(f"eigendecomposition reconstruction error {err:.3g}")
    else:
        w = np.linalg.eigvalsh(S)
    return w[::-1].copy()


def singular_values_symmetric(M, debug: bool = False) -> np.ndarray:
    """Singular values of a symmetric matrix (absolute eigenvalues), descending."""
    s = np.abs(symmetric_eigenvalues(M, debug=debug))
    return np.sort(s)[::-1]


def top_singular_value(M) -> float:
    """Largest singular value of a symmetric matrix from its two extreme eigenvalues."""
    S = symmetrize(M)
    n = S.shape[0]
    if n == 0:
        return 0.0
    lo = scipy.linalg.eigvalsh(S, subset_by_index=[0, 0])[0]
    hi = scipy.linalg.eigvalsh(S, subset_by_index=[n - 1, n - 1])[0]
    return float(max(abs(lo), abs(hi)))


def count_above_threshold(spectrum, theta: float) -> int:
    """Number of singular values strictly greater than ``theta``."""
    if not np.isfinite(theta) or theta < 0:
        raise ParameterError("threshold must be finite and >= 0")
    s = np.asarray(spectrum, dtype=np.float64)
    return int(np.count_nonzero(s > theta))
