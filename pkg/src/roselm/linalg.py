"""Dense linear-algebra kernels shared by the learning modules.

Everything operates on 2-D float64 numpy arrays. Outputs are checked for
finite entries, and matrices that are symmetric by construction are
explicitly symmetrized so that floating-point drift cannot accumulate over
long update chains.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .exceptions import (
    DimensionMismatchError,
    InnerSolveError,
    NotPositiveDefiniteError,
    RankDeficientError,
)

# Above this condition estimate of H^T H the normal-equations route is
# abandoned in favor of an SVD pseudoinverse.
COND_FALLBACK_THRESHOLD = 1e12

__all__ = [
    "COND_FALLBACK_THRESHOLD",
    "as_matrix",
    "left_pseudoinverse",
    "spd_inverse",
    "woodbury_update",
]


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce input to a finite 2-D float64 array.

    1-D input is treated as a single column. Raises DimensionMismatchError
    for higher ranks and ValueError for NaN/Inf entries.
    """
    m = np.asarray(a, dtype=np.float64)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def _symmetrize(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2.0


def left_pseudoinverse(h) -> np.ndarray:
    """Left pseudoinverse of a tall matrix: (H^T H)^-1 H^T.

    Falls back to an SVD pseudoinverse when the condition estimate of
    H^T H exceeds COND_FALLBACK_THRESHOLD, so near-singular Gram matrices
    degrade gracefully instead of amplifying noise.

    Raises RankDeficientError only if even the fallback produces
    non-finite entries.
    """
    h = as_matrix(h, "H")
    n, p = h.shape
    if n < p:
        raise DimensionMismatchError(f"H must have rows >= cols, got {n}x{p}")

    gram = _symmetrize(h.T @ h)
    cond = np.linalg.cond(gram)
    if np.isfinite(cond) and cond <= COND_FALLBACK_THRESHOLD:
        try:
            c, low = scipy.linalg.cho_factor(gram, check_finite=False)
            pinv = scipy.linalg.cho_solve((c, low), h.T, check_finite=False)
        except scipy.linalg.LinAlgError:
            pinv = np.linalg.pinv(h)
    else:
        pinv = np.linalg.pinv(h)

    if not np.all(np.isfinite(pinv)):
        raise RankDeficientError(
            f"pseudoinverse of {n}x{p} matrix has non-finite entries"
        )
    return pinv


def spd_inverse(k) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via Cholesky.

    Raises NotPositiveDefiniteError when the factorization hits a
    non-positive pivot. The result is explicitly symmetrized.
    """
    k = as_matrix(k, "K")
    n, p = k.shape
    if n != p:
        raise DimensionMismatchError(f"K must be square, got {n}x{p}")
    if n > 0 and not np.allclose(k, k.T, atol=1e-10, rtol=0.0):
        raise ValueError("K is not symmetric within 1e-10")

    try:
        c, low = scipy.linalg.cho_factor(k, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    inv = scipy.linalg.cho_solve((c, low), np.eye(n), check_finite=False)
    if not np.all(np.isfinite(inv)):
        raise NotPositiveDefiniteError("inverse has non-finite entries")
    return _symmetrize(inv)


def woodbury_update(p_k, h_next) -> np.ndarray:
    """Rank-k downdate of an inverse Gram matrix for an arriving chunk.

    Computes P - P H^T (I + H P H^T)^-1 H P, i.e. the inverse of
    (K + H^T H) given P = K^-1, without re-inverting the full matrix.
    The result is symmetrized to keep long update chains SPD.

    Raises InnerSolveError when the small inner system is singular,
    which signals corrupted state rather than bad data.
    """
    p_k = as_matrix(p_k, "P")
    h_next = as_matrix(h_next, "H_next")
    n_tilde = p_k.shape[0]
    if p_k.shape[1] != n_tilde:
        raise DimensionMismatchError(f"P must be square, got {p_k.shape}")
    if h_next.shape[1] != n_tilde:
        raise DimensionMismatchError(
            f"H_next has {h_next.shape[1]} cols, expected {n_tilde}"
        )

    ph_t = p_k @ h_next.T
    inner = np.eye(h_next.shape[0]) + h_next @ ph_t
    try:
        solved = scipy.linalg.solve(
            inner, ph_t.T, assume_a="pos", check_finite=False
        )
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise InnerSolveError(str(exc)) from exc

    p_next = _symmetrize(p_k - ph_t @ solved)
    if not np.all(np.isfinite(p_next)):
        raise InnerSolveError("updated P has non-finite entries")
    return p_next
