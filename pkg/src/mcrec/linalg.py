"""SVD backends shared by the proximal step and the PureSVD baseline."""
from __future__ import annotations

import numpy as np
from scipy.sparse.linalg import svds

#: Above this ``min(m, n)`` a partial (Lanczos) SVD is used instead of LAPACK.
FULL_SVD_LIMIT = 2000


def full_svd(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD with singular values in nonincreasing order."""
    return np.linalg.svd(a, full_matrices=False)


def partial_svd(a: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Leading ``k`` singular triplets, sorted nonincreasing.

    ARPACK is started from a fixed vector so repeated calls on the same
    input give the same result.
    """
    p = min(a.shape)
    if k >= p - 1:
        # ARPACK needs k < min(m, n)
        u, s, vt = full_svd(a)
        return u[:, :k], s[:k], vt[:k]
    v0 = np.full(p, 1.0 / np.sqrt(p))
    u, s, vt = svds(a, k=k, v0=v0, solver="arpack")
    order = np.argsort(s)[::-1]
    return u[:, order], s[order], vt[order]


def truncated_svd(a: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rank-``k`` truncation, choosing the backend by matrix size."""
    if min(a.shape) <= FULL_SVD_LIMIT:
        u, s, vt = full_svd(a)
        return u[:, :k], s[:k], vt[:k]
    return partial_svd(a, k)
