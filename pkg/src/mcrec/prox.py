"""The logdet rank surrogate and its proximal operator.

The surrogate of a matrix ``X`` is ``sum_i log(1 + sigma_i(X))``. Because it
only depends on the singular values, its proximal operator reduces to one
scalar problem per singular value::

    argmin_{s >= 0}  log(1 + s) + beta/2 * (s - s_a)**2
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg

#: Shrunk singular values below this are set to exactly zero.
FLUSH_EPS = 1e-12


@dataclass(frozen=True)
class SingularSpectrum:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("singular values must be a 1-d sequence")
        if np.any(v < 0):
            raise ValueError("singular values must be nonnegative")
        if np.any(np.diff(v) > 0):
            raise ValueError("singular values must be nonincreasing")
        object.__setattr__(self, "values", v)

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.values))

    def surrogate(self) -> float:
        return float(np.sum(np.log1p(self.values)))


@dataclass(frozen=True)
class ScalarProxProblem:
    sigma_a: float
    beta: float

    def __post_init__(self):
        if not self.sigma_a >= 0:
            raise ValueError(f"sigma_a must be >= 0, got {self.sigma_a}")
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")

    def objective(self, sigma):
        return np.log1p(sigma) + 0.5 * self.beta * (sigma - self.sigma_a) ** 2


def logdet_objective(x: np.ndarray) -> float:
    """``log det((X^T X)^{1/2} + I)``, computed from the singular values."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("matrix has non-finite entries")
    if x.size == 0:
        return 0.0
    s = np.linalg.svd(x, compute_uv=False)
    return float(np.sum(np.log1p(s)))


def nuclear_norm(x: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(np.asarray(x, dtype=float), compute_uv=False)))


def shrink(sigma_a, beta: float) -> np.ndarray:
    """Vectorised scalar prox over an array of nonnegative ``sigma_a``.

    Stationary points solve ``beta*s**2 + beta*(1 - s_a)*s + (1 - beta*s_a) = 0``.
    The minimiser is picked among ``{0}`` and the nonnegative real roots by
    comparing objective values; exact ties go to the smaller candidate.
    """
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    sa = np.asarray(sigma_a, dtype=float)

    def f(s):
        return np.log1p(s) + 0.5 * beta * (s - sa) ** 2

    disc = (1.0 + sa) ** 2 - 4.0 / beta
    real = disc >= 0
    sq = np.sqrt(np.where(real, disc, 0.0))
    lo = 0.5 * (sa - 1.0 - sq)
    hi = 0.5 * (sa - 1.0 + sq)

    best = np.zeros_like(sa)
    best_f = f(best)
    # ascending candidate order, strict improvement keeps the smaller one on ties
    for root in (lo, hi):
        ok = real & (root >= 0)
        cand = np.where(ok, root, 0.0)
        fc = f(cand)
        better = ok & (fc < best_f)
        best = np.where(better, cand, best)
        best_f = np.where(better, fc, best_f)

    best[best < FLUSH_EPS] = 0.0
    return best


def scalar_prox(p: ScalarProxProblem | float, beta: float | None = None) -> float:
    """Minimiser of ``log(1+s) + beta/2 (s - sigma_a)^2`` over ``s >= 0``.

    Accepts either a :class:`ScalarProxProblem` or ``(sigma_a, beta)``.
    """
    if not isinstance(p, ScalarProxProblem):
        p = ScalarProxProblem(float(p), float(beta))
    return float(shrink(np.array([p.sigma_a]), p.beta)[0])


def matrix_prox(
    a: np.ndarray,
    beta: float,
    rank_budget: int | None = None,
    return_spectrum: bool = False,
):
    """Proximal operator of the logdet surrogate at ``a`` with weight ``beta``.

    Returns ``U diag(shrink(sigma)) V^T`` where ``a = U diag(sigma) V^T``.
    For matrices with ``min(m, n)`` above :data:`linalg.FULL_SVD_LIMIT` the
    SVD is partial: starting from ``rank_budget`` (default 64) triplets, the
    budget doubles until the smallest computed value shrinks to zero.
    """
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")

    p = min(a.shape)
    if p <= linalg.FULL_SVD_LIMIT:
        u, s, vt = linalg.full_svd(a)
        shrunk = shrink(s, beta)
    else:
        k = min(rank_budget or 64, p)
        while True:
            u, s, vt = linalg.partial_svd(a, k)
            shrunk = shrink(s, beta)
            if shrunk[-1] == 0.0 or k >= p:
                break
            k = min(2 * k, p)

    keep = shrunk > 0
    out = (u[:, keep] * shrunk[keep]) @ vt[keep]
    if return_spectrum:
        return out, SingularSpectrum(shrunk)
    return out
