"""Matrix completion by minimising the logdet surrogate under interpolation
and nonnegativity constraints, solved with an augmented Lagrangian scheme.

With ``Y`` a nonnegative copy of ``X`` and ``Z`` the multiplier of ``X = Y``,
each iteration does::

    X <- P_unobs(prox(Y - Z/mu, mu)) + P_obs(M)
    Y <- max(X + Z/mu, 0)
    Z <- Z + mu (X - Y)
    mu <- gamma mu
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .data import RatingMatrix
from .prox import matrix_prox

log = logging.getLogger(__name__)

MU_MAX = 1e10
MAX_ENTRIES = 2**28


class ConfigError(ValueError):
    pass


class CapacityError(MemoryError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    mu0: float = 1e-3
    gamma: float = 1.1
    max_iter: int = 300
    tol: float = 1e-4
    svd_rank_budget: int | None = None
    mu_max: float = MU_MAX
    max_entries: int = MAX_ENTRIES

    def __post_init__(self):
        if not self.mu0 > 0:
            raise ConfigError(f"mu0 must be > 0, got {self.mu0}")
        if not self.gamma > 1:
            raise ConfigError(f"gamma must be > 1, got {self.gamma}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigError(f"max_iter must be a positive integer, got {self.max_iter}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be > 0, got {self.tol}")
        if self.svd_rank_budget is not None and self.svd_rank_budget < 1:
            raise ConfigError("svd_rank_budget must be positive")
        if not self.mu_max >= self.mu0:
            raise ConfigError("mu_max must be >= mu0")

    def mu_at(self, t: int) -> float:
        """Penalty at iteration ``t`` (0-based): ``mu0 * gamma**t``, capped."""
        if t * math.log(self.gamma) >= math.log(self.mu_max / self.mu0):
            return self.mu_max
        return min(self.mu0 * self.gamma**t, self.mu_max)


#: Published tuned parameters of the completion method per dataset.
PRESETS: dict[str, dict] = {
    "delicious": {"mu0": 250.0, "gamma": 4.0},
    "lastfm": {"mu0": 0.03, "gamma": 1.5},
    "bx": {"mu0": 1.2e-3, "gamma": 1.3},
    "ml100k": {"mu0": 6e-3, "gamma": 2.5},
    "netflix": {"mu0": 0.015, "gamma": 1.2},
    "yahoo": {"mu0": 5e-3, "gamma": 1.1},
}


@dataclass
class SolverState:
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    mu: float
    iter: int = 0


@dataclass
class SolverReport:
    iterations: int
    converged: bool
    final_residual: float
    objective_trace: list[float] = field(default_factory=list)
    wall_time: float = 0.0
    final_mu: float = 0.0
    rank: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def initial_state(m: RatingMatrix, cfg: SolverConfig) -> SolverState:
    """``Y = P_obs(M)``, ``Z = 0``."""
    y = m.to_dense()
    return SolverState(X=y.copy(), Y=y, Z=np.zeros_like(y), mu=cfg.mu0)


def _x_step(state: SolverState, m: RatingMatrix, rank_budget=None):
    w, spectrum = matrix_prox(
        state.Y - state.Z / state.mu, state.mu, rank_budget=rank_budget, return_spectrum=True
    )
    x = w.copy()
    x[m.users, m.items] = m.values
    return x, w, spectrum


def x_step(state: SolverState, m: RatingMatrix) -> np.ndarray:
    """Proximal step on ``Y - Z/mu`` followed by resetting the observed entries."""
    return _x_step(state, m)[0]


def y_step(x: np.ndarray, z: np.ndarray, mu: float) -> np.ndarray:
    """Projection of ``X + Z/mu`` onto the nonnegative orthant."""
    if x.shape != z.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {z.shape}")
    if not mu > 0:
        raise ValueError("mu must be > 0")
    return np.maximum(x + z / mu, 0.0)


def check_capacity(m: RatingMatrix, cfg: SolverConfig):
    entries = m.num_users * m.num_items
    if entries > cfg.max_entries:
        raise CapacityError(
            f"{m.num_users}x{m.num_items} = {entries} dense entries exceeds the limit of "
            f"{cfg.max_entries}; raise max_entries to override"
        )


def complete(
    m: RatingMatrix,
    cfg: SolverConfig | None = None,
    callback: Callable[[SolverState, dict], None] | None = None,
) -> tuple[np.ndarray, SolverReport]:
    """Fill in the unobserved entries of ``m``.

    Stops once ``max(|X - Y|, |X - X_prev|, |P_obs(W - M)|)`` (max-abs norms)
    drops to ``cfg.tol``, where ``W`` is the low-rank proximal iterate before
    the observed entries are reset. ``callback(state, record)`` is invoked
    after every iteration; ``record`` holds ``iter, mu, residual, objective,
    rank``.

    Returns the final ``X`` with negative entries clamped to zero, and a
    :class:`SolverReport`. Hitting ``max_iter`` is reported, not raised.
    """
    cfg = cfg or SolverConfig()
    if m.nnz == 0:
        raise ValueError("cannot complete an empty matrix")
    check_capacity(m, cfg)

    t0 = time.perf_counter()
    state = initial_state(m, cfg)
    obs_norm = max(1.0, float(np.linalg.norm(m.values)))
    trace: list[float] = []
    x_prev = state.Y
    converged = False
    rank = 0
    fully_observed = m.nnz == m.num_users * m.num_items

    for t in range(cfg.max_iter):
        state.mu = cfg.mu_at(t)
        x, w, spectrum = _x_step(state, m, cfg.svd_rank_budget)
        y = y_step(x, state.Z, state.mu)
        state.Z = state.Z + state.mu * (x - y)
        state.X, state.Y, state.iter = x, y, t + 1

        feas = float(np.max(np.abs(x - y)))
        change = float(np.max(np.abs(x - x_prev)))
        gap = float(np.max(np.abs(w[m.users, m.items] - m.values)))
        rank = spectrum.rank
        trace.append(spectrum.surrogate())
        record = {
            "iter": t + 1,
            "mu": state.mu,
            "residual": float(np.linalg.norm(x - y)) / obs_norm,
            "objective": trace[-1],
            "rank": rank,
        }
        if callback is not None:
            callback(state, record)
        log.debug("iter %d mu=%.3g feas=%.2e change=%.2e gap=%.2e rank=%d",
                  t + 1, state.mu, feas, change, gap, rank)

        # nothing to fill in: X is pinned to M from the first step
        if fully_observed or max(feas, change, gap) <= cfg.tol:
            converged = True
            break
        x_prev = x

    x_hat = np.maximum(state.X, 0.0)
    report = SolverReport(
        iterations=state.iter,
        converged=converged,
        final_residual=float(np.linalg.norm(state.X - state.Y)) / obs_norm,
        objective_trace=trace,
        wall_time=time.perf_counter() - t0,
        final_mu=state.mu,
        rank=rank,
    )
    if not converged:
        log.warning("no convergence after %d iterations (residual %.3g)",
                    report.iterations, report.final_residual)
    return x_hat, report
