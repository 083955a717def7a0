"""Top-N ranking of a score matrix and reconstruction diagnostics."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .data import RatingMatrix

NONZERO_EPS = 1e-8


@dataclass(frozen=True)
class RankedList:
    user: int
    items: tuple[tuple[int, float], ...]

    @property
    def item_ids(self) -> list[int]:
        return [i for i, _ in self.items]

    def __len__(self):
        return len(self.items)


def _rank_row(row: np.ndarray, seen: np.ndarray, n_list: int) -> np.ndarray:
    cand = np.ones(row.size, dtype=bool)
    cand[seen] = False
    idx = np.flatnonzero(cand)
    # stable sort keeps ascending item index among equal scores
    order = np.argsort(-row[idx], kind="stable")
    return idx[order[:n_list]]


def top_n(x_hat: np.ndarray, train: RatingMatrix, user: int, n_list: int) -> RankedList:
    """Highest-scoring items the user has not interacted with in ``train``."""
    if x_hat.shape != train.shape:
        raise ValueError(f"score matrix {x_hat.shape} does not match data {train.shape}")
    if not 0 <= user < train.num_users:
        raise IndexError(f"user {user} out of range [0, {train.num_users})")
    if n_list < 1:
        raise ValueError("n_list must be positive")
    row = x_hat[user]
    picked = _rank_row(row, train.user_items(user), n_list)
    return RankedList(user, tuple((int(i), float(row[i])) for i in picked))


def rank_users(x_hat: np.ndarray, train: RatingMatrix, users, n_list: int) -> dict[int, RankedList]:
    return {int(u): top_n(x_hat, train, int(u), n_list) for u in users}


def export_rankings(lists, stream, train: RatingMatrix | None = None):
    """CSV with columns ``user_id, rank, item_id, score`` (1-based rank).

    With ``train`` given, internal indices are translated to external ids.
    """
    w = csv.writer(stream)
    w.writerow(["user_id", "rank", "item_id", "score"])
    for rl in lists:
        uid = rl.user if train is None else train.user_ids[rl.user]
        for pos, (item, score) in enumerate(rl.items, start=1):
            iid = item if train is None else train.item_ids[item]
            w.writerow([uid, pos, iid, repr(score)])


@dataclass(frozen=True)
class ReconStats:
    recovered_density: float
    mean_recovered: float
    mean_preserved: float


def reconstruction_stats(x_hat: np.ndarray, train: RatingMatrix) -> ReconStats:
    """Summaries over the unobserved and observed parts of ``x_hat``.

    ``recovered_density`` is the fraction of unobserved entries above
    :data:`NONZERO_EPS`; ``mean_recovered`` averages all unobserved entries.
    """
    if x_hat.shape != train.shape:
        raise ValueError(f"score matrix {x_hat.shape} does not match data {train.shape}")
    obs = train.mask()
    hidden = x_hat[~obs]
    kept = x_hat[obs]
    return ReconStats(
        recovered_density=float(np.mean(hidden > NONZERO_EPS)) if hidden.size else 0.0,
        mean_recovered=float(hidden.mean()) if hidden.size else 0.0,
        mean_preserved=float(kept.mean()) if kept.size else 0.0,
    )
