"""Hit rate, ARHR and the leave-one-out cross-validation harness."""
from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import baselines
from .data import FoldSplit, RatingMatrix, make_folds
from .recommend import RankedList, top_n
from .solver import SolverConfig, complete

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HitRecord:
    user: int
    position: int | None  # 1-based, None for a miss

    @property
    def hit(self) -> bool:
        return self.position is not None


def hit_records(lists: Mapping[int, RankedList], test: Mapping[int, int]) -> list[HitRecord]:
    out = []
    for user in sorted(test):
        if user not in lists:
            raise KeyError(f"test user {user} has no ranked list")
        ids = lists[user].item_ids
        item = test[user]
        out.append(HitRecord(user, ids.index(item) + 1 if item in ids else None))
    return out


def _as_mapping(lists) -> Mapping[int, RankedList]:
    if isinstance(lists, Mapping):
        return lists
    return {rl.user: rl for rl in lists}


def hit_rate(lists, test: Mapping[int, int]) -> float:
    """``#hits / #users`` over the users that have a test item."""
    recs = hit_records(_as_mapping(lists), test)
    if not recs:
        return 0.0
    return sum(r.hit for r in recs) / len(recs)


def arhr(lists, test: Mapping[int, int]) -> float:
    """``(1/#users) * sum over hits of 1/position``."""
    recs = hit_records(_as_mapping(lists), test)
    if not recs:
        return 0.0
    return sum(1.0 / r.position for r in recs if r.hit) / len(recs)


# Scoring strategies: train matrix + params -> (dense score matrix, info dict)
Scorer = Callable[..., tuple[np.ndarray, dict]]


def _logdet(train: RatingMatrix, **params):
    x_hat, report = complete(train, SolverConfig(**params))
    return x_hat, {"iterations": report.iterations, "converged": report.converged}


def _puresvd(train: RatingMatrix, rank: int):
    return baselines.puresvd_scores(train, rank), {}


def _itemknn(train: RatingMatrix, k: int):
    return baselines.itemknn_scores(train, k), {}


METHODS: dict[str, Scorer] = {"logdet": _logdet, "puresvd": _puresvd, "itemknn": _itemknn}


@dataclass
class FoldResult:
    fold: int
    n_list: int
    hr: float
    arhr: float
    n_users: int
    iterations: int | None = None
    wall_time: float = 0.0


@dataclass
class EvalReport:
    method: str
    params: dict
    n_list: int
    per_fold: list[FoldResult] = field(default_factory=list)

    @property
    def mean_hr(self) -> float:
        return float(np.mean([f.hr for f in self.per_fold]))

    @property
    def mean_arhr(self) -> float:
        return float(np.mean([f.arhr for f in self.per_fold]))

    @property
    def n_users_evaluated(self) -> int:
        return max((f.n_users for f in self.per_fold), default=0)

    @property
    def wall_time(self) -> float:
        return float(sum(f.wall_time for f in self.per_fold))

    @property
    def mean_iterations(self) -> float | None:
        its = [f.iterations for f in self.per_fold if f.iterations is not None]
        return float(np.mean(its)) if its else None

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "params": self.params,
            "n_list": self.n_list,
            "per_fold": [asdict(f) for f in self.per_fold],
            "mean_hr": self.mean_hr,
            "mean_arhr": self.mean_arhr,
            "n_users_evaluated": self.n_users_evaluated,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def table_row(self) -> dict:
        """One row shaped like the usual method comparison table."""
        params = " ".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}"
                          for k, v in self.params.items())
        return {"method": self.method, "params": params,
                "HR": round(self.mean_hr, 4), "ARHR": round(self.mean_arhr, 4)}


def evaluate_scores(scores: np.ndarray, fold: FoldSplit, n_values: Sequence[int]):
    """HR and ARHR of one score matrix on one fold, for each list length.

    The longest list is ranked once; shorter ones are its prefixes.
    """
    n_max = max(n_values)
    lists = {u: top_n(scores, fold.train, u, n_max) for u in fold.test}
    out = {}
    for n in n_values:
        short = {u: RankedList(u, rl.items[:n]) for u, rl in lists.items()}
        out[n] = (hit_rate(short, fold.test), arhr(short, fold.test))
    return out


def run_cv_multi(
    m: RatingMatrix,
    method: str,
    params: dict | None = None,
    n_values: Sequence[int] = (10,),
    folds: int = 5,
    seed: int = 42,
    jobs: int = 1,
    splits: Sequence[FoldSplit] | None = None,
) -> dict[int, EvalReport]:
    """Cross-validate ``method`` once and report for several list lengths."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {sorted(METHODS)}")
    params = dict(params or {})
    scorer = METHODS[method]
    splits = list(splits) if splits is not None else make_folds(m, folds, seed)

    def one(f: int):
        t0 = time.perf_counter()
        scores, info = scorer(splits[f].train, **params)
        elapsed = time.perf_counter() - t0
        metrics = evaluate_scores(scores, splits[f], n_values)
        log.info("%s fold %d done in %.1fs", method, f, elapsed)
        return [
            FoldResult(f, n, hr, ar, len(splits[f].test), info.get("iterations"), elapsed)
            for n, (hr, ar) in metrics.items()
        ]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, range(len(splits))))
    else:
        results = [one(f) for f in range(len(splits))]

    reports = {n: EvalReport(method, params, n) for n in n_values}
    for fold_results in results:
        for r in fold_results:
            reports[r.n_list].per_fold.append(r)
    return reports


def run_cv(
    m: RatingMatrix,
    method: str,
    params: dict | None = None,
    n_list: int = 10,
    folds: int = 5,
    seed: int = 42,
    jobs: int = 1,
) -> EvalReport:
    return run_cv_multi(m, method, params, (n_list,), folds, seed, jobs)[n_list]
