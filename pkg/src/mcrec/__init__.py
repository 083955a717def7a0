"""Top-N recommendation by logdet-regularised matrix completion."""

__version__ = "0.1.0"

from .data import RatingMatrix, dataset_stats, load_triplets, make_folds
from .evaluation import arhr, hit_rate, run_cv
from .prox import logdet_objective, matrix_prox, scalar_prox
from .recommend import rank_users, reconstruction_stats, top_n
from .solver import PRESETS, SolverConfig, complete

__all__ = [
    "RatingMatrix", "load_triplets", "dataset_stats", "make_folds",
    "logdet_objective", "scalar_prox", "matrix_prox",
    "SolverConfig", "PRESETS", "complete",
    "top_n", "rank_users", "reconstruction_stats",
    "hit_rate", "arhr", "run_cv",
]
