import numpy as np

from mcrec.data import RatingMatrix, from_dense


def low_rank(rng, m, n, r):
    return rng.random((m, r)) @ rng.random((r, n))


def observe(full: np.ndarray, mask: np.ndarray) -> RatingMatrix:
    return from_dense(np.where(mask, full, 0.0))
