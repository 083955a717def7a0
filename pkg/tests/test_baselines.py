import numpy as np
import pytest

from mcrec.baselines import cosine_similarity, item_similarity, itemknn_scores, puresvd_scores
from mcrec.data import RatingMatrix, from_dense


def test_puresvd_full_rank_identity():
    a = np.random.default_rng(0).random((6, 4)) + 0.1
    assert np.allclose(puresvd_scores(from_dense(a), 4), a, atol=1e-10)


def test_puresvd_rank_one_exact():
    rng = np.random.default_rng(1)
    a = np.outer(rng.random(5) + 0.1, rng.random(7) + 0.1)
    assert np.allclose(puresvd_scores(from_dense(a), 1), a, atol=1e-10)


def test_puresvd_error_nonincreasing():
    rng = np.random.default_rng(2)
    a = (rng.random((20, 15)) < 0.3) * rng.integers(1, 6, (20, 15)).astype(float)
    m = from_dense(a)
    errs = [np.linalg.norm(puresvd_scores(m, k) - a) for k in range(1, 16)]
    assert all(x >= y - 1e-9 for x, y in zip(errs, errs[1:]))


def test_puresvd_rank_range():
    with pytest.raises(ValueError):
        puresvd_scores(from_dense(np.ones((3, 2))), 3)


def test_identical_columns():
    a = np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 0.0, 3.0]])
    sim = cosine_similarity(from_dense(a))
    assert sim[0, 1] == pytest.approx(1.0)


def test_orthogonal_columns():
    a = np.array([[1.0, 0.0], [0.0, 1.0]])
    sim = cosine_similarity(from_dense(a))
    assert sim[0, 1] == 0.0
    scores = itemknn_scores(from_dense(a), 1)
    assert scores[0, 1] == 0.0 and scores[1, 0] == 0.0


def test_similarity_properties():
    rng = np.random.default_rng(3)
    a = (rng.random((25, 12)) < 0.4) * rng.integers(1, 6, (25, 12)).astype(float)
    a[0] = 1.0
    m = from_dense(a)
    sim = cosine_similarity(m)
    assert np.allclose(sim, sim.T)
    assert sim.min() >= 0 and sim.max() <= 1 + 1e-12
    assert np.all(np.diag(sim) == 0)
    model = item_similarity(m, 3)
    w = model.weights.toarray()
    assert np.all(np.diag(w) == 0)
    assert np.all((w > 0).sum(axis=1) <= 3)
    assert w.min() >= 0
    for j in range(12):
        kept = model.neighbours(j)
        others = [sim[j, i] for i in range(12) if i != j and i not in kept]
        if kept and others:
            assert min(kept.values()) >= max(others)


def test_itemknn_score_is_sum_over_user_items():
    rng = np.random.default_rng(4)
    a = (rng.random((10, 8)) < 0.5).astype(float)
    a[:, 0] = 1.0
    m = from_dense(a)
    k = 3
    w = item_similarity(m, k).weights.toarray()
    scores = itemknn_scores(m, k)
    for u in range(10):
        for c in range(8):
            expected = sum(w[j, c] for j in range(8) if a[u, j] > 0)
            assert scores[u, c] == pytest.approx(expected)
