import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcrec.data import (
    DataError,
    RatingMatrix,
    dataset_stats,
    load_triplets,
    make_folds,
    write_triplets,
)


def stream(text: str):
    return io.BytesIO(text.encode())


def test_parse_movielens_line():
    m = load_triplets(stream("196\t242\t3\t881250949\n"), "tsv-rating")
    assert m.shape == (1, 1)
    assert m.user_ids.tolist() == [196] and m.item_ids.tolist() == [242]
    assert m.values.tolist() == [3.0]


def test_binary_format_and_commas():
    m = load_triplets(stream("5,9\n5,7\n2,9\n"), "tsv-binary")
    assert m.shape == (2, 2)
    assert m.values.tolist() == [1.0, 1.0, 1.0]
    # internal indices follow ascending external id
    assert m.user_ids.tolist() == [2, 5] and m.item_ids.tolist() == [7, 9]
    assert m.to_dense().tolist() == [[0, 1], [1, 1]]


def test_explicit_delimiter():
    m = load_triplets(stream("1;2;4.5\n"), "tsv-rating", delimiter=";")
    assert m.values.tolist() == [4.5]


def test_empty_stream():
    with pytest.raises(DataError, match="no records"):
        load_triplets(stream(""))


def test_duplicate_pair():
    with pytest.raises(DataError, match="duplicate"):
        load_triplets(stream("1\t2\t3\n1\t2\t4\n"))


def test_malformed_line_number():
    with pytest.raises(DataError, match="line 2"):
        load_triplets(stream("1\t2\t3\n1\tx\t3\n"))
    with pytest.raises(DataError, match="line 1"):
        load_triplets(stream("1\n"), "tsv-binary")


def test_nonpositive_rating():
    with pytest.raises(DataError, match="non-positive"):
        load_triplets(stream("1\t2\t0\n"))


def test_matrix_invariants():
    with pytest.raises(DataError):
        RatingMatrix(2, 2, [0, 2], [0, 0], [1, 1])
    with pytest.raises(DataError):
        RatingMatrix(2, 2, [0], [0], [-1.0])
    m = RatingMatrix(2, 2, [1, 0], [0, 1], [2.0, 3.0])
    with pytest.raises(ValueError):
        m.values[0] = 5.0


@st.composite
def triplets(draw):
    n = draw(st.integers(1, 30))
    users = draw(st.lists(st.integers(0, 10**6), min_size=n, max_size=n))
    items = draw(st.lists(st.integers(0, 10**6), min_size=n, max_size=n))
    pairs = sorted(set(zip(users, items)))
    vals = draw(st.lists(st.floats(0.5, 10, allow_nan=False), min_size=len(pairs), max_size=len(pairs)))
    return pairs, vals


@settings(max_examples=100, deadline=None)
@given(triplets())
def test_round_trip(data):
    pairs, vals = data
    text = "".join(f"{u}\t{i}\t{v!r}\n" for (u, i), v in zip(pairs, vals))
    m = load_triplets(stream(text))
    buf = io.StringIO()
    write_triplets(m, buf)
    assert load_triplets(io.StringIO(buf.getvalue())) == m


def test_stats_small():
    s = dataset_stats(RatingMatrix(1, 1, [0], [0], [1.0]))
    assert (s.density, s.rsize, s.csize) == (1.0, 1.0, 1.0)
    assert dataset_stats(RatingMatrix(2, 2, [0], [1], [3.0])).density == 0.25


def test_stats_brute_force():
    rng = np.random.default_rng(0)
    dense = (rng.random((13, 17)) < 0.3) * rng.integers(1, 6, (13, 17))
    dense[0, 0] = 1
    users, items = np.nonzero(dense)
    m = RatingMatrix(13, 17, users, items, dense[users, items])
    s = dataset_stats(m)
    count = sum(1 for x in dense.ravel() if x)
    assert s.transactions == count
    assert s.density == count / (13 * 17)
    assert 0 < s.density <= 1
    assert s.rsize == count / 13 and s.csize == count / 17


def test_stats_ml100k_table_row(ml100k_path):
    s = dataset_stats(load_triplets(ml100k_path))
    assert (s.users, s.items, s.transactions) == (943, 1682, 100000)
    row = s.to_dict("ML100K")
    assert row["rsize"] == 106.04 and row["csize"] == 59.45 and row["density"] == "6.30%"


def _matrix(rng, m=20, n=15, p=0.3):
    dense = (rng.random((m, n)) < p) * rng.integers(1, 6, (m, n)).astype(float)
    users, items = np.nonzero(dense)
    return RatingMatrix(m, n, users, items, dense[users, items])


def test_folds_partition():
    m = _matrix(np.random.default_rng(1))
    counts = m.row_counts()
    for fold in make_folds(m, 5, seed=7):
        assert fold.train.nnz + len(fold.test) == m.nnz
        obs, tr = m.mask(), fold.train.mask()
        for u, i in fold.test.items():
            assert obs[u, i] and not tr[u, i]
        assert set(fold.test) == set(np.flatnonzero(counts >= 2))
        merged = tr.copy()
        for u, i in fold.test.items():
            merged[u, i] = True
        assert np.array_equal(merged, obs)


def test_single_entry_user_untested():
    m = RatingMatrix(2, 6, [0, 1, 1, 1, 1, 1], [3, 0, 1, 2, 3, 4], [1.0] * 6)
    for fold in make_folds(m, 3, seed=0):
        assert 0 not in fold.test
        assert list(fold.train.user_items(0)) == [3]
        assert len(fold.train.user_items(1)) == 4


def test_folds_deterministic():
    m = _matrix(np.random.default_rng(2))
    a = make_folds(m, 5, seed=11)
    b = make_folds(m, 5, seed=11)
    assert [f.test for f in a] == [f.test for f in b]
    assert all(x.train == y.train for x, y in zip(a, b))
    # a fold is reproducible on its own
    assert make_folds(m, 2, seed=11)[1].test == a[1].test
    assert a[0].test != a[1].test


def test_folds_reject_k():
    with pytest.raises(DataError):
        make_folds(_matrix(np.random.default_rng(3)), 0)
