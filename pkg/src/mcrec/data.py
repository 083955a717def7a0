"""Rating matrices, triplet-file I/O, dataset statistics and CV folds."""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable

import numpy as np

FORMATS = ("tsv-rating", "tsv-binary")


class DataError(ValueError):
    """Raised for malformed or inconsistent rating data."""


def _frozen(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RatingMatrix:
    """Observed user-item entries of an ``m x n`` matrix.

    Entries are sorted by (user, item). ``user_ids`` / ``item_ids`` map dense
    internal indices back to the ids used in the source file.
    """

    num_users: int
    num_items: int
    users: np.ndarray
    items: np.ndarray
    values: np.ndarray
    user_ids: np.ndarray | None = None
    item_ids: np.ndarray | None = None

    def __post_init__(self):
        if self.num_users <= 0 or self.num_items <= 0:
            raise DataError("matrix dimensions must be positive")
        users = np.asarray(self.users, dtype=np.int64)
        items = np.asarray(self.items, dtype=np.int64)
        values = np.asarray(self.values, dtype=float)
        if not (users.shape == items.shape == values.shape) or users.ndim != 1:
            raise DataError("users, items and values must be 1-d and equal length")
        if users.size:
            if users.min() < 0 or users.max() >= self.num_users:
                raise DataError("user index out of range")
            if items.min() < 0 or items.max() >= self.num_items:
                raise DataError("item index out of range")
        if np.any(~(values > 0)):
            raise DataError("stored values must be strictly positive")
        order = np.lexsort((items, users))
        users, items, values = users[order], items[order], values[order]
        dup = (np.diff(users) == 0) & (np.diff(items) == 0)
        if np.any(dup):
            k = int(np.flatnonzero(dup)[0])
            raise DataError(f"duplicate entry (user {users[k]}, item {items[k]})")
        object.__setattr__(self, "users", _frozen(users, np.int64))
        object.__setattr__(self, "items", _frozen(items, np.int64))
        object.__setattr__(self, "values", _frozen(values, float))
        for name, size in (("user_ids", self.num_users), ("item_ids", self.num_items)):
            ids = getattr(self, name)
            ids = np.arange(size) if ids is None else np.asarray(ids)
            if ids.shape != (size,):
                raise DataError(f"{name} must have one id per index")
            object.__setattr__(self, name, _frozen(ids, ids.dtype))

    @property
    def shape(self) -> tuple[int, int]:
        return self.num_users, self.num_items

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.nnz

    def __eq__(self, other):
        if not isinstance(other, RatingMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.users, other.users)
            and np.array_equal(self.items, other.items)
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.user_ids, other.user_ids)
            and np.array_equal(self.item_ids, other.item_ids)
        )

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self.users, self.items] = self.values
        return out

    def mask(self) -> np.ndarray:
        """Boolean matrix of observed locations."""
        out = np.zeros(self.shape, dtype=bool)
        out[self.users, self.items] = True
        return out

    def row_counts(self) -> np.ndarray:
        return np.bincount(self.users, minlength=self.num_users)

    def col_counts(self) -> np.ndarray:
        return np.bincount(self.items, minlength=self.num_items)

    def user_items(self, user: int) -> np.ndarray:
        lo, hi = np.searchsorted(self.users, [user, user + 1])
        return self.items[lo:hi]

    def with_entries(self, users, items, values) -> "RatingMatrix":
        """Same dimensions and id mapping, different entries."""
        return RatingMatrix(
            self.num_users, self.num_items, users, items, values, self.user_ids, self.item_ids
        )

    def id_mapping(self) -> dict:
        return {"users": self.user_ids.tolist(), "items": self.item_ids.tolist()}


def from_dense(a: np.ndarray) -> RatingMatrix:
    a = np.asarray(a, dtype=float)
    users, items = np.nonzero(a)
    return RatingMatrix(a.shape[0], a.shape[1], users, items, a[users, items])


_SPLIT = re.compile(r"[\t,]|\s+")


def _lines(source) -> Iterable[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", errors="replace") as fh:
            yield from fh
        return
    for line in source:
        yield line.decode("utf-8", errors="replace") if isinstance(line, bytes) else line


def load_triplets(
    source: str | os.PathLike | BinaryIO,
    format: str = "tsv-rating",
    delimiter: str | None = None,
) -> RatingMatrix:
    """Read ``user item [value ...]`` records into a :class:`RatingMatrix`.

    ``delimiter=None`` splits on tabs, commas or runs of whitespace. Extra
    columns after the value (timestamps etc.) are ignored. In ``tsv-binary``
    format every record gets value 1. External ids must be integers; internal
    indices follow ascending external id.
    """
    if format not in FORMATS:
        raise DataError(f"unknown format {format!r}; expected one of {FORMATS}")
    need = 3 if format == "tsv-rating" else 2
    raw_u, raw_i, raw_v = [], [], []
    for lineno, line in enumerate(_lines(source), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(delimiter) if delimiter else _SPLIT.split(line)
        if len(fields) < need:
            raise DataError(f"line {lineno}: expected at least {need} fields, got {len(fields)}")
        try:
            u, i = int(fields[0]), int(fields[1])
            v = float(fields[2]) if format == "tsv-rating" else 1.0
        except ValueError:
            raise DataError(f"line {lineno}: cannot parse {line!r}") from None
        if not v > 0:
            raise DataError(f"line {lineno}: non-positive value {v}")
        raw_u.append(u)
        raw_i.append(i)
        raw_v.append(v)
    if not raw_u:
        raise DataError("no records")

    user_ids, users = np.unique(np.array(raw_u, dtype=np.int64), return_inverse=True)
    item_ids, items = np.unique(np.array(raw_i, dtype=np.int64), return_inverse=True)
    return RatingMatrix(len(user_ids), len(item_ids), users, items, raw_v, user_ids, item_ids)


def write_triplets(m: RatingMatrix, stream, format: str = "tsv-rating", delimiter: str = "\t"):
    """Write entries with external ids; inverse of :func:`load_triplets`."""
    if format not in FORMATS:
        raise DataError(f"unknown format {format!r}")
    for u, i, v in zip(m.users, m.items, m.values):
        fields = [str(m.user_ids[u]), str(m.item_ids[i])]
        if format == "tsv-rating":
            fields.append(repr(float(v)))
        stream.write(delimiter.join(fields) + "\n")


def save_id_mapping(m: RatingMatrix, path):
    with open(path, "w") as fh:
        json.dump(m.id_mapping(), fh)


@dataclass(frozen=True)
class DatasetMeta:
    users: int
    items: int
    transactions: int
    rsize: float
    csize: float
    density: float
    rating_range: tuple[float, float] | None = None

    def to_dict(self, name: str | None = None) -> dict:
        """Row with the column names of the usual dataset summary table."""
        row = {} if name is None else {"dataset": name}
        row.update(
            {
                "#users": self.users,
                "#items": self.items,
                "#trns": self.transactions,
                "rsize": round(self.rsize, 2),
                "csize": round(self.csize, 2),
                "density": f"{100 * self.density:.2f}%",
                "ratings": "-" if self.rating_range is None
                else f"{self.rating_range[0]:g}-{self.rating_range[1]:g}",
            }
        )
        return row


def dataset_stats(m: RatingMatrix) -> DatasetMeta:
    if m.nnz == 0:
        raise DataError("empty matrix")
    lo, hi = float(m.values.min()), float(m.values.max())
    binary = lo == hi == 1.0
    return DatasetMeta(
        users=m.num_users,
        items=m.num_items,
        transactions=m.nnz,
        rsize=m.nnz / m.num_users,
        csize=m.nnz / m.num_items,
        density=m.nnz / (m.num_users * m.num_items),
        rating_range=None if binary else (lo, hi),
    )


@dataclass(frozen=True)
class FoldSplit:
    train: RatingMatrix
    test: dict[int, int] = field(default_factory=dict)

    @property
    def test_users(self) -> np.ndarray:
        return np.array(sorted(self.test), dtype=np.int64)


def make_folds(m: RatingMatrix, k: int = 5, seed: int = 42) -> list[FoldSplit]:
    """Per-user leave-one-out splits.

    In each fold every user with at least two entries has one entry, drawn
    uniformly, moved to the test set. Fold ``f`` draws from its own stream
    seeded by ``(seed, f)``, so any fold can be regenerated on its own.
    """
    if k <= 0:
        raise DataError(f"fold count must be positive, got {k}")
    starts = np.searchsorted(m.users, np.arange(m.num_users + 1))
    counts = np.diff(starts)
    eligible = np.flatnonzero(counts >= 2)
    folds = []
    for f in range(k):
        rng = np.random.default_rng([seed, f])
        picks = starts[eligible] + rng.integers(0, counts[eligible])
        keep = np.ones(m.nnz, dtype=bool)
        keep[picks] = False
        train = m.with_entries(m.users[keep], m.items[keep], m.values[keep])
        test = {int(u): int(i) for u, i in zip(m.users[picks], m.items[picks])}
        folds.append(FoldSplit(train, test))
    return folds
