"""Font feature stores, pair datasets, splits, negative sampling, and idf statistics."""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

HEADER_BODY = "header_body"
HEADER_SUBHEADER = "header_subheader"

# conventional width of the font embeddings this package is built around;
# stores infer the actual dimension from their input
DEFAULT_FEATURE_DIM = 768


class FeatureError(ValueError):
    """Raised when a font feature record violates the store invariants."""


class DatasetError(ValueError):
    """Raised when a pair dataset operation receives unusable input."""


class FeatureStore:
    """Immutable index of font feature vectors with a single fixed dimension.

    The dimension is inferred from the first vector and enforced on the rest.
    Vectors must be finite and not all-zero (cosine similarity is undefined
    for zero vectors, so they are rejected at load time rather than patched).
    """

    def __init__(self, fonts: Iterable[tuple[str, Sequence[float]]] = ()):
        ids: list[str] = []
        vectors: list[np.ndarray] = []
        index: dict[str, int] = {}
        dim: int | None = None
        for font_id, raw in fonts:
            vec = np.asarray(raw, dtype=np.float64)
            if vec.ndim != 1:
                raise FeatureError(f"{font_id}: feature vector must be one-dimensional")
            if dim is None:
                dim = int(vec.shape[0])
                if dim == 0:
                    raise FeatureError(f"{font_id}: empty feature vector")
            elif vec.shape[0] != dim:
                raise FeatureError(
                    f"{font_id}: dimension {vec.shape[0]} does not match store dimension {dim}"
                )
            if not np.all(np.isfinite(vec)):
                raise FeatureError(f"{font_id}: non-finite feature entry")
            if not np.any(vec):
                raise FeatureError(f"{font_id}: all-zero feature vector")
            if font_id in index:
                raise FeatureError(f"{font_id}: duplicate font id")
            index[font_id] = len(ids)
            ids.append(font_id)
            vectors.append(vec)
        self._ids = tuple(ids)
        self._index = index
        self._matrix = np.vstack(vectors) if vectors else np.empty((0, 0))
        self._dim = dim
        self._norms = np.linalg.norm(self._matrix, axis=1) if vectors else np.empty(0)

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, font_id: str) -> bool:
        return font_id in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self._ids)

    @property
    def ids(self) -> tuple[str, ...]:
        return self._ids

    @property
    def dim(self) -> int | None:
        """Feature dimension, or None for an empty store."""
        return self._dim

    @property
    def matrix(self) -> np.ndarray:
        """Row-per-font feature matrix in insertion order (do not mutate)."""
        return self._matrix

    @property
    def norms(self) -> np.ndarray:
        return self._norms

    def vector(self, font_id: str) -> np.ndarray:
        try:
            return self._matrix[self._index[font_id]]
        except KeyError:
            raise KeyError(f"unknown font id: {font_id}") from None

    def row(self, font_id: str) -> int:
        return self._index[font_id]


def load_features(source: str | Path) -> FeatureStore:
    """Load a feature file: ``font_id <tab> v1,v2,...,vD`` per line, ``#`` comments."""

    def parse(path: Path) -> Iterator[tuple[str, np.ndarray]]:
        with path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise FeatureError(f"{path}:{lineno}: expected 'font_id<TAB>values'")
                font_id, values = parts
                try:
                    vec = np.array([float(v) for v in values.split(",")], dtype=np.float64)
                except ValueError as exc:
                    raise FeatureError(f"{path}:{lineno}: bad feature value ({exc})") from None
                yield font_id, vec

    return FeatureStore(parse(Path(source)))


def save_features(store: FeatureStore, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for font_id in store.ids:
            values = ",".join(repr(float(v)) for v in store.vector(font_id))
            fh.write(f"{font_id}\t{values}\n")


@dataclass(frozen=True)
class PairRecord:
    """One observed (header, follower) pairing with its multiplicity."""

    header_id: str
    follower_id: str
    count: int = 1

    def __post_init__(self) -> None:
        if self.count < 1:
            raise DatasetError(f"pair ({self.header_id}, {self.follower_id}): count must be >= 1")


@dataclass(frozen=True)
class LabeledPair:
    """A pairing labeled +1 (observed) or -1 (sampled negative).

    ``count`` carries the multiplicity of the underlying records so training
    can weight repeated pairings; sampled negatives always have count 1.
    """

    header_id: str
    follower_id: str
    label: int
    count: int = 1

    def __post_init__(self) -> None:
        if self.label not in (1, -1):
            raise DatasetError(f"label must be +1 or -1, got {self.label}")
        if self.count < 1:
            raise DatasetError("count must be >= 1")


class PairDataset:
    """Multiset of (header, follower) pair records for one pairing role.

    Records with identical (header, follower) are merged by summing counts;
    repetition is a popularity signal and merged counts preserve it compactly.
    Instances are immutable after construction.
    """

    def __init__(self, role: str, records: Iterable[PairRecord] = ()):
        merged: dict[tuple[str, str], int] = defaultdict(int)
        for rec in records:
            merged[(rec.header_id, rec.follower_id)] += rec.count
        self.role = role
        self._records = tuple(
            PairRecord(h, f, c) for (h, f), c in sorted(merged.items())
        )
        by_header: dict[str, list[tuple[str, int]]] = defaultdict(list)
        for rec in self._records:
            by_header[rec.header_id].append((rec.follower_id, rec.count))
        self._by_header = dict(by_header)
        self._headers = tuple(sorted(self._by_header))
        self._followers = tuple(sorted({r.follower_id for r in self._records}))

    @property
    def records(self) -> tuple[PairRecord, ...]:
        return self._records

    @property
    def headers(self) -> tuple[str, ...]:
        return self._headers

    @property
    def followers(self) -> tuple[str, ...]:
        return self._followers

    @property
    def m(self) -> int:
        """Number of unique header fonts."""
        return len(self._headers)

    @property
    def n(self) -> int:
        """Number of unique follower fonts."""
        return len(self._followers)

    @property
    def total_count(self) -> int:
        return sum(r.count for r in self._records)

    def __len__(self) -> int:
        return len(self._records)

    def __bool__(self) -> bool:
        return bool(self._records)

    def pairs_of(self, header_id: str) -> tuple[tuple[str, int], ...]:
        """(follower_id, count) pairs recorded for a header; empty if unseen."""
        return tuple(self._by_header.get(header_id, ()))

    def followers_of(self, header_id: str) -> frozenset[str]:
        return frozenset(f for f, _ in self._by_header.get(header_id, ()))

    def positive_set(self) -> frozenset[tuple[str, str]]:
        return frozenset((r.header_id, r.follower_id) for r in self._records)


def load_pairs(source: str | Path, role: str = HEADER_BODY) -> PairDataset:
    """Load a pair file: ``header_id <tab> follower_id [<tab> count]`` per line."""
    path = Path(source)
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                raise DatasetError(f"{path}:{lineno}: expected 2 or 3 tab-separated fields")
            count = 1
            if len(parts) == 3:
                try:
                    count = int(parts[2])
                except ValueError:
                    raise DatasetError(f"{path}:{lineno}: bad count {parts[2]!r}") from None
            records.append(PairRecord(parts[0], parts[1], count))
    return PairDataset(role, records)


def save_pairs(dataset: PairDataset, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in dataset.records:
            fh.write(f"{rec.header_id}\t{rec.follower_id}\t{rec.count}\n")


def load_labeled_pairs(source: str | Path) -> list[LabeledPair]:
    """Load labeled pairs: ``header <tab> follower <tab> count <tab> label``."""
    path = Path(source)
    pairs = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise DatasetError(f"{path}:{lineno}: expected 4 tab-separated fields")
            pairs.append(LabeledPair(parts[0], parts[1], int(parts[3]), int(parts[2])))
    return pairs


def save_labeled_pairs(pairs: Iterable[LabeledPair], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(f"{p.header_id}\t{p.follower_id}\t{p.count}\t{p.label:+d}\n")


def split_by_header(
    dataset: PairDataset, ratio: float, seed: int
) -> tuple[PairDataset, PairDataset]:
    """Partition unique header ids into train/test; each header's records stay together.

    Follower fonts may overlap across the splits. Both sides are guaranteed
    non-empty, so the test condition is always an unseen header.
    """
    if not 0.0 < ratio < 1.0:
        raise DatasetError(f"split ratio must be in (0, 1), got {ratio}")
    headers = list(dataset.headers)
    if len(headers) < 2:
        raise DatasetError("cannot split a dataset with fewer than 2 unique headers")
    rng = random.Random(seed)
    rng.shuffle(headers)
    n_train = min(max(int(round(ratio * len(headers))), 1), len(headers) - 1)
    train_headers = set(headers[:n_train])
    train_records = [r for r in dataset.records if r.header_id in train_headers]
    test_records = [r for r in dataset.records if r.header_id not in train_headers]
    return PairDataset(dataset.role, train_records), PairDataset(dataset.role, test_records)


def sample_negatives(dataset: PairDataset, seed: int) -> list[LabeledPair]:
    """Positives plus an equal number of uniformly sampled negative pairs.

    Negatives are drawn without replacement from header x follower
    combinations absent from the positive set, so no duplicate negatives and
    no overlap with positives. Positive entries carry their merged counts.
    """
    positives = [
        LabeledPair(r.header_id, r.follower_id, 1, r.count) for r in dataset.records
    ]
    if not positives:
        return []
    headers, followers = dataset.headers, dataset.followers
    positive_set = dataset.positive_set()
    space = len(headers) * len(followers)
    available = space - len(positive_set)
    needed = len(positives)
    if available < needed:
        raise DatasetError(
            f"cannot sample {needed} negatives: only {available} non-positive combinations exist"
        )
    rng = random.Random(seed)
    chosen: list[tuple[str, str]] = []
    if available <= 2 * needed:
        # tight grid: enumerate the complement and sample from it directly
        complement = [
            (h, f) for h in headers for f in followers if (h, f) not in positive_set
        ]
        chosen = rng.sample(complement, needed)
    else:
        seen: set[tuple[str, str]] = set()
        while len(chosen) < needed:
            pair = (rng.choice(headers), rng.choice(followers))
            if pair in positive_set or pair in seen:
                continue
            seen.add(pair)
            chosen.append(pair)
    negatives = [LabeledPair(h, f, -1, 1) for h, f in chosen]
    return positives + negatives


class IdfTable(dict):
    """follower_id -> m / t_l, where t_l counts distinct headers paired with it.

    ``m`` (the unique-header count of the source dataset) is kept so callers
    can use it as the fallback weight for followers never seen in training,
    the limit of a maximally rare follower.
    """

    def __init__(self, weights: dict[str, float], m: int):
        super().__init__(weights)
        self.m = m

    def weight(self, follower_id: str, fallback: float | None = None) -> float:
        if fallback is None:
            fallback = float(self.m)
        return self.get(follower_id, fallback)


def compute_idf(dataset: PairDataset) -> IdfTable:
    """Inverse popularity of each follower across distinct header fonts."""
    if not dataset:
        raise DatasetError("cannot compute idf of an empty dataset")
    headers_per_follower: dict[str, set[str]] = defaultdict(set)
    for rec in dataset.records:
        headers_per_follower[rec.follower_id].add(rec.header_id)
    m = dataset.m
    return IdfTable(
        {f: m / len(hs) for f, hs in headers_per_follower.items()}, m
    )


def popularity_counts(dataset: PairDataset) -> dict[str, int]:
    """Count-weighted pairing frequency per follower font."""
    counts: dict[str, int] = defaultdict(int)
    for rec in dataset.records:
        counts[rec.follower_id] += rec.count
    return dict(counts)
