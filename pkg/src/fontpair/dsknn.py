"""Dual-space k-NN recommendation.

Candidate followers come from the pair lists of the query's nearest training
headers; every follower font is then scored by its similarity to those
candidates, each term weighted by how close the candidate's source header is
to the query (and optionally by the candidate's idf weight).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .dataset import FeatureStore, IdfTable, PairDataset
from .similarity import cosine_to_store


@dataclass(frozen=True)
class DsknnParams:
    k1: int = 10  # header neighbors supplying candidates
    k2: int = 5  # candidate instances averaged per scored follower
    use_idf: bool = False
    n: int = 10  # recommendation list length

    def __post_init__(self) -> None:
        if self.k1 < 1 or self.k2 < 1 or self.n < 1:
            raise ValueError("k1, k2 and n must all be >= 1")


@dataclass(frozen=True)
class Candidate:
    """A follower drawn from one neighbor header's pair list."""

    follower_id: str
    source_header_id: str
    header_similarity: float
    multiplicity: int = 1


def candidate_bodies(
    query_header: Sequence[float],
    train: PairDataset,
    header_store: FeatureStore,
    k1: int,
) -> list[Candidate]:
    """Union of the pair lists of the k1 nearest training headers.

    Multiplicity is preserved: a follower paired twice with one neighbor
    header yields multiplicity 2, and appearances under different neighbor
    headers stay separate entries (each carries its own header similarity).
    """
    if k1 < 1:
        raise ValueError(f"k1 must be >= 1, got {k1}")
    usable = [h for h in train.headers if h in header_store]
    if not usable:
        raise ValueError("no training header has a feature vector in the store")
    q = np.asarray(query_header, dtype=np.float64)
    scores = cosine_to_store(q, header_store)
    ranked = sorted(usable, key=lambda h: (-scores[header_store.row(h)], h))
    candidates: list[Candidate] = []
    for header_id in ranked[:k1]:
        sim = float(scores[header_store.row(header_id)])
        for follower_id, count in train.pairs_of(header_id):
            candidates.append(Candidate(follower_id, header_id, sim, count))
    return candidates


def score_follower(
    follower: Sequence[float],
    candidates: Sequence[Candidate],
    follower_store: FeatureStore,
    k2: int,
    idf: Mapping[str, float] | None = None,
) -> float:
    """Average over the k2 candidate instances most similar to the follower.

    Each term is cos(follower, candidate) * cos(query, candidate's header),
    further multiplied by the candidate's idf weight when ``idf`` is given.
    Candidate instances are the multiplicity-expanded list, so a repeated
    candidate can occupy several of the k2 slots. With fewer than k2
    instances the average runs over what exists.
    """
    if not candidates:
        raise ValueError("empty candidate list")
    if k2 < 1:
        raise ValueError(f"k2 must be >= 1, got {k2}")
    y = np.asarray(follower, dtype=np.float64)
    yn = np.linalg.norm(y)
    if yn == 0.0:
        raise ValueError("cosine similarity is undefined for zero-norm vectors")

    sims: dict[str, float] = {}
    for cand in candidates:
        if cand.follower_id not in sims:
            vec = follower_store.vector(cand.follower_id)
            sims[cand.follower_id] = float(
                np.dot(vec, y) / (np.linalg.norm(vec) * yn)
            )

    ordered = sorted(
        candidates,
        key=lambda c: (-sims[c.follower_id], c.follower_id, c.source_header_id),
    )
    total = 0.0
    taken = 0
    for cand in ordered:
        if taken >= k2:
            break
        instances = min(cand.multiplicity, k2 - taken)
        term = sims[cand.follower_id] * cand.header_similarity
        if idf is not None:
            fallback = getattr(idf, "m", 1.0)
            term *= idf.get(cand.follower_id, fallback)
        total += term * instances
        taken += instances
    return total / taken


def recommend(
    query_header: Sequence[float],
    train: PairDataset,
    header_store: FeatureStore,
    follower_store: FeatureStore,
    params: DsknnParams,
    idf: IdfTable | None = None,
) -> list[tuple[str, float]]:
    """Rank every follower font in the store and return the top n.

    Fonts similar to the candidates are scored too, not only the candidates
    themselves. When ``params.use_idf`` is set an idf table must be supplied.
    """
    if params.use_idf and idf is None:
        raise ValueError("use_idf requires an idf table")
    candidates = candidate_bodies(query_header, train, header_store, params.k1)
    table = idf if params.use_idf else None
    scored = [
        (follower_id, score_follower(
            follower_store.vector(follower_id), candidates, follower_store,
            params.k2, table,
        ))
        for follower_id in follower_store.ids
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[: params.n]
