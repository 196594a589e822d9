"""Cosine similarity and exact k-nearest-neighbor retrieval over font features."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dataset import FeatureStore


@dataclass(frozen=True)
class Neighbor:
    font_id: str
    score: float


def cosine(a: Sequence[float], b: Sequence[float]) -> float:
    """Cosine similarity of two same-dimension, non-zero vectors."""
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity is undefined for zero-norm vectors")
    return float(np.dot(va, vb) / (na * nb))


def cosine_to_store(query: Sequence[float], store: FeatureStore) -> np.ndarray:
    """Cosine similarity of a query vector to every font in the store."""
    q = np.asarray(query, dtype=np.float64)
    if store.dim is None:
        raise ValueError("empty feature store")
    if q.shape != (store.dim,):
        raise ValueError(f"dimension mismatch: query {q.shape} vs store dim {store.dim}")
    qn = np.linalg.norm(q)
    if qn == 0.0:
        raise ValueError("cosine similarity is undefined for zero-norm vectors")
    return (store.matrix @ q) / (store.norms * qn)


def knn(
    query: Sequence[float],
    store: FeatureStore,
    k: int,
    exclude: Iterable[str] | None = None,
) -> list[Neighbor]:
    """Exact top-k fonts by cosine similarity, ties broken by font_id.

    Returns fewer than k neighbors only when the store (after exclusion)
    is smaller than k.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    excluded = set(exclude) if exclude else set()
    scores = cosine_to_store(query, store)
    ranked = sorted(
        (
            Neighbor(font_id, float(scores[i]))
            for i, font_id in enumerate(store.ids)
            if font_id not in excluded
        ),
        key=lambda nb: (-nb.score, nb.font_id),
    )
    if not ranked:
        raise ValueError("feature store is empty after exclusion")
    return ranked[:k]
