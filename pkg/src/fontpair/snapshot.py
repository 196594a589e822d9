"""Immutable engine snapshots: features, training pairs, trained models, and
the query dispatch shared by the CLI and the HTTP service."""

from __future__ import annotations

import hashlib
import json
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import baselines, dsknn, metric_learning
from .dataset import (
    FeatureStore,
    IdfTable,
    PairDataset,
    PairRecord,
    compute_idf,
    popularity_counts,
)

SNAPSHOT_VERSION = "fontpair-snapshot-1"

METHODS = ("dsknn", "asml", "sml", "ml", "popularity", "sknn", "family", "consim")


class SnapshotError(ValueError):
    """Raised for version, checksum, or content problems in snapshot files."""


@dataclass
class EngineSnapshot:
    header_store: FeatureStore
    follower_store: FeatureStore
    train: PairDataset
    models: dict[str, metric_learning.MetricModel] = field(default_factory=dict)
    dsknn_params: dsknn.DsknnParams = field(default_factory=dsknn.DsknnParams)
    version: str = SNAPSHOT_VERSION
    idf: IdfTable = field(init=False)
    popularity: dict[str, int] = field(init=False)

    def __post_init__(self) -> None:
        for rec in self.train.records:
            if rec.header_id not in self.header_store:
                raise SnapshotError(f"train header {rec.header_id} has no feature vector")
            if rec.follower_id not in self.follower_store:
                raise SnapshotError(f"train follower {rec.follower_id} has no feature vector")
        self.idf = compute_idf(self.train) if self.train else IdfTable({}, 0)
        self.popularity = popularity_counts(self.train)

    # -- queries ------------------------------------------------------------

    def fonts(self, role: str) -> tuple[str, ...]:
        if role == "header":
            return self.header_store.ids
        if role == "follower":
            return self.follower_store.ids
        raise SnapshotError(f"unknown role {role!r}")

    def _model(self, method: str) -> metric_learning.MetricModel:
        model = self.models.get(method)
        if model is None:
            raise SnapshotError(f"snapshot has no trained {method} model")
        return model

    def recommend(self, method: str, header_id: str, n: int) -> list[tuple[str, float]]:
        """Ranked (follower_id, score) list for one query header."""
        if method not in METHODS:
            raise SnapshotError(f"unknown method {method!r}")
        if n < 1:
            raise SnapshotError("n must be >= 1")
        if header_id not in self.header_store:
            raise KeyError(f"unknown font id: {header_id}")
        query = self.header_store.vector(header_id)
        if method == "dsknn":
            params = dsknn.DsknnParams(
                self.dsknn_params.k1, self.dsknn_params.k2, self.dsknn_params.use_idf, n
            )
            return dsknn.recommend(
                query, self.train, self.header_store, self.follower_store, params, self.idf
            )
        if method in ("asml", "sml", "ml"):
            model = self._model(method)
            scores = metric_learning.score_pairs(
                model,
                np.broadcast_to(query, self.follower_store.matrix.shape),
                self.follower_store.matrix,
            )
            ranked = sorted(
                zip(self.follower_store.ids, scores.tolist()),
                key=lambda item: (-item[1], item[0]),
            )
            return ranked[:n]
        if method == "popularity":
            return baselines.popularity_recommend(self.train, n)
        if method == "sknn":
            return baselines.sknn_recommend(query, self.follower_store, n)
        if method == "family":
            seed = zlib.crc32(f"{header_id}:{n}".encode())
            picks = baselines.same_family_recommend(header_id, self.follower_store, n, seed)
            return [(f, 1.0) for f in picks]
        if method == "consim":
            return baselines.consim_recommend(query, self.follower_store, n)
        raise AssertionError(method)

    def score(self, method: str, header_id: str, follower_id: str) -> float:
        """Scalar pairing score for one (header, follower) under a method."""
        if method not in METHODS:
            raise SnapshotError(f"unknown method {method!r}")
        if header_id not in self.header_store:
            raise KeyError(f"unknown font id: {header_id}")
        if follower_id not in self.follower_store:
            raise KeyError(f"unknown font id: {follower_id}")
        query = self.header_store.vector(header_id)
        target = self.follower_store.vector(follower_id)
        if method == "dsknn":
            candidates = dsknn.candidate_bodies(
                query, self.train, self.header_store, self.dsknn_params.k1
            )
            return dsknn.score_follower(
                target,
                candidates,
                self.follower_store,
                self.dsknn_params.k2,
                self.idf if self.dsknn_params.use_idf else None,
            )
        if method in ("asml", "sml", "ml"):
            return metric_learning.score_pair(self._model(method), query, target)
        if method == "popularity":
            return float(self.popularity.get(follower_id, 0))
        if method == "sknn":
            from .similarity import cosine

            return cosine(query, target)
        if method == "family":
            same = baselines.family_name(header_id) == baselines.family_name(follower_id)
            return 1.0 if same else 0.0
        if method == "consim":
            return baselines.consim_score(query, target)
        raise AssertionError(method)

    def available_methods(self) -> list[str]:
        return [
            m for m in METHODS
            if m in self.models or m not in ("asml", "sml", "ml")
        ]


# -- persistence --------------------------------------------------------------


def _store_payload(store: FeatureStore) -> dict:
    return {fid: [float(v) for v in store.vector(fid)] for fid in store.ids}


def _model_payload(model: metric_learning.MetricModel) -> dict:
    return {
        "variant": model.variant,
        "gamma": model.gamma,
        "threshold": model.threshold,
        "dist_mat": model.dist_mat.tolist(),
        "sim_mat": model.sim_mat.tolist(),
        "projection": None if model.projection is None else model.projection.tolist(),
    }


def save_snapshot(snapshot: EngineSnapshot, path: str | Path) -> None:
    payload = {
        "version": snapshot.version,
        "headers": _store_payload(snapshot.header_store),
        "followers": _store_payload(snapshot.follower_store),
        "train": {
            "role": snapshot.train.role,
            "records": [
                [r.header_id, r.follower_id, r.count] for r in snapshot.train.records
            ],
        },
        "models": {name: _model_payload(m) for name, m in snapshot.models.items()},
        "dsknn": {
            "k1": snapshot.dsknn_params.k1,
            "k2": snapshot.dsknn_params.k2,
            "use_idf": snapshot.dsknn_params.use_idf,
            "n": snapshot.dsknn_params.n,
        },
    }
    body = json.dumps(payload, sort_keys=True)
    checksum = hashlib.sha256(body.encode()).hexdigest()
    Path(path).write_text(
        json.dumps({"checksum": checksum, "payload": payload}, sort_keys=True),
        encoding="utf-8",
    )


def load_snapshot(path: str | Path) -> EngineSnapshot:
    try:
        wrapper = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SnapshotError(f"unreadable snapshot file: {exc}") from None
    if not isinstance(wrapper, dict) or "payload" not in wrapper or "checksum" not in wrapper:
        raise SnapshotError("snapshot file lacks checksum/payload structure")
    payload = wrapper["payload"]
    body = json.dumps(payload, sort_keys=True)
    if hashlib.sha256(body.encode()).hexdigest() != wrapper["checksum"]:
        raise SnapshotError("snapshot checksum mismatch; file corrupted")
    if payload.get("version") != SNAPSHOT_VERSION:
        raise SnapshotError(
            f"snapshot version {payload.get('version')!r} != {SNAPSHOT_VERSION!r}"
        )
    header_store = FeatureStore(payload["headers"].items())
    follower_store = FeatureStore(payload["followers"].items())
    train = PairDataset(
        payload["train"]["role"],
        [PairRecord(h, f, c) for h, f, c in payload["train"]["records"]],
    )
    models = {}
    for name, m in payload["models"].items():
        models[name] = metric_learning.MetricModel(
            m["variant"],
            np.array(m["dist_mat"]),
            np.array(m["sim_mat"]),
            gamma=m["gamma"],
            threshold=m["threshold"],
            projection=None if m["projection"] is None else np.array(m["projection"]),
        )
    params = dsknn.DsknnParams(
        payload["dsknn"]["k1"],
        payload["dsknn"]["k2"],
        payload["dsknn"]["use_idf"],
        payload["dsknn"]["n"],
    )
    return EngineSnapshot(header_store, follower_store, train, models, params)
