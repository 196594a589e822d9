import numpy as np
import pytest

from fontpair.dataset import (
    FeatureStore,
    PairDataset,
    PairRecord,
    sample_negatives,
    save_features,
    save_pairs,
)
from fontpair.dsknn import DsknnParams
from fontpair.metric_learning import TrainConfig, train_asml, train_ml
from fontpair.snapshot import EngineSnapshot

FONT_NAMES = [
    "Alpha", "Alpha-Bold", "Alpha-Light",
    "Beta", "Beta-Italic",
    "Gamma", "Gamma-Bold",
    "Delta", "Epsilon", "Zeta",
]


@pytest.fixture(scope="session")
def toy_store():
    rng = np.random.default_rng(2024)
    return FeatureStore((name, rng.normal(size=4)) for name in FONT_NAMES)


@pytest.fixture(scope="session")
def toy_pairs():
    records = [
        PairRecord("Alpha", "Beta", 3),
        PairRecord("Alpha", "Gamma", 1),
        PairRecord("Alpha-Bold", "Beta", 2),
        PairRecord("Alpha-Bold", "Delta", 1),
        PairRecord("Beta", "Gamma-Bold", 2),
        PairRecord("Gamma", "Delta", 1),
        PairRecord("Gamma", "Epsilon", 2),
        PairRecord("Delta", "Zeta", 1),
    ]
    return PairDataset("header_body", records)


@pytest.fixture(scope="session")
def toy_engine(toy_store, toy_pairs):
    labeled = sample_negatives(toy_pairs, seed=0)
    cfg = TrainConfig(learning_rate=0.01, epochs=30, seed=0)
    models = {
        "asml": train_asml(labeled, toy_store, cfg, gamma=0.1),
        "sml": train_asml(labeled, toy_store, cfg, gamma=0.1, symmetric_sim=True),
        "ml": train_ml(labeled, toy_store, cfg),
    }
    return EngineSnapshot(
        toy_store, toy_store, toy_pairs, models, DsknnParams(k1=3, k2=2, n=5)
    )


@pytest.fixture()
def toy_files(tmp_path, toy_store, toy_pairs):
    features = tmp_path / "features.tsv"
    pairs = tmp_path / "pairs.tsv"
    save_features(toy_store, features)
    save_pairs(toy_pairs, pairs)
    return {"features": features, "pairs": pairs, "dir": tmp_path}
