"""Font pairing recommendation toolkit.

Learns header/follower pairing relationships from co-occurrence data and
serves recommendations through dual-space kNN, learned similarity metrics,
and rule-based baselines, with an evaluation harness and preference-study
analytics on top.
"""

from .dataset import (
    FeatureStore,
    IdfTable,
    LabeledPair,
    PairDataset,
    PairRecord,
    compute_idf,
    load_features,
    load_pairs,
    popularity_counts,
    sample_negatives,
    split_by_header,
)
from .dsknn import Candidate, DsknnParams
from .extraction import ExtractionConfig, TextBox, extract_pairs
from .metric_learning import MetricModel, TrainConfig, train_asml, train_ml
from .similarity import Neighbor, cosine, knn
from .snapshot import EngineSnapshot, load_snapshot, save_snapshot

__version__ = "0.1.0"

__all__ = [
    "Candidate",
    "DsknnParams",
    "EngineSnapshot",
    "ExtractionConfig",
    "FeatureStore",
    "IdfTable",
    "LabeledPair",
    "MetricModel",
    "Neighbor",
    "PairDataset",
    "PairRecord",
    "TextBox",
    "TrainConfig",
    "compute_idf",
    "cosine",
    "extract_pairs",
    "knn",
    "load_features",
    "load_pairs",
    "load_snapshot",
    "popularity_counts",
    "sample_negatives",
    "save_snapshot",
    "split_by_header",
    "train_asml",
    "train_ml",
]
