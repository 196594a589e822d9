"""Top-N retrieval metrics, binary classification with cross-validated
thresholds, non-popular filtering, and preference prediction."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .dataset import (
    DatasetError,
    IdfTable,
    LabeledPair,
    PairDataset,
    popularity_counts,
)

# recommender: (header_id, n) -> ranked follower ids
Recommender = Callable[[str, int], Sequence[str]]
# pair scorer: (header_id, follower_id) -> score, higher = more positive
PairScorer = Callable[[str, str], float]


@dataclass(frozen=True)
class TopNReport:
    n: int
    precision: float
    recall: float
    weighted_precision: float  # hit idf mass over N; may exceed 1
    weighted_recall: float
    hits: int = 0


@dataclass(frozen=True)
class EvalConfig:
    non_popular_filter: bool = False
    non_popular_top_k: int = 50
    folds: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.folds < 2:
            raise ValueError("folds must be >= 2")


def _idf_weight(idf: Mapping[str, float], follower_id: str) -> float:
    # unseen followers fall back to the maximally-rare weight when available
    fallback = getattr(idf, "m", 1.0)
    return idf.get(follower_id, fallback)


def topn_metrics(
    recommended: Sequence[str],
    ground_truth: frozenset[str] | set[str],
    n: int,
    idf: Mapping[str, float],
) -> TopNReport:
    """Precision/recall of the top-n list plus their idf-weighted variants.

    weighted_precision divides the hit idf mass by n (not by the idf mass of
    the recommended list), so values above 1 are possible; weighted_recall
    divides by the idf mass of the ground truth and stays in [0, 1].
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not ground_truth:
        raise ValueError("empty ground-truth set")
    top = list(recommended[:n])
    hits = [f for f in top if f in ground_truth]
    hit_mass = sum(_idf_weight(idf, f) for f in hits)
    gt_mass = sum(_idf_weight(idf, f) for f in ground_truth)
    return TopNReport(
        n=n,
        precision=len(hits) / n,
        recall=len(hits) / len(ground_truth),
        weighted_precision=hit_mass / n,
        weighted_recall=hit_mass / gt_mass if gt_mass > 0 else 0.0,
        hits=len(hits),
    )


@dataclass
class TopNEvaluation:
    reports: dict[int, TopNReport]
    headers_evaluated: int
    headers_skipped: int


def filter_non_popular(
    dataset: PairDataset, top_k: int = 50, reference: PairDataset | None = None
) -> PairDataset:
    """Drop every pair whose follower is among the top_k most popular.

    Popularity is ranked on ``reference`` (default: the dataset itself), so
    a train split can define the banned set for both splits.
    """
    if top_k <= 0:
        return dataset
    counts = popularity_counts(reference if reference is not None else dataset)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    banned = {f for f, _ in ranked[:top_k]}
    return PairDataset(
        dataset.role, [r for r in dataset.records if r.follower_id not in banned]
    )


def evaluate_topn(
    recommend: Recommender,
    test: PairDataset,
    train: PairDataset,
    idf: IdfTable,
    ns: Sequence[int],
    cfg: EvalConfig = EvalConfig(),
    known_headers: Sequence[str] | None = None,
) -> TopNEvaluation:
    """Macro-averaged top-N metrics over the test headers.

    Each test header's ground truth is its observed follower set; the idf
    table must come from the training split. Headers outside
    ``known_headers`` (e.g. missing feature vectors) are skipped and counted.
    """
    overlap = set(test.headers) & set(train.headers)
    if overlap:
        raise DatasetError(f"test headers overlap train: {sorted(overlap)[:3]}...")
    if cfg.non_popular_filter:
        test = filter_non_popular(test, cfg.non_popular_top_k, reference=train)
    usable = set(known_headers) if known_headers is not None else None
    max_n = max(ns)
    sums: dict[int, list[float]] = {n: [0.0, 0.0, 0.0, 0.0] for n in ns}
    evaluated = 0
    skipped = 0
    for header_id in test.headers:
        if usable is not None and header_id not in usable:
            skipped += 1
            continue
        ground_truth = test.followers_of(header_id)
        if not ground_truth:
            skipped += 1
            continue
        ranked = list(recommend(header_id, max_n))
        evaluated += 1
        for n in ns:
            rep = topn_metrics(ranked, ground_truth, n, idf)
            acc = sums[n]
            acc[0] += rep.precision
            acc[1] += rep.recall
            acc[2] += rep.weighted_precision
            acc[3] += rep.weighted_recall
    if evaluated == 0:
        raise DatasetError("no test header could be evaluated")
    reports = {
        n: TopNReport(
            n=n,
            precision=sums[n][0] / evaluated,
            recall=sums[n][1] / evaluated,
            weighted_precision=sums[n][2] / evaluated,
            weighted_recall=sums[n][3] / evaluated,
        )
        for n in ns
    }
    return TopNEvaluation(reports, evaluated, skipped)


def _accuracy(scores: Sequence[float], labels: Sequence[int], threshold: float) -> float:
    correct = sum(
        1 for s, l in zip(scores, labels) if (1 if s >= threshold else -1) == l
    )
    return correct / len(scores)


def select_threshold(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Grid search over midpoints of the sorted unique scores (plus extremes)."""
    uniq = sorted(set(scores))
    candidates = [uniq[0] - 1.0]
    candidates += [(a + b) / 2.0 for a, b in zip(uniq, uniq[1:])]
    # classify-at-boundary is positive, so each unique score is a candidate too
    candidates += uniq
    candidates.append(uniq[-1] + 1.0)
    best_t = candidates[0]
    best_acc = -1.0
    for t in sorted(candidates):
        acc = _accuracy(scores, labels, t)
        if acc > best_acc:
            best_acc = acc
            best_t = t
    return best_t


def binary_eval(
    scorer: PairScorer,
    labeled: Sequence[LabeledPair],
    cfg: EvalConfig = EvalConfig(),
    test: Sequence[LabeledPair] | None = None,
) -> float:
    """Binary pairing accuracy with a cross-validated decision threshold.

    The threshold maximizing training-fold accuracy is chosen by k-fold
    cross-validation over ``labeled``. With an explicit ``test`` set the
    selected threshold is applied there; otherwise each fold is held out
    once and the mean held-out accuracy is returned.
    """
    if not labeled:
        raise DatasetError("no labeled pairs")
    labels = [p.label for p in labeled]
    if len(set(labels)) < 2:
        raise DatasetError("binary evaluation needs both classes")
    scores = [scorer(p.header_id, p.follower_id) for p in labeled]

    # stratified fold assignment keeps each fold's class balance
    rng = random.Random(cfg.seed)
    folds = min(cfg.folds, len(labeled))
    fold_of: dict[int, int] = {}
    for cls in (1, -1):
        members = [i for i, l in enumerate(labels) if l == cls]
        rng.shuffle(members)
        for pos, idx in enumerate(members):
            fold_of[idx] = pos % folds

    if test is not None:
        # per fold: fit a threshold on the other folds, validate on the held
        # fold; keep the threshold that validated best
        candidates: list[tuple[float, float]] = []  # (val accuracy, threshold)
        for k in range(folds):
            fit_idx = [i for i in range(len(labeled)) if fold_of[i] != k]
            held_idx = [i for i in range(len(labeled)) if fold_of[i] == k]
            if not held_idx or len({labels[i] for i in fit_idx}) < 2:
                continue
            t = select_threshold([scores[i] for i in fit_idx], [labels[i] for i in fit_idx])
            val = _accuracy([scores[i] for i in held_idx], [labels[i] for i in held_idx], t)
            candidates.append((val, t))
        if not candidates:
            candidates = [(0.0, select_threshold(scores, labels))]
        chosen = max(candidates, key=lambda item: (item[0], -item[1]))[1]
        test_scores = [scorer(p.header_id, p.follower_id) for p in test]
        test_labels = [p.label for p in test]
        return _accuracy(test_scores, test_labels, chosen)

    accuracies = []
    for k in range(folds):
        fit_idx = [i for i in range(len(labeled)) if fold_of[i] != k]
        held_idx = [i for i in range(len(labeled)) if fold_of[i] == k]
        if not held_idx or len({labels[i] for i in fit_idx}) < 2:
            continue
        t = select_threshold([scores[i] for i in fit_idx], [labels[i] for i in fit_idx])
        accuracies.append(_accuracy([scores[i] for i in held_idx], [labels[i] for i in held_idx], t))
    if not accuracies:
        raise DatasetError("cross-validation produced no usable fold")
    return sum(accuracies) / len(accuracies)


def rating_prediction(
    scorer: PairScorer,
    comparisons: Sequence[tuple[str, str, str]],
    truth: Sequence[int],
) -> float:
    """Accuracy of predicting the preferred side of (header, follower1, follower2).

    The side with the higher score wins (scorers must be higher-is-better;
    negate distance-type scorers before passing them in). Exact ties score
    half a point.
    """
    if not comparisons:
        raise DatasetError("no comparisons to predict")
    if len(comparisons) != len(truth):
        raise ValueError("comparisons and truth lengths differ")
    points = 0.0
    for (header, first, second), preferred in zip(comparisons, truth):
        if preferred not in (1, 2):
            raise ValueError(f"preferred side must be 1 or 2, got {preferred}")
        s1 = scorer(header, first)
        s2 = scorer(header, second)
        if s1 == s2:
            points += 0.5
        elif (s1 > s2 and preferred == 1) or (s2 > s1 and preferred == 2):
            points += 1.0
    return points / len(comparisons)
