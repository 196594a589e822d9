"""Command-line entry point: extraction, training, recommendation, evaluation,
study analytics, snapshots, and the query service."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import baselines, dsknn, evaluation, metric_learning, service, snapshot as snap
from .dataset import (
    HEADER_BODY,
    compute_idf,
    load_features,
    load_labeled_pairs,
    load_pairs,
    sample_negatives,
    save_labeled_pairs,
    save_pairs,
)
from .extraction import ExtractionConfig, extract_pairs_from_file
from .study_analytics import (
    CHI2_CRITICAL_005,
    bradley_terry_fit,
    consistency_report,
    read_comparisons,
    wins_from_comparisons,
)


class CliError(Exception):
    """User-facing command failure."""


def _cmd_extract_pairs(args: argparse.Namespace) -> int:
    cfg = ExtractionConfig(
        subheader_distance_threshold=args.dist_threshold,
        body_min_chars=args.min_chars,
    )
    result = extract_pairs_from_file(args.pages, cfg)
    save_pairs(result.body, args.out_body)
    save_pairs(result.subheader, args.out_subheader)
    print(result.summary())
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    store = load_features(args.features)
    pairs = load_pairs(args.pairs)
    labeled = sample_negatives(pairs, args.seed)
    cfg = metric_learning.TrainConfig(
        epochs=args.epochs,
        seed=args.seed,
        psd_projection=args.psd,
        learning_rate=args.learning_rate,
        projection_dim=args.projection_dim,
    )
    if args.method == "ml":
        model = metric_learning.train_ml(labeled, store, cfg)
    else:
        model = metric_learning.train_asml(
            labeled, store, cfg, gamma=args.gamma, symmetric_sim=(args.method == "sml")
        )
    metric_learning.save_model(model, args.out)
    first = model.history[0] if model.history else float("nan")
    last = model.history[-1] if model.history else float("nan")
    print(f"trained {args.method}: objective {first:.6g} -> {last:.6g}, saved to {args.out}")
    return 0


def _load_snapshot_inputs(args: argparse.Namespace) -> snap.EngineSnapshot:
    headers = load_features(args.features)
    followers = load_features(args.follower_features) if args.follower_features else headers
    train = load_pairs(args.pairs) if args.pairs else None
    if train is None:
        raise CliError("--pairs is required for this method")
    models = {}
    for spec in args.model or []:
        name, _, path = spec.partition("=")
        if not path:
            raise CliError(f"--model expects name=path, got {spec!r}")
        models[name] = metric_learning.load_model(path)
    params = dsknn.DsknnParams(k1=args.k1, k2=args.k2, use_idf=args.idf, n=args.n)
    return snap.EngineSnapshot(headers, followers, train, models, params)


def _cmd_recommend(args: argparse.Namespace) -> int:
    engine = (
        snap.load_snapshot(args.snapshot)
        if args.snapshot
        else _load_snapshot_inputs(args)
    )
    ranked = engine.recommend(args.method, args.header, args.n)
    for rank, (font_id, score) in enumerate(ranked, start=1):
        print(f"{rank}\t{font_id}\t{score:.6f}")
    return 0


def _cmd_similar(args: argparse.Namespace) -> int:
    from .similarity import knn

    store = load_features(args.features)
    if args.font not in store:
        raise CliError(f"unknown font id: {args.font}")
    neighbors = knn(store.vector(args.font), store, args.k, exclude={args.font})
    for rank, nb in enumerate(neighbors, start=1):
        print(f"{rank}\t{nb.font_id}\t{nb.score:.6f}")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    engine = _load_snapshot_inputs_for_eval(args)
    cfg = evaluation.EvalConfig(non_popular_filter=args.non_popular, seed=args.seed)
    if args.task == "topn":
        return _evaluate_topn(args, engine, cfg)
    if args.task == "binary":
        return _evaluate_binary(args, engine, cfg)
    return _evaluate_rating(args, engine)


def _load_snapshot_inputs_for_eval(args: argparse.Namespace) -> snap.EngineSnapshot:
    headers = load_features(args.features)
    followers = load_features(args.follower_features) if args.follower_features else headers
    train = load_pairs(args.train)
    models = {}
    for spec in args.model or []:
        name, _, path = spec.partition("=")
        models[name] = metric_learning.load_model(path)
    params = dsknn.DsknnParams(k1=args.k1, k2=args.k2, use_idf=args.idf)
    return snap.EngineSnapshot(headers, followers, train, models, params)


def _evaluate_topn(
    args: argparse.Namespace, engine: snap.EngineSnapshot, cfg: evaluation.EvalConfig
) -> int:
    test = load_pairs(args.test)
    train = engine.train
    if cfg.non_popular_filter:
        train = evaluation.filter_non_popular(train, cfg.non_popular_top_k)
        engine = snap.EngineSnapshot(
            engine.header_store, engine.follower_store, train,
            engine.models, engine.dsknn_params,
        )
    idf = compute_idf(train)
    ns = [int(n) for n in args.ns.split(",")]

    def recommender(header_id: str, n: int) -> list[str]:
        return [fid for fid, _ in engine.recommend(args.method, header_id, n)]

    result = evaluation.evaluate_topn(
        recommender, test, train, idf, ns, cfg,
        known_headers=engine.header_store.ids,
    )
    print(f"method={args.method}")
    print(f"headers_evaluated={result.headers_evaluated}")
    print(f"headers_skipped={result.headers_skipped}")
    rows = ["n,precision,recall,weighted_precision,weighted_recall"]
    for n in ns:
        rep = result.reports[n]
        print(
            f"n={n} precision={rep.precision:.6f} recall={rep.recall:.6f} "
            f"weighted_precision={rep.weighted_precision:.6f} "
            f"weighted_recall={rep.weighted_recall:.6f}"
        )
        rows.append(
            f"{n},{rep.precision:.6f},{rep.recall:.6f},"
            f"{rep.weighted_precision:.6f},{rep.weighted_recall:.6f}"
        )
    if args.out_csv:
        Path(args.out_csv).write_text("\n".join(rows) + "\n", encoding="utf-8")
        print(f"csv={args.out_csv}")
    return 0


def _evaluate_binary(
    args: argparse.Namespace, engine: snap.EngineSnapshot, cfg: evaluation.EvalConfig
) -> int:
    train_ds = engine.train
    test_ds = load_pairs(args.test)
    if cfg.non_popular_filter:
        train_ds = evaluation.filter_non_popular(train_ds, cfg.non_popular_top_k)
        test_ds = evaluation.filter_non_popular(
            test_ds, cfg.non_popular_top_k, reference=engine.train
        )
    train_labeled = sample_negatives(train_ds, cfg.seed)
    test_labeled = sample_negatives(test_ds, cfg.seed + 1)

    def scorer(header_id: str, follower_id: str) -> float:
        return engine.score(args.method, header_id, follower_id)

    accuracy = evaluation.binary_eval(scorer, train_labeled, cfg, test=test_labeled)
    print(f"method={args.method}")
    print(f"task=binary")
    print(f"accuracy={accuracy:.6f}")
    return 0


def _evaluate_rating(args: argparse.Namespace, engine: snap.EngineSnapshot) -> int:
    records = read_comparisons(args.comparisons)
    comparisons = []
    truth = []
    for rec in records:
        header, _, _ = rec.id.partition("|")
        if rec.method1 is None or rec.method2 is None or rec.hit1 == rec.hit2:
            continue
        comparisons.append((header, rec.method1, rec.method2))
        truth.append(1 if rec.hit1 > rec.hit2 else 2)
    if not comparisons:
        raise CliError("no decidable comparisons in the input")

    def scorer(header_id: str, follower_id: str) -> float:
        return engine.score(args.method, header_id, follower_id)

    accuracy = evaluation.rating_prediction(scorer, comparisons, truth)
    print(f"method={args.method}")
    print(f"task=rating")
    print(f"accuracy={accuracy:.6f}")
    return 0


def _cmd_analyze_study(args: argparse.Namespace) -> int:
    records = read_comparisons(args.comparisons)
    raters = args.raters if args.raters > 0 else None
    report = consistency_report(records, num_raters=raters, bins=args.bins)
    hist = report.histogram
    print("bin_low,bin_high,observed,expected")
    for i in range(len(hist.observed)):
        print(
            f"{hist.bin_edges[i]:.4f},{hist.bin_edges[i + 1]:.4f},"
            f"{hist.observed[i]},{hist.expected[i]:.4f}"
        )
    print(f"chi2_all_bins={report.chi2_all_bins:.4f} bins_used={report.bins_used_all}")
    print(f"chi2_trimmed={report.chi2_trimmed:.4f} bins_used={report.bins_used_trimmed}")
    for bins, crit in sorted(CHI2_CRITICAL_005.items()):
        print(f"critical_005_{bins}bins={crit}")
    try:
        items, wins = wins_from_comparisons(records)
        strengths = bradley_terry_fit(wins)
        print("method,strength")
        for name, s in sorted(zip(items, strengths), key=lambda kv: -kv[1]):
            print(f"{name},{s:.6f}")
    except ValueError as exc:
        print(f"bradley_terry=skipped ({exc})")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    engine = snap.load_snapshot(args.snapshot)
    host, _, port = args.bind.partition(":")
    print(f"serving on {host or '127.0.0.1'}:{port or 8765}")
    service.serve(
        engine, host or "127.0.0.1", int(port or 8765), args.comparison_log
    )
    return 0


def _cmd_snapshot(args: argparse.Namespace) -> int:
    engine = _load_snapshot_inputs(args)
    snap.save_snapshot(engine, args.out)
    print(
        f"snapshot written to {args.out}: "
        f"{len(engine.header_store)} headers, {len(engine.follower_store)} followers, "
        f"{len(engine.train)} unique pairs, models: {sorted(engine.models) or 'none'}"
    )
    return 0


def _cmd_sample_negatives(args: argparse.Namespace) -> int:
    pairs = load_pairs(args.pairs)
    labeled = sample_negatives(pairs, args.seed)
    save_labeled_pairs(labeled, args.out)
    print(f"wrote {len(labeled)} labeled pairs to {args.out}")
    return 0


def _add_engine_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--features", required=True, help="header feature file")
    parser.add_argument(
        "--follower-features", default=None, help="follower feature file (default: --features)"
    )
    parser.add_argument("--model", action="append", metavar="NAME=PATH",
                        help="attach a trained model (repeatable)")
    parser.add_argument("--k1", type=int, default=10)
    parser.add_argument("--k2", type=int, default=5)
    parser.add_argument("--idf", action="store_true", help="idf-weighted dual-space scoring")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fontpair", description="Font pairing recommendation toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-pairs", help="detect font pairs from page records")
    p.add_argument("--pages", required=True)
    p.add_argument("--out-body", required=True)
    p.add_argument("--out-subheader", required=True)
    p.add_argument("--dist-threshold", type=float, default=150.0)
    p.add_argument("--min-chars", type=int, default=100)
    p.set_defaults(func=_cmd_extract_pairs)

    p = sub.add_parser("train", help="train a metric model")
    p.add_argument("--method", choices=("ml", "sml", "asml"), required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--learning-rate", type=float, default=1e-3)
    p.add_argument("--psd", action="store_true")
    p.add_argument("--projection-dim", type=int, default=None)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("recommend", help="rank follower fonts for a header")
    p.add_argument("--method", choices=snap.METHODS, required=True)
    p.add_argument("--header", required=True)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--snapshot", default=None, help="query a saved snapshot instead")
    p.add_argument("--pairs", default=None)
    p.add_argument("--features", default=None)
    p.add_argument(
        "--follower-features", default=None, help="follower feature file (default: --features)"
    )
    p.add_argument("--model", action="append", metavar="NAME=PATH")
    p.add_argument("--k1", type=int, default=10)
    p.add_argument("--k2", type=int, default=5)
    p.add_argument("--idf", action="store_true")
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("similar", help="nearest fonts by feature cosine")
    p.add_argument("--font", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--features", required=True)
    p.set_defaults(func=_cmd_similar)

    p = sub.add_parser("evaluate", help="run the evaluation harness")
    p.add_argument("--method", choices=snap.METHODS, required=True)
    p.add_argument("--task", choices=("topn", "binary", "rating"), required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--test")
    p.add_argument("--comparisons", help="comparison file (rating task)")
    p.add_argument("--ns", default="1,5,10", help="comma-separated top-N values")
    p.add_argument("--non-popular", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-csv", default=None)
    _add_engine_inputs(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("analyze-study", help="consistency and ranking analytics")
    p.add_argument("--comparisons", required=True)
    p.add_argument("--bins", type=int, default=6)
    p.add_argument("--raters", type=int, default=0,
                   help="fixed rater count for the null (0 = per record)")
    p.set_defaults(func=_cmd_analyze_study)

    p = sub.add_parser("serve", help="run the read-only query service")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--bind", default="127.0.0.1:8765")
    p.add_argument("--comparison-log", default="comparisons.log")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("snapshot", help="bundle features, pairs, and models")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=10)
    _add_engine_inputs(p)
    p.set_defaults(func=_cmd_snapshot)

    p = sub.add_parser("sample-negatives", help="write labeled positive/negative pairs")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_sample_negatives)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
