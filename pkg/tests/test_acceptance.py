"""Acceptance suite: one test per go/no-go criterion, each printing a
PASS/FAIL line (run with ``pytest -s tests/test_acceptance.py`` to see them)."""

import functools
import time
from fractions import Fraction

import numpy as np
import pytest

from fontpair.dataset import (
    FeatureStore,
    IdfTable,
    LabeledPair,
    PairDataset,
    PairRecord,
)
from fontpair.dsknn import DsknnParams, recommend as dsknn_recommend
from fontpair.extraction import ExtractionConfig, TextBox, extract_pairs
from fontpair.metric_learning import (
    TrainConfig,
    classify,
    hinge_gradient,
    hinge_objective,
    score_asml,
    train_asml,
)
from fontpair.evaluation import topn_metrics
from fontpair.snapshot import load_snapshot, save_snapshot
from fontpair.study_analytics import (
    CHI2_CRITICAL_005,
    ComparisonRecord,
    bradley_terry_fit,
    chi_squared,
    normalized_difference,
    random_rater_pdf,
)

from oracles import dual_space_scores, planted_bilinear_instance, random_dsknn_instance
from test_study_analytics import bt_grid_search


def criterion(name):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[FAIL] {name}")
                raise
            print(f"[PASS] {name}")

        return run

    return wrap


@criterion("dual-space scoring matches brute-force oracle; unit idf collapses")
def test_dsknn_oracle_equivalence():
    start = time.monotonic()
    for seed in range(1000, 1022):  # 22 random toy instances
        query, pair_lists, header_vecs, follower_vecs = random_dsknn_instance(
            seed=seed, max_headers=12, max_followers=15, max_dim=8
        )
        header_store = FeatureStore(sorted(header_vecs.items()))
        follower_store = FeatureStore(sorted(follower_vecs.items()))
        train = PairDataset("header_body", [
            PairRecord(h, f, c) for h, fls in pair_lists.items() for f, c in fls
        ])
        k1, k2 = 3, 4
        params = DsknnParams(k1=k1, k2=k2, n=len(follower_vecs))
        ranked = dsknn_recommend(query, train, header_store, follower_store, params)
        oracle = dual_space_scores(
            query, pair_lists, header_vecs, follower_vecs, k1=k1, k2=k2
        )
        expected = sorted(oracle.items(), key=lambda kv: (-kv[1], kv[0]))
        assert [f for f, _ in ranked] == [f for f, _ in expected], f"seed {seed}"

        ones = IdfTable({f: 1.0 for f in follower_vecs}, m=1)
        weighted = dsknn_recommend(
            query, train, header_store, follower_store,
            DsknnParams(k1=k1, k2=k2, use_idf=True, n=len(follower_vecs)), idf=ones,
        )
        plain = dict(ranked)
        for follower_id, score in weighted:
            assert abs(score - plain[follower_id]) <= 1e-12, f"seed {seed}"
    elapsed = time.monotonic() - start
    assert elapsed < 10.0, f"took {elapsed:.1f}s"


@criterion("hinge objective subgradients match central finite differences")
def test_gradient_finite_differences():
    start = time.monotonic()
    rng = np.random.default_rng(314)
    checked = 0
    for dim in (2, 3, 4, 5, 6):
        n = 4 * dim
        X = rng.normal(size=(n, dim))
        Y = rng.normal(size=(n, dim))
        labels = rng.choice([-1.0, 1.0], size=n)
        weights = rng.uniform(0.5, 2.0, size=n)
        dist = np.eye(dim) + 0.1 * rng.normal(size=(dim, dim))
        sim = np.eye(dim) + 0.1 * rng.normal(size=(dim, dim))
        gamma = 0.25
        f = np.einsum("ij,jk,ik->i", X, sim, Y) - np.einsum(
            "ij,jk,ik->i", X - Y, dist, X - Y
        )
        if np.min(np.abs(1.0 - labels * f)) <= 1e-3:
            continue  # too close to a hinge kink; criterion excludes these
        g_dist, g_sim = hinge_gradient(dist, sim, X, Y, labels, weights, gamma)
        h = 1e-6
        for which, implemented in ((0, g_dist), (1, g_sim)):
            fd = np.zeros((dim, dim))
            for i in range(dim):
                for j in range(dim):
                    plus = [dist.copy(), sim.copy()]
                    minus = [dist.copy(), sim.copy()]
                    plus[which][i, j] += h
                    minus[which][i, j] -= h
                    fd[i, j] = (
                        hinge_objective(*plus, X, Y, labels, weights, gamma)
                        - hinge_objective(*minus, X, Y, labels, weights, gamma)
                    ) / (2 * h)
            rel = np.linalg.norm(implemented - fd) / np.linalg.norm(fd)
            assert rel < 1e-4, f"dim {dim}: relative error {rel:.2e}"
        checked += 1
    assert checked >= 3
    elapsed = time.monotonic() - start
    assert elapsed < 30.0, f"took {elapsed:.1f}s"


def _planted_split(seed=7):
    fonts, labeled, _ = planted_bilinear_instance(seed=seed, dim=8, n_pos=500, n_neg=500)
    store = FeatureStore(sorted(fonts.items()))
    pairs = [LabeledPair(h, f, l) for h, f, l in labeled]
    rng = np.random.default_rng(0)
    idx = rng.permutation(len(pairs))
    split = int(0.8 * len(pairs))
    return store, [pairs[i] for i in idx[:split]], [pairs[i] for i in idx[split:]]


PLANTED_CFG = TrainConfig(learning_rate=0.02, epochs=150, batch_size=64, seed=1)


@pytest.fixture(scope="module")
def planted_models():
    store, train, test = _planted_split()
    asml = train_asml(train, store, PLANTED_CFG, gamma=0.01)
    sml = train_asml(train, store, PLANTED_CFG, gamma=0.01, symmetric_sim=True)
    return store, test, asml, sml


@criterion("planted bilinear rule: asml >= 90% held out, above symmetric ablation")
def test_planted_structure_recovery(planted_models):
    start = time.monotonic()
    store, test, asml, sml = planted_models

    def accuracy(model):
        good = 0
        for p in test:
            predicted = classify(
                model, store.vector(p.header_id), store.vector(p.follower_id), 0.0
            )
            good += predicted == p.label
        return good / len(test)

    asml_acc = accuracy(asml)
    sml_acc = accuracy(sml)
    assert asml_acc >= 0.90, f"asml held-out accuracy {asml_acc:.3f}"
    assert sml_acc < asml_acc, f"sml {sml_acc:.3f} not below asml {asml_acc:.3f}"
    elapsed = time.monotonic() - start
    assert elapsed < 120.0, f"took {elapsed:.1f}s"


@criterion("symmetric variant is swap-symmetric; asymmetric variant is not")
def test_symmetry_contract(planted_models):
    _, _, asml, sml = planted_models
    rng = np.random.default_rng(99)
    violations = 0
    for _ in range(1000):
        x, y = rng.normal(size=8), rng.normal(size=8)
        assert abs(score_asml(sml, x, y) - score_asml(sml, y, x)) <= 1e-9
        if abs(score_asml(asml, x, y) - score_asml(asml, y, x)) > 1e-9:
            violations += 1
    assert violations > 500, f"only {violations}/1000 probes violate symmetry"


@criterion("huge regularizer pins both matrices to the identity")
def test_regularizer_limit():
    store, train, _ = _planted_split(seed=11)
    cfg = TrainConfig(learning_rate=1e-3, epochs=30, seed=0)
    model = train_asml(train[:200], store, cfg, gamma=1e6)
    eye = np.eye(model.dim)
    deviation = np.linalg.norm(model.dist_mat - eye, "fro") + np.linalg.norm(
        model.sim_mat - eye, "fro"
    )
    assert deviation < 1e-2, f"deviation {deviation:.2e}"


@criterion("retrieval metric identities hold exactly on randomized fixtures")
def test_metric_consistency_identities():
    import random as pyrandom

    rng = pyrandom.Random(5)
    unit = IdfTable({}, m=1)
    for _ in range(100):
        followers = [f"B{i}" for i in range(rng.randint(2, 25))]
        truth = set(rng.sample(followers, rng.randint(1, len(followers))))
        n = rng.randint(1, len(followers))
        ranked = rng.sample(followers, n)
        rep = topn_metrics(ranked, truth, n, unit)
        hits = len(set(ranked) & truth)
        assert rep.precision * n == hits  # exact float: hits / n * n
        assert rep.recall * len(truth) == hits
        assert rep.weighted_precision == rep.precision
        assert rep.weighted_recall == rep.recall


@criterion("worked consistency example: hits 5:6 give d = 1/11")
def test_normalized_difference_worked_example():
    rec = ComparisonRecord("c", 5, 6)
    assert Fraction(abs(rec.hit1 - rec.hit2), rec.hit1 + rec.hit2) == Fraction(1, 11)
    assert normalized_difference(rec) == 1 / 11


@criterion("chi-squared machinery: zero stat, critical constants, null simulation")
def test_chi_squared_machinery():
    start = time.monotonic()
    stat, used = chi_squared([7.0, 11.0, 2.0], [7.0, 11.0, 2.0])
    assert stat == 0.0 and used == 3
    assert CHI2_CRITICAL_005[6] == 16.750
    assert CHI2_CRITICAL_005[5] == 14.860

    pdf = random_rater_pdf(11, 6)
    records = 5000
    below_all = below_trimmed = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        hit1 = rng.binomial(11, 0.5, size=records)
        d = np.abs(2 * hit1 - 11) / 11
        observed = np.bincount(np.minimum((d * 6).astype(int), 5), minlength=6)
        expected = pdf * records
        stat_all, used_all = chi_squared(observed, expected)
        stat_trim, used_trim = chi_squared(observed, expected, omit_below=5.0)
        below_all += stat_all < CHI2_CRITICAL_005[used_all]
        below_trimmed += stat_trim < CHI2_CRITICAL_005[used_trim]
    assert below_all >= 99, f"all-bins rule: {below_all}/100 below critical"
    assert below_trimmed >= 99, f"trimmed rule: {below_trimmed}/100 below critical"
    elapsed = time.monotonic() - start
    assert elapsed < 60.0, f"took {elapsed:.1f}s"


@criterion("pairwise strength fit: closed-form ratio and grid-search oracle")
def test_bradley_terry_oracles():
    two = bradley_terry_fit(np.array([[0.0, 3.0], [1.0, 0.0]]))
    assert abs(two[0] / two[1] - 3.0) <= 1e-8
    wins = np.array([
        [0.0, 7.0, 4.0, 6.0],
        [3.0, 0.0, 5.0, 4.0],
        [2.0, 3.0, 0.0, 5.0],
        [1.0, 2.0, 3.0, 0.0],
    ])
    fitted = bradley_terry_fit(wins)
    oracle = bt_grid_search(wins)
    np.testing.assert_allclose(fitted, oracle, atol=1e-3)


def _box(font, size, x0, y0, w=100.0, h=20.0, chars=10, page="p1"):
    return TextBox(page, font, size, (x0, y0, x0 + w, y0 + h), chars)


def ten_document_fixture():
    """Ten hand-built documents with hand-labeled expected pairs."""
    docs = {}
    expected_body = {}
    expected_sub = {}

    # 1: plain header + subheader + body
    docs["d01"] = [[
        _box("A-Bold", 30, 0, 0), _box("A", 16, 0, 40),
        _box("Serif", 9, 0, 300, chars=500),
    ]]
    expected_body[("A-Bold", "Serif")] = 1
    expected_sub[("A-Bold", "A")] = 1

    # 2: subheader beyond threshold, body present
    docs["d02"] = [[
        _box("B-Bold", 28, 0, 0), _box("B", 14, 0, 400),
        _box("Serif", 10, 0, 200, chars=300),
    ]]
    expected_body[("B-Bold", "Serif")] = 1

    # 3: no body (short boxes), subheader present
    docs["d03"] = [[
        _box("C-Bold", 26, 0, 0), _box("C", 13, 0, 50, chars=20),
    ]]
    expected_sub[("C-Bold", "C")] = 1

    # 4: two pages, each with a body pair; subheader only on page 2
    docs["d04"] = [
        [_box("D-Bold", 24, 0, 0), _box("Mono", 9, 0, 500, chars=900)],
        [_box("D-Bold", 24, 0, 0), _box("D", 15, 0, 60),
         _box("Mono", 9, 0, 300, chars=400)],
    ]
    expected_body[("D-Bold", "Mono")] = 2
    expected_sub[("D-Bold", "D")] = 1

    # 5: size tie broken by area
    docs["d05"] = [[
        TextBox("p1", "WideHeader", 20.0, (0.0, 0.0, 300.0, 25.0), 10),
        TextBox("p1", "Narrow", 20.0, (0.0, 40.0, 80.0, 65.0), 10),
        _box("Serif", 8, 0, 200, chars=600),
    ]]
    expected_body[("WideHeader", "Serif")] = 1
    expected_sub[("WideHeader", "Narrow")] = 1  # narrow box is in range

    # 6: nearest of two eligible bodies wins
    docs["d06"] = [[
        _box("F-Bold", 22, 0, 0),
        _box("NearBody", 9, 0, 120, chars=200),
        _box("FarBody", 9, 0, 600, chars=200),
    ]]
    expected_body[("F-Bold", "NearBody")] = 1
    expected_sub[("F-Bold", "NearBody")] = 1  # also the largest in-range box

    # 7: single-box page skipped entirely
    docs["d07"] = [[_box("Lonely", 30, 0, 0, chars=400)]]

    # 8: boxless (scanned) pages only
    docs["d08"] = [[], []]

    # 9: repeated pairing accumulates counts across documents
    docs["d09"] = [[
        _box("A-Bold", 30, 0, 0), _box("A", 16, 0, 40),
        _box("Serif", 9, 0, 300, chars=500),
    ]]
    expected_body[("A-Bold", "Serif")] += 1
    expected_sub[("A-Bold", "A")] += 1

    # 10: subheader chosen once per document (page 1 wins), bodies per page
    docs["d10"] = [
        [_box("J-Bold", 26, 0, 0), _box("J", 14, 0, 50),
         _box("Serif", 9, 0, 250, chars=350)],
        [_box("J-Bold", 26, 0, 0), _box("JAlt", 15, 0, 50),
         _box("Serif", 9, 0, 250, chars=350)],
    ]
    expected_body[("J-Bold", "Serif")] = 2
    expected_sub[("J-Bold", "J")] = 1  # JAlt never considered

    return docs, expected_body, expected_sub


@criterion("golden layout fixture extracts exactly the hand-labeled pairs")
def test_extraction_golden():
    docs, expected_body, expected_sub = ten_document_fixture()
    assert len(docs) == 10
    cfg = ExtractionConfig(subheader_distance_threshold=150.0, body_min_chars=100)
    result = extract_pairs(docs, cfg)
    body = {(r.header_id, r.follower_id): r.count for r in result.body.records}
    sub = {(r.header_id, r.follower_id): r.count for r in result.subheader.records}
    assert body == expected_body
    assert sub == expected_sub

    # monotone parameter sweeps
    body_counts = []
    for min_chars in (1, 20, 100, 250, 450, 1000):
        c = ExtractionConfig(subheader_distance_threshold=150.0, body_min_chars=min_chars)
        body_counts.append(extract_pairs(docs, c).body.total_count)
    assert body_counts == sorted(body_counts, reverse=True)

    sub_counts = []
    for dist in (5.0, 30.0, 60.0, 150.0, 500.0, 2000.0):
        c = ExtractionConfig(subheader_distance_threshold=dist, body_min_chars=100)
        sub_counts.append(extract_pairs(docs, c).subheader.total_count)
    assert sub_counts == sorted(sub_counts)


@criterion("snapshot round-trip replays 100 queries identically")
def test_snapshot_roundtrip_replay(toy_engine, tmp_path):
    path = tmp_path / "engine.snapshot"
    save_snapshot(toy_engine, path)
    loaded = load_snapshot(path)
    queries = []
    methods = toy_engine.available_methods()
    headers = list(toy_engine.header_store.ids)
    i = 0
    while len(queries) < 100:
        method = methods[i % len(methods)]
        header = headers[(i // len(methods)) % len(headers)]
        n = 3 + (i % 4)
        queries.append((method, header, n))
        i += 1
    for method, header, n in queries:
        before = toy_engine.recommend(method, header, n)
        after = loaded.recommend(method, header, n)
        assert before == after, (method, header, n)
