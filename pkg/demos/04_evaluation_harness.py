"""Top-N retrieval evaluation across methods on a synthetic pairing corpus.

Headers are split 9:1 with no overlap, so every test query is an unseen
header; ground truth is the header's observed follower set. Weighted
variants use idf from the training split only.
"""

import numpy as np

from fontpair import FeatureStore, PairDataset, PairRecord, compute_idf, split_by_header
from fontpair.baselines import popularity_recommend, sknn_recommend
from fontpair.dsknn import DsknnParams, recommend as ds_recommend
from fontpair.evaluation import evaluate_topn

rng = np.random.default_rng(11)
dim = 10

# followers cluster around prototypes; headers prefer followers near "their"
# prototype, so feature-space neighbors share followers (the dual-space premise)
prototypes = rng.normal(size=(4, dim))
followers = {}
for j in range(24):
    proto = prototypes[j % 4]
    followers[f"B{j:02d}"] = proto + 0.2 * rng.normal(size=dim)
headers, records = {}, []
for i in range(40):
    k = i % 4
    headers[f"H{i:02d}"] = prototypes[k] + 0.2 * rng.normal(size=dim)
    for j in range(4):
        records.append(PairRecord(f"H{i:02d}", f"B{(k + 4 * j) % 24:02d}"))

header_store = FeatureStore(sorted(headers.items()))
follower_store = FeatureStore(sorted(followers.items()))
dataset = PairDataset("header_body", records)
train, test = split_by_header(dataset, 0.9, seed=1)
idf = compute_idf(train)
print(f"{train.m} train headers, {test.m} test headers, "
      f"{len(follower_store)} candidate followers\n")

recommenders = {
    "dsknn": lambda h, n: [f for f, _ in ds_recommend(
        header_store.vector(h), train, header_store, follower_store,
        DsknnParams(k1=5, k2=3, n=n))],
    "dsknn+idf": lambda h, n: [f for f, _ in ds_recommend(
        header_store.vector(h), train, header_store, follower_store,
        DsknnParams(k1=5, k2=3, use_idf=True, n=n), idf=idf)],
    "popularity": lambda h, n: [f for f, _ in popularity_recommend(train, n)],
    "sknn": lambda h, n: [f for f, _ in sknn_recommend(
        header_store.vector(h), follower_store, n)],
}

ns = [1, 3, 5, 10]
print(f"{'method':<12}" + "".join(f"  P@{n:<3} R@{n:<4}" for n in ns))
for name, fn in recommenders.items():
    result = evaluate_topn(fn, test, train, idf, ns,
                           known_headers=header_store.ids)
    cells = ""
    for n in ns:
        rep = result.reports[n]
        cells += f"  {rep.precision:.2f}  {rep.recall:.2f} "
    print(f"{name:<12}{cells}")

print("\n(weighted variants go above 1.0 only for weighted precision, by design)")
