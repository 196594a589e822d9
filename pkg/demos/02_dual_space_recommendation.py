"""Dual-space kNN recommendation, with and without idf weighting.

Headers similar to the query vote for their own follower fonts; every
follower in the catalog is then scored against those candidates. The idf
variant damps followers that pair with many different headers.
"""

import numpy as np

from fontpair import DsknnParams, FeatureStore, PairDataset, PairRecord, compute_idf
from fontpair.dsknn import recommend

rng = np.random.default_rng(21)
dim = 12

headers = {f"Head{i:02d}": rng.normal(size=dim) for i in range(14)}
followers = {f"Body{i:02d}": rng.normal(size=dim) for i in range(10)}
# one deliberately ubiquitous follower
followers["BodyPopular"] = rng.normal(size=dim)

header_store = FeatureStore(sorted(headers.items()))
follower_store = FeatureStore(sorted(followers.items()))

records = []
for i, header in enumerate(sorted(headers)):
    records.append(PairRecord(header, "BodyPopular", 2))  # everyone pairs with it
    records.append(PairRecord(header, f"Body{i % 10:02d}", 1))
train = PairDataset("header_body", records)
idf = compute_idf(train)

query = rng.normal(size=dim)

plain = recommend(query, train, header_store, follower_store,
                  DsknnParams(k1=4, k2=3, n=5))
weighted = recommend(query, train, header_store, follower_store,
                     DsknnParams(k1=4, k2=3, use_idf=True, n=5), idf=idf)

print("plain scoring (popularity-friendly):")
for fid, score in plain:
    print(f"  {fid:<12} {score:+.4f}")

print("\nidf-weighted scoring (ubiquitous follower damped):")
for fid, score in weighted:
    print(f"  {fid:<12} {score:+.4f}")

print(f"\nidf weight of BodyPopular: {idf['BodyPopular']:.2f} "
      f"(paired with every header, so the floor of 1.0)")
rare = min(idf, key=idf.get)
print(f"idf range across followers: {min(idf.values()):.2f} .. {max(idf.values()):.2f}")
