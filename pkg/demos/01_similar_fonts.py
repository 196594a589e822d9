"""Nearest-neighbor font lookup over a synthetic feature space.

Every font is a point in feature space; cosine similarity between points
tracks visual similarity, so the top-k neighbors of a query font are its
closest visual relatives.
"""

import numpy as np

from fontpair import FeatureStore, knn

rng = np.random.default_rng(7)

# Three loose "style clusters" plus noise: serif-ish, sans-ish, script-ish.
centers = {"Serif": rng.normal(size=16), "Sans": rng.normal(size=16), "Script": rng.normal(size=16)}
fonts = []
for family, center in centers.items():
    for style in ("", "-Bold", "-Italic", "-Light"):
        fonts.append((f"{family}{style}", center + 0.15 * rng.normal(size=16)))
store = FeatureStore(fonts)

query = "Serif-Bold"
print(f"fonts most similar to {query}:")
for rank, neighbor in enumerate(knn(store.vector(query), store, 5, exclude={query}), 1):
    print(f"  {rank}. {neighbor.font_id:<14} cosine {neighbor.score:+.4f}")

# Everything in the same cluster should outrank everything outside it.
top3 = [nb.font_id for nb in knn(store.vector(query), store, 3, exclude={query})]
assert all(name.startswith("Serif") for name in top3), top3
print("\nall top-3 neighbors come from the query's own cluster, as expected")
