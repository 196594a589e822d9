"""Analyzing pairwise preference votes: consistency and method ranking.

Raters compare two candidate pairings at a time. The normalized difference
of the vote split measures agreement; binning it and chi-squared testing
against the analytic fair-coin null asks whether raters agree more than
chance. Bradley-Terry turns method-vs-method wins into strength scores.
"""

import numpy as np

from fontpair.study_analytics import (
    CHI2_CRITICAL_005,
    ComparisonRecord,
    bradley_terry_fit,
    consistency_report,
    normalized_difference,
    wins_from_comparisons,
)

rng = np.random.default_rng(5)
methods = ["learned", "popularity", "family", "random"]
true_strength = {"learned": 0.45, "popularity": 0.3, "family": 0.15, "random": 0.1}

records = []
for i in range(400):
    a, b = rng.choice(methods, size=2, replace=False)
    p_a = true_strength[a] / (true_strength[a] + true_strength[b])
    hits_a = int(rng.binomial(11, p_a))
    records.append(ComparisonRecord(f"c{i:03d}", hits_a, 11 - hits_a, a, b))

example = records[0]
print(f"example comparison {example.id}: {example.method1} {example.hit1} votes, "
      f"{example.method2} {example.hit2} votes, "
      f"normalized difference {normalized_difference(example):.3f}\n")

report = consistency_report(records)
print("consistency histogram (11 raters, 6 even bins over [0,1]):")
for i in range(6):
    lo, hi = report.histogram.bin_edges[i], report.histogram.bin_edges[i + 1]
    print(f"  d in [{lo:.2f},{hi:.2f}): observed {report.histogram.observed[i]:>3}, "
          f"random-null expects {report.histogram.expected[i]:7.2f}")
print(f"chi-squared, all bins:      {report.chi2_all_bins:8.2f} "
      f"(critical at 0.005 for {report.bins_used_all} bins: "
      f"{CHI2_CRITICAL_005.get(report.bins_used_all)})")
print(f"chi-squared, e<5 omitted:   {report.chi2_trimmed:8.2f} "
      f"(critical at 0.005 for {report.bins_used_trimmed} bins: "
      f"{CHI2_CRITICAL_005.get(report.bins_used_trimmed)})")
print("ratings this far above critical mean raters are NOT voting at random\n")

items, wins = wins_from_comparisons(records)
strengths = bradley_terry_fit(wins)
print("Bradley-Terry strengths (sum to 1):")
for name, s in sorted(zip(items, strengths), key=lambda kv: -kv[1]):
    print(f"  {name:<12} {s:.3f}   (planted: {true_strength[name]:.2f})")
