"""Pairwise preference analytics: rating consistency, the analytic random
null, chi-squared testing with bin-omission rules, and Bradley-Terry ranking."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

# chi-squared upper 0.005 critical values, keyed by histogram bin count
# (degrees of freedom = bins - 1)
CHI2_CRITICAL_005 = {6: 16.750, 5: 14.860}


@dataclass(frozen=True)
class ComparisonRecord:
    """One pairwise comparison: vote counts for each side."""

    id: str
    hit1: int
    hit2: int
    method1: str | None = None
    method2: str | None = None

    def __post_init__(self) -> None:
        if self.hit1 < 0 or self.hit2 < 0:
            raise ValueError("hit counts must be non-negative")
        if self.hit1 + self.hit2 < 1:
            raise ValueError("a comparison needs at least one vote")

    @property
    def raters(self) -> int:
        return self.hit1 + self.hit2


def normalized_difference(rec: ComparisonRecord) -> float:
    """|hit1 - hit2| / (hit1 + hit2): 0 = perfect split, 1 = unanimity."""
    return abs(rec.hit1 - rec.hit2) / (rec.hit1 + rec.hit2)


def bin_index(d: float, bins: int) -> int:
    """Even partition of [0, 1]: left-closed, right-open, last bin closed at 1."""
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"normalized difference must lie in [0, 1], got {d}")
    return min(int(d * bins), bins - 1)


def random_rater_pdf(num_raters: int, bins: int = 6) -> np.ndarray:
    """Analytic bin masses of the normalized difference under fair-coin votes.

    With n independent fair raters, hit1 is Binomial(n, 1/2); each outcome's
    normalized difference lands in one bin. Computed with exact rationals,
    so the masses sum to 1 up to a single float conversion.
    """
    if num_raters < 1:
        raise ValueError("need at least one rater")
    if bins < 1:
        raise ValueError("need at least one bin")
    masses = [Fraction(0)] * bins
    denom = Fraction(1, 2**num_raters)
    for k in range(num_raters + 1):
        d = abs(num_raters - 2 * k) / num_raters
        masses[bin_index(d, bins)] += math.comb(num_raters, k) * denom
    return np.array([float(m) for m in masses])


def chi_squared(
    observed: Sequence[float],
    expected: Sequence[float],
    omit_below: float | None = None,
) -> tuple[float, int]:
    """Goodness-of-fit statistic with the small-expectation omission rules.

    Bins with zero expectation are always omitted; with ``omit_below`` set
    (typically 5), bins whose expectation falls below it are omitted too.
    Returns (statistic, number of bins actually summed).
    """
    obs = np.asarray(observed, dtype=np.float64)
    exp = np.asarray(expected, dtype=np.float64)
    if obs.shape != exp.shape:
        raise ValueError("observed and expected lengths differ")
    keep = exp > 0.0
    if omit_below is not None:
        keep &= exp >= omit_below
    if not np.any(keep):
        raise ValueError("all bins omitted; nothing to test")
    stat = float(np.sum((obs[keep] - exp[keep]) ** 2 / exp[keep]))
    return stat, int(np.count_nonzero(keep))


@dataclass
class ConsistencyHistogram:
    bin_edges: np.ndarray  # length bins + 1
    observed: np.ndarray  # integer counts per bin
    expected: np.ndarray  # analytic random-null counts per bin


@dataclass
class ConsistencyReport:
    histogram: ConsistencyHistogram
    chi2_all_bins: float
    bins_used_all: int
    chi2_trimmed: float  # bins with expectation < 5 omitted
    bins_used_trimmed: int

    def critical_value(self, trimmed: bool = True) -> float | None:
        bins = self.bins_used_trimmed if trimmed else self.bins_used_all
        return CHI2_CRITICAL_005.get(bins)


def consistency_report(
    records: Sequence[ComparisonRecord],
    num_raters: int | None = None,
    bins: int = 6,
) -> ConsistencyReport:
    """Bin the observed consistency values and test them against the random null.

    The expected counts use each record's own rater count unless a fixed
    ``num_raters`` is given (vote totals vary across crowdsourced records,
    so the null is accumulated per record). Both omission rules are applied:
    zero-expectation bins only, and additionally expectation < 5.
    """
    if not records:
        raise ValueError("no comparison records")
    observed = np.zeros(bins, dtype=np.int64)
    expected = np.zeros(bins, dtype=np.float64)
    pdf_cache: dict[int, np.ndarray] = {}
    for rec in records:
        observed[bin_index(normalized_difference(rec), bins)] += 1
        raters = num_raters if num_raters is not None else rec.raters
        if raters not in pdf_cache:
            pdf_cache[raters] = random_rater_pdf(raters, bins)
        expected += pdf_cache[raters]
    stat_all, used_all = chi_squared(observed, expected)
    try:
        stat_trim, used_trim = chi_squared(observed, expected, omit_below=5.0)
    except ValueError:
        # too few records: every bin expects < 5, the trimmed test is undefined
        stat_trim, used_trim = float("nan"), 0
    edges = np.linspace(0.0, 1.0, bins + 1)
    return ConsistencyReport(
        ConsistencyHistogram(edges, observed, expected),
        stat_all,
        used_all,
        stat_trim,
        used_trim,
    )


def bradley_terry_fit(
    wins: np.ndarray, tol: float = 1e-10, max_iter: int = 10000
) -> np.ndarray:
    """Maximum-likelihood strengths from a pairwise win-count matrix.

    ``wins[i, j]`` counts how often item i beat item j. Fit by the standard
    minorize-maximize iteration; strengths are normalized to sum to 1.
    Items that never win are reported with a warning (their strength tends
    to zero); a disconnected comparison graph is an error because relative
    strengths across components are unidentifiable.
    """
    w = np.asarray(wins, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("wins must be a square matrix")
    if np.any(w < 0):
        raise ValueError("win counts must be non-negative")
    n = w.shape[0]
    games = w + w.T
    if w.sum() <= 0:
        raise ValueError("no wins recorded")

    components = _connected_components(games > 0)
    if len(components) > 1:
        raise ValueError(
            "comparison graph is disconnected; components: "
            + "; ".join(str(sorted(c)) for c in components)
        )

    total_wins = w.sum(axis=1)
    zero_win = np.flatnonzero(total_wins == 0)
    if zero_win.size:
        warnings.warn(
            f"items {zero_win.tolist()} never win; their strengths tend to zero",
            RuntimeWarning,
            stacklevel=2,
        )

    strengths = np.full(n, 1.0 / n)
    floor = np.finfo(np.float64).tiny
    for _ in range(max_iter):
        pair_sums = strengths[:, None] + strengths[None, :]
        ratios = np.divide(games, pair_sums, out=np.zeros_like(games), where=games > 0)
        np.fill_diagonal(ratios, 0.0)
        denom = ratios.sum(axis=1)
        updated = np.where(denom > 0, total_wins / np.maximum(denom, floor), strengths)
        updated = np.maximum(updated, floor)
        updated /= updated.sum()
        change = np.max(np.abs(updated - strengths) / np.maximum(strengths, floor))
        strengths = updated
        if change < tol:
            break
    return strengths


def _connected_components(adjacency: np.ndarray) -> list[set[int]]:
    n = adjacency.shape[0]
    unseen = set(range(n))
    components = []
    while unseen:
        start = min(unseen)
        stack = [start]
        comp = set()
        while stack:
            node = stack.pop()
            if node in comp:
                continue
            comp.add(node)
            stack.extend(
                int(j) for j in np.flatnonzero(adjacency[node]) if int(j) not in comp
            )
        components.append(comp)
        unseen -= comp
    return components


def wins_from_comparisons(
    records: Sequence[ComparisonRecord],
) -> tuple[list[str], np.ndarray]:
    """Aggregate method-vs-method hit counts into a win matrix.

    Records must carry method names. Returns (items, wins) with items sorted
    for a stable ordering.
    """
    items = sorted(
        {r.method1 for r in records if r.method1}
        | {r.method2 for r in records if r.method2}
    )
    index = {name: i for i, name in enumerate(items)}
    wins = np.zeros((len(items), len(items)))
    for rec in records:
        if rec.method1 is None or rec.method2 is None:
            raise ValueError(f"comparison {rec.id} lacks method names")
        i, j = index[rec.method1], index[rec.method2]
        wins[i, j] += rec.hit1
        wins[j, i] += rec.hit2
    return items, wins


def read_comparisons(source: str | Path) -> list[ComparisonRecord]:
    """Read ``comparison_id <tab> method1 <tab> method2 <tab> hit1 <tab> hit2`` lines."""
    path = Path(source)
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 tab-separated fields")
            cid, m1, m2, h1, h2 = parts
            records.append(ComparisonRecord(cid, int(h1), int(h2), m1, m2))
    return records


def write_comparison(
    path: str | Path, rec: ComparisonRecord
) -> None:
    """Append one comparison record (the capture log format)."""
    with Path(path).open("a", encoding="utf-8") as fh:
        fh.write(
            f"{rec.id}\t{rec.method1 or '-'}\t{rec.method2 or '-'}\t{rec.hit1}\t{rec.hit2}\n"
        )
