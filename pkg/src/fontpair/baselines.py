"""Rule-based comparison methods: popularity, simple kNN, same family, contrast hook."""

from __future__ import annotations

import random
import re
from typing import Callable, Sequence

from .dataset import FeatureStore, PairDataset, popularity_counts
from .similarity import cosine, knn

# Style words stripped from PostScript-style names when parsing the family.
_STYLE_WORDS = ("bold", "italic", "oblique", "light", "black", "condensed")
_STYLE_SUFFIX = re.compile(
    r"(?:{})+$".format("|".join(_STYLE_WORDS)), re.IGNORECASE
)


def family_name(font_id: str) -> str:
    """Family part of a PostScript-style name: text before the first hyphen,
    with trailing style words (Bold, Italic, ...) stripped case-insensitively.

    A heuristic: falls back to the unstripped prefix rather than returning
    an empty family.
    """
    if not font_id:
        raise ValueError("empty font id")
    prefix = font_id.split("-", 1)[0]
    stripped = _STYLE_SUFFIX.sub("", prefix)
    return stripped if stripped else prefix


def popularity_recommend(train: PairDataset, n: int) -> list[tuple[str, float]]:
    """Top-n followers by pairing frequency; the query header is ignored."""
    if not train:
        raise ValueError("empty training dataset")
    counts = popularity_counts(train)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(f, float(c)) for f, c in ranked[:n]]


def sknn_recommend(
    query_header: Sequence[float], follower_store: FeatureStore, n: int
) -> list[tuple[str, float]]:
    """Top-n followers by cosine similarity to the query header."""
    return [(nb.font_id, nb.score) for nb in knn(query_header, follower_store, n)]


def same_family_recommend(
    query_header_id: str, follower_store: FeatureStore, n: int, seed: int = 0
) -> list[str]:
    """Up to n followers from the query's font family, uniformly sampled.

    May return fewer than n (or none) when the family is sparse in the store.
    """
    family = family_name(query_header_id)
    matches = [
        font_id
        for font_id in follower_store.ids
        if font_id != query_header_id and family_name(font_id) == family
    ]
    rng = random.Random(seed)
    return rng.sample(matches, min(n, len(matches)))


ConsimHook = Callable[[Sequence[float], Sequence[float]], float]

_consim_hook: ConsimHook | None = None


def register_consim(hook: ConsimHook | None) -> None:
    """Install (or clear) the contrast-similarity scoring implementation."""
    global _consim_hook
    _consim_hook = hook


def default_consim(contrast_target: float = 0.5) -> ConsimHook:
    """Stand-in contrast scorer: best when cosine equals the contrast target.

    This is NOT the published contrast-similarity metric, which lives in an
    external implementation; register a real hook to reproduce it.
    """

    def hook(x: Sequence[float], y: Sequence[float]) -> float:
        return -abs(cosine(x, y) - contrast_target)

    return hook


def consim_score(
    x: Sequence[float],
    y: Sequence[float],
    hook: ConsimHook | None = None,
    use_default: bool = True,
) -> float:
    """Delegate to the registered contrast-similarity hook.

    Resolution order: explicit ``hook`` argument, then the registered hook,
    then the labeled stand-in (unless ``use_default`` is off).
    """
    chosen = hook or _consim_hook
    if chosen is None:
        if not use_default:
            raise RuntimeError("no contrast-similarity hook registered")
        chosen = default_consim()
    return chosen(x, y)


def consim_recommend(
    query_header: Sequence[float],
    follower_store: FeatureStore,
    n: int,
    hook: ConsimHook | None = None,
) -> list[tuple[str, float]]:
    scored = [
        (font_id, consim_score(query_header, follower_store.vector(font_id), hook))
        for font_id in follower_store.ids
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:n]
