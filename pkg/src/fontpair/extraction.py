"""Header / sub-header / body font pair detection over laid-out text boxes.

Operates on structured page records (font name, size, bounding box, character
count), not raw PDF bytes. Detection is a pure function of the boxes and the
configuration, so documents can be processed independently and merged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .dataset import HEADER_BODY, HEADER_SUBHEADER, PairDataset, PairRecord


class PageSkipped(Exception):
    """Signal that a page does not qualify for pair detection."""


@dataclass(frozen=True)
class TextBox:
    """One laid-out text run: same font and size on one line."""

    page_id: str
    font_id: str
    font_size: float
    bbox: tuple[float, float, float, float]  # x0, y0, x1, y1
    char_count: int = 0

    def __post_init__(self) -> None:
        x0, y0, x1, y1 = self.bbox
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"degenerate bbox {self.bbox}")
        if self.font_size <= 0:
            raise ValueError(f"font size must be positive, got {self.font_size}")
        if self.char_count < 0:
            raise ValueError("char_count must be non-negative")

    @property
    def center(self) -> tuple[float, float]:
        x0, y0, x1, y1 = self.bbox
        return (x0 + x1) / 2.0, (y0 + y1) / 2.0

    @property
    def area(self) -> float:
        x0, y0, x1, y1 = self.bbox
        return (x1 - x0) * (y1 - y0)


@dataclass(frozen=True)
class ExtractionConfig:
    """Thresholds for pair detection.

    Defaults are config values, not tuned against labeled layouts.
    ``distance_axis`` selects whether the sub-header window uses full 2-D
    center distance or vertical distance only.
    """

    subheader_distance_threshold: float = 150.0
    body_min_chars: int = 100
    min_boxes_per_page: int = 2
    distance_axis: str = "2d"  # "2d" or "vertical"

    def __post_init__(self) -> None:
        if self.subheader_distance_threshold <= 0:
            raise ValueError("subheader_distance_threshold must be positive")
        if self.body_min_chars <= 0:
            raise ValueError("body_min_chars must be positive")
        if self.distance_axis not in ("2d", "vertical"):
            raise ValueError(f"unknown distance_axis {self.distance_axis!r}")


def _center_distance(a: TextBox, b: TextBox, axis: str = "2d") -> float:
    ax, ay = a.center
    bx, by = b.center
    if axis == "vertical":
        return abs(ay - by)
    return math.hypot(ax - bx, ay - by)


def _box_rank(box: TextBox) -> tuple:
    # largest font size, then largest area, then earliest reading order
    # (top-to-bottom, left-to-right)
    return (-box.font_size, -box.area, box.bbox[1], box.bbox[0])


def detect_header(page: Sequence[TextBox], min_boxes_per_page: int = 2) -> TextBox:
    """The page's largest text box by font size (area, then reading order on ties)."""
    if len(page) < min_boxes_per_page:
        raise PageSkipped(
            f"page has {len(page)} text boxes, fewer than {min_boxes_per_page}"
        )
    return min(page, key=_box_rank)


def detect_subheader(
    page: Sequence[TextBox], header: TextBox, cfg: ExtractionConfig
) -> TextBox | None:
    """Largest non-header box whose center lies within the distance threshold."""
    candidates = [
        box
        for box in page
        if box is not header
        and _center_distance(box, header, cfg.distance_axis)
        <= cfg.subheader_distance_threshold
    ]
    if not candidates:
        return None
    return min(candidates, key=_box_rank)


def detect_body_pair(
    page: Sequence[TextBox], header: TextBox, cfg: ExtractionConfig
) -> tuple[str, str] | None:
    """(header_font, body_font) for the nearest box with enough characters."""
    candidates = [
        box for box in page if box is not header and box.char_count >= cfg.body_min_chars
    ]
    if not candidates:
        return None
    nearest = min(
        candidates,
        key=lambda box: (
            _center_distance(box, header, "2d"),
            box.bbox[1],
            box.bbox[0],
            box.font_id,
        ),
    )
    return header.font_id, nearest.font_id


@dataclass
class ExtractionResult:
    body: PairDataset
    subheader: PairDataset
    skipped_pages: list[tuple[str, str, str]] = field(default_factory=list)
    malformed_records: int = 0

    def summary(self) -> str:
        return (
            f"body pairs: {len(self.body)} unique / {self.body.total_count} total; "
            f"subheader pairs: {len(self.subheader)} unique / {self.subheader.total_count} total; "
            f"skipped pages: {len(self.skipped_pages)}; "
            f"malformed records: {self.malformed_records}"
        )


def extract_pairs(
    documents: Mapping[str, Sequence[Sequence[TextBox]]] | Iterable[tuple[str, Sequence[Sequence[TextBox]]]],
    cfg: ExtractionConfig = ExtractionConfig(),
) -> ExtractionResult:
    """Detect header/body and header/sub-header pairs per document.

    ``documents`` maps a document id to its pages, each page a sequence of
    TextBoxes. Header/body pairs are emitted once per qualifying page; only
    one header/sub-header pair is kept per document (the first page that
    yields one). Skipped pages are recorded with a reason.
    """
    items = documents.items() if isinstance(documents, Mapping) else documents
    body_records: list[PairRecord] = []
    sub_records: list[PairRecord] = []
    skipped: list[tuple[str, str, str]] = []
    for doc_id, pages in items:
        subheader_found = False
        for page in pages:
            page_id = page[0].page_id if page else "?"
            try:
                header = detect_header(page, cfg.min_boxes_per_page)
            except PageSkipped as exc:
                skipped.append((doc_id, page_id, str(exc)))
                continue
            body = detect_body_pair(page, header, cfg)
            if body is not None:
                body_records.append(PairRecord(body[0], body[1]))
            if not subheader_found:
                sub = detect_subheader(page, header, cfg)
                if sub is not None:
                    sub_records.append(PairRecord(header.font_id, sub.font_id))
                    subheader_found = True
    return ExtractionResult(
        body=PairDataset(HEADER_BODY, body_records),
        subheader=PairDataset(HEADER_SUBHEADER, sub_records),
        skipped_pages=skipped,
    )


def read_page_records(
    source: str | Path,
) -> tuple[dict[str, list[list[TextBox]]], int]:
    """Parse a page record file into documents, counting malformed lines.

    Format per line:
    ``doc_id <tab> page_id <tab> font_id <tab> font_size <tab> x0,y0,x1,y1 <tab> char_count``
    Malformed records are skipped, not fatal.
    """
    path = Path(source)
    pages: dict[tuple[str, str], list[TextBox]] = {}
    doc_order: dict[str, list[tuple[str, str]]] = {}
    malformed = 0
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 6:
                malformed += 1
                continue
            doc_id, page_id, font_id, size_s, bbox_s, chars_s = parts
            try:
                coords = tuple(float(v) for v in bbox_s.split(","))
                if len(coords) != 4:
                    raise ValueError("bbox needs 4 coordinates")
                box = TextBox(page_id, font_id, float(size_s), coords, int(chars_s))
            except (ValueError, TypeError):
                malformed += 1
                continue
            key = (doc_id, page_id)
            if key not in pages:
                pages[key] = []
                doc_order.setdefault(doc_id, []).append(key)
            pages[key].append(box)
    documents = {
        doc_id: [pages[key] for key in keys] for doc_id, keys in doc_order.items()
    }
    return documents, malformed


def extract_pairs_from_file(
    source: str | Path, cfg: ExtractionConfig = ExtractionConfig()
) -> ExtractionResult:
    documents, malformed = read_page_records(source)
    result = extract_pairs(documents, cfg)
    result.malformed_records = malformed
    return result
