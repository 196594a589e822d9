"""Detecting header/sub-header and header/body font pairs from page layouts.

Input is structured text-box records (font, size, bbox, character count),
one page at a time: the largest box is the header, a nearby large box is
the sub-header, and the nearest long text block supplies the body pair.
"""

from fontpair.extraction import ExtractionConfig, TextBox, extract_pairs


def box(page, font, size, x0, y0, w, h, chars):
    return TextBox(page, font, size, (x0, y0, x0 + w, y0 + h), chars)


documents = {
    "brochure": [
        [  # page 1: title, strapline, two columns of body text
            box("p1", "Didot-Bold", 42, 60, 40, 480, 50, 18),
            box("p1", "Didot", 21, 60, 110, 360, 26, 34),
            box("p1", "Garamond", 10, 60, 180, 220, 500, 1400),
            box("p1", "Garamond", 10, 320, 180, 220, 500, 1350),
        ],
        [  # page 2: section head and more body
            box("p2", "Didot-Bold", 30, 60, 40, 300, 36, 12),
            box("p2", "Garamond", 10, 60, 120, 480, 560, 2100),
        ],
    ],
    "flyer": [
        [  # everything is display text: no body candidates at all
            box("p1", "Impact", 64, 20, 20, 560, 80, 9),
            box("p1", "Impact-Condensed", 28, 20, 130, 400, 40, 16),
        ],
    ],
    "scan": [[]],  # a scanned page with no text boxes
}

cfg = ExtractionConfig(subheader_distance_threshold=150.0, body_min_chars=100)
result = extract_pairs(documents, cfg)

print("header/body pairs:")
for rec in result.body.records:
    print(f"  {rec.header_id:<18} + {rec.follower_id:<12} x{rec.count}")
print("header/sub-header pairs:")
for rec in result.subheader.records:
    print(f"  {rec.header_id:<18} + {rec.follower_id:<12} x{rec.count}")
print(f"skipped pages: {result.skipped_pages}")
print(f"\nsummary: {result.summary()}")
