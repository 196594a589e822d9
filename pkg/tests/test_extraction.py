import pytest

from fontpair.extraction import (
    ExtractionConfig,
    PageSkipped,
    TextBox,
    detect_body_pair,
    detect_header,
    detect_subheader,
    extract_pairs,
    extract_pairs_from_file,
    read_page_records,
)


def box(font, size, x0, y0, w=100.0, h=20.0, chars=10, page="p1"):
    return TextBox(page, font, size, (x0, y0, x0 + w, y0 + h), chars)


CFG = ExtractionConfig(subheader_distance_threshold=150.0, body_min_chars=100)


class TestDetectHeader:
    def test_largest_font_size_wins(self):
        page = [box("A", 24, 0, 0), box("B", 12, 0, 50), box("C", 10, 0, 100)]
        assert detect_header(page).font_id == "A"

    def test_area_breaks_size_tie(self):
        small = TextBox("p1", "Small", 24.0, (0.0, 0.0, 40.0, 2.0))  # area 80
        large = TextBox("p1", "Large", 24.0, (0.0, 50.0, 50.0, 52.0))  # area 100
        assert detect_header([small, large]).font_id == "Large"

    def test_reading_order_breaks_remaining_tie(self):
        upper = box("Upper", 24, 0, 10)
        lower = box("Lower", 24, 0, 200)
        assert detect_header([lower, upper]).font_id == "Upper"

    def test_single_box_page_skipped(self):
        with pytest.raises(PageSkipped):
            detect_header([box("A", 24, 0, 0)], min_boxes_per_page=2)


class TestDetectSubheader:
    def test_candidate_within_half_threshold(self):
        header = box("H", 24, 0, 0)
        sub = box("S", 14, 0, 75)  # center distance 75 = 0.5 * threshold
        assert detect_subheader([header, sub], header, CFG).font_id == "S"

    def test_all_candidates_beyond_threshold(self):
        header = box("H", 24, 0, 0)
        far = box("S", 14, 0, 400)
        assert detect_subheader([header, far], header, CFG) is None

    def test_largest_in_range_candidate_wins(self):
        header = box("H", 24, 0, 0)
        small = box("S14", 14, 0, 60)
        large = box("S18", 18, 0, 90)
        assert detect_subheader([header, small, large], header, CFG).font_id == "S18"

    def test_header_never_its_own_subheader(self):
        header = box("H", 24, 0, 0)
        twin = box("H", 24, 0, 30)  # same font, different box: allowed
        found = detect_subheader([header, twin], header, CFG)
        assert found is twin

    def test_vertical_axis_mode(self):
        cfg = ExtractionConfig(
            subheader_distance_threshold=50.0, body_min_chars=100, distance_axis="vertical"
        )
        header = box("H", 24, 0, 0)
        sideways = box("S", 14, 500, 10)  # far in x, close in y
        assert detect_subheader([header, sideways], header, cfg).font_id == "S"


class TestDetectBodyPair:
    def test_char_threshold_filters(self):
        header = box("H", 24, 0, 0)
        rich = box("Rich", 10, 0, 100, chars=300)
        poor = box("Poor", 10, 0, 40, chars=50)
        assert detect_body_pair([header, rich, poor], header, CFG) == ("H", "Rich")

    def test_nearest_eligible_body_wins(self):
        header = box("H", 24, 0, 0)
        near = box("Near", 10, 0, 10, chars=200)
        far = box("Far", 10, 0, 40, chars=200)
        assert detect_body_pair([header, near, far], header, CFG) == ("H", "Near")

    def test_no_candidate_is_absent(self):
        header = box("H", 24, 0, 0)
        short = box("Short", 10, 0, 40, chars=5)
        assert detect_body_pair([header, short], header, CFG) is None


def golden_documents():
    """Hand-built layouts with known pairings."""
    docs = {}
    # doc1: one page, header + subheader + body
    docs["doc1"] = [[
        box("Helv-Bold", 30, 100, 50, chars=12),
        box("Helv", 16, 100, 90, chars=20),          # subheader: close, second largest
        box("Times", 10, 100, 300, chars=500),       # body: long text
    ]]
    # doc2: two pages; page 1 body only (subheader out of range),
    # page 2 provides the subheader pair
    docs["doc2"] = [
        [
            box("Futura-Bold", 28, 50, 40, chars=8),
            box("Garamond", 9, 50, 600, chars=800),  # too far for subheader, body ok
        ],
        [
            box("Futura-Bold", 28, 50, 40, chars=8),
            box("Futura", 18, 50, 80, chars=10),     # subheader
            box("Garamond", 9, 50, 500, chars=400),  # body (distance > threshold is fine)
        ],
    ]
    # doc3: scanned-style page with no boxes, then a single-box page
    docs["doc3"] = [[], [box("Lonely", 20, 0, 0)]]
    return docs


class TestExtractPairs:
    def test_golden_fixture(self):
        result = extract_pairs(golden_documents(), CFG)
        body = {(r.header_id, r.follower_id): r.count for r in result.body.records}
        sub = {(r.header_id, r.follower_id): r.count for r in result.subheader.records}
        assert body == {
            ("Helv-Bold", "Times"): 1,
            ("Futura-Bold", "Garamond"): 2,  # one per qualifying page
        }
        assert sub == {
            ("Helv-Bold", "Helv"): 1,
            ("Futura-Bold", "Futura"): 1,  # only one subheader pair per document
        }
        assert len(result.skipped_pages) == 2  # doc3: empty page + single-box page

    def test_boxless_document_yields_empty_datasets(self):
        result = extract_pairs({"scanned": [[], [], []]}, CFG)
        assert len(result.body) == 0
        assert len(result.subheader) == 0
        assert len(result.skipped_pages) == 3

    def test_rerun_is_identical(self):
        docs = golden_documents()
        first = extract_pairs(docs, CFG)
        second = extract_pairs(docs, CFG)
        assert first.body.records == second.body.records
        assert first.subheader.records == second.subheader.records

    def test_body_char_threshold_monotone(self):
        docs = golden_documents()
        counts = []
        for min_chars in (1, 50, 100, 300, 500, 1000):
            cfg = ExtractionConfig(
                subheader_distance_threshold=150.0, body_min_chars=min_chars
            )
            counts.append(extract_pairs(docs, cfg).body.total_count)
        assert counts == sorted(counts, reverse=True)

    def test_subheader_threshold_monotone(self):
        docs = golden_documents()
        counts = []
        for dist in (10.0, 40.0, 80.0, 150.0, 400.0, 1000.0):
            cfg = ExtractionConfig(
                subheader_distance_threshold=dist, body_min_chars=100
            )
            counts.append(extract_pairs(docs, cfg).subheader.total_count)
        assert counts == sorted(counts)


class TestPageRecordFile:
    def test_roundtrip_with_malformed_lines(self, tmp_path):
        path = tmp_path / "pages.tsv"
        path.write_text(
            "\n".join([
                "doc1\tp1\tHelv-Bold\t30\t100,50,200,70\t12",
                "doc1\tp1\tTimes\t10\t100,300,200,320\t500",
                "doc1\tp1\tBadBox\tnot_a_number\t0,0,1,1\t5",
                "too\tfew\tfields",
                "doc1\tp2\tSolo\t12\t0,0,10,10\t4",
            ]) + "\n",
            encoding="utf-8",
        )
        documents, malformed = read_page_records(path)
        assert malformed == 2
        assert len(documents["doc1"]) == 2
        result = extract_pairs_from_file(path, CFG)
        assert result.malformed_records == 2
        assert {(r.header_id, r.follower_id) for r in result.body.records} == {
            ("Helv-Bold", "Times")
        }
