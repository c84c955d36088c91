import csv
import io
import json

import pytest

from sevasr.metrics import SystemReport, rates_from_counts
from sevasr.report import ReportError, build_table, render, shade_column
from benchmark_rows import SYSTEM_ROWS, printed_wers, system_rates, total_rates


class TestShadeColumn:
    def test_three_distinct_values(self):
        assert shade_column([1, 2, 3]) == ["none", "light", "dark"]

    def test_all_equal(self):
        assert shade_column([5, 5, 5]) == ["none", "none", "none"]

    def test_ties_share_lower_shade(self):
        assert shade_column([1, 2, 2]) == ["none", "light", "light"]

    def test_single_value(self):
        assert shade_column([4.2]) == ["none"]

    def test_reference_fail_column_darkest(self):
        fails = [row[6] for row in SYSTEM_ROWS]
        shades = shade_column(fails)
        assert shades[fails.index(14.0)] == "dark"

    def test_empty_rejected(self):
        with pytest.raises(ReportError):
            shade_column([])

    def test_shades_partition_every_column(self):
        shades = shade_column([3.0, 1.0, 7.5, 2.2, 9.9])
        assert all(s in ("none", "light", "dark") for s in shades)
        assert len(shades) == 5


def _reports():
    rates = system_rates()
    wers = printed_wers()
    return [
        SystemReport(system_id=sys_id, rates=rates[sys_id], wer=wers[sys_id])
        for sys_id, *_ in SYSTEM_ROWS
    ]


class TestRender:
    def test_single_system_row(self):
        report = SystemReport("only", rates_from_counts(100, 1, 2, 3, 4), wer=10.0)
        md = render([report], "md")
        lines = md.strip().splitlines()
        assert lines[0].startswith("| System | WER | All | Lex | Gram | Cotx | Fail |")
        assert len(lines) == 3
        assert "| only |" in lines[2]

    def test_header_identical_across_formats(self):
        report = SystemReport("only", rates_from_counts(100, 1, 2, 3, 4), wer=None)
        md_header = render([report], "md").splitlines()[0]
        csv_header = render([report], "csv").splitlines()[0]
        json_doc = json.loads(render([report], "json"))
        assert [h.strip() for h in md_header.strip("|").split("|")] == [
            "System", "WER", "All", "Lex", "Gram", "Cotx", "Fail",
        ]
        assert csv_header.split(",")[:7] == [
            "system", "wer", "all", "lex", "gram", "cotx", "fail",
        ]
        assert json_doc["columns"] == ["system", "wer", "all", "lex", "gram", "cotx", "fail"]

    def test_empty_reports_header_only(self):
        md = render([], "md")
        assert len(md.strip().splitlines()) == 2
        csv_text = render([], "csv")
        assert len(csv_text.strip().splitlines()) == 1
        assert json.loads(render([], "json"))["rows"] == []

    def test_unknown_format_rejected(self):
        with pytest.raises(ReportError):
            render([], "pdf")

    def test_byte_identical_across_runs(self):
        for fmt in ("md", "csv", "json"):
            assert render(_reports(), fmt) == render(_reports(), fmt)

    def test_csv_carries_shades(self):
        rows = list(csv.DictReader(io.StringIO(render(_reports(), "csv"))))
        assert len(rows) == len(SYSTEM_ROWS)
        no_char = next(r for r in rows if r["system"] == "SB_no_char")
        assert no_char["fail_shade"] == "dark"
        assert no_char["fail"] == "14.0"
        for row in rows:
            for col in ("wer", "all", "lex", "gram", "cotx", "fail"):
                assert row[f"{col}_shade"] in ("none", "light", "dark")

    def test_markdown_shade_annotations(self):
        md = render(_reports(), "md")
        no_char_line = next(l for l in md.splitlines() if "SB_no_char" in l)
        assert "**14.0**" in no_char_line

    def test_aggregate_row_leads_and_is_unshaded(self):
        agg = SystemReport("Total", total_rates(), wer=18.77)
        table = build_table(_reports(), aggregate=agg)
        assert table.rows[0][0] == "Total"
        assert all(cell.shade == "none" for cell in table.rows[0][1])

    def test_json_cells_have_value_and_shade(self):
        doc = json.loads(render(_reports(), "json", meta={"note": "x"}))
        assert doc["meta"] == {"note": "x"}
        for row in doc["rows"]:
            for col, cell in row["cells"].items():
                assert set(cell) == {"value", "shade"}

    def test_missing_wer_renders_blank(self):
        report = SystemReport("nower", rates_from_counts(100, 1, 2, 3, 4), wer=None)
        md = render([report], "md")
        row = md.strip().splitlines()[2]
        assert row.split("|")[2].strip() == ""
