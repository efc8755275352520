import json
from fractions import Fraction

import pytest

from twistorlab.catalog import (
    NO_SPIN, default_catalog, dump_catalog, evaluate_catalog, evaluate_entry, format_table, load_catalog,
)


def _row(label_prefix, n=6):
    entries = [e for e in default_catalog([n]) if e["label"].startswith(label_prefix)]
    assert entries, label_prefix
    return [evaluate_entry(e) for e in entries]


def test_case2_s0mod4_quarter():
    rows = _row("cw/case2/s=0mod4/")
    assert [r["q"] for r in rows] == ["1/4", "1/4"]
    assert all(r["pass"] for r in rows)


def test_sphere_antipodal_obstruction():
    (row,) = _row("sphere/pm-I/", n=7)
    assert row["q"] == NO_SPIN and row["dim"] is None and row["pass"]


def test_open_question_row_is_confirmed_by_residual():
    rows = _row("m-minus/m=2,alpha/", n=4)
    assert [r["q"] for r in rows] == ["3/2", "0", "0", "0"]
    assert all(r["pass"] and r["residual"] <= 1e-5 for r in rows)


def test_catalog_values_in_table_ranges():
    values = {Fraction(r["expected_q"]) for r in default_catalog(range(3, 8)) if r["expected_q"] != NO_SPIN}
    assert values <= {Fraction(v) for v in ("2", "3/2", "1", "3/4", "1/2", "1/4", "0")}


def test_wrong_expectation_fails():
    entry = dict(default_catalog([4])[0])
    entry["expected_q"] = "1/4"
    assert evaluate_entry(entry)["pass"] is False


def test_dump_and_load(tmp_path):
    entries = default_catalog([4])
    path = tmp_path / "cat.json"
    dump_catalog(entries, path)
    assert load_catalog(path) == entries
    path.write_text(json.dumps({"space": {}}))
    with pytest.raises(ValueError):
        load_catalog(path)


def test_format_table():
    assert format_table([]) == "(empty catalog)"
    rows = evaluate_catalog(default_catalog([4])[:2])
    text = format_table(rows)
    assert text.splitlines()[0].split() == ["label", "n", "dim", "q", "expected", "verdict"]
    assert len(text.splitlines()) == 4
