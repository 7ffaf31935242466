import pytest

from rtgdiag import (LengthMismatch, ResponseVector, attach_response, build_extended_fdt,
                     build_generalized_fdt, dumps_table, loads_table, render_table)
from rtgdiag.testsynth import build_complete_test

GENERALIZED_MARKS = {
    "X14Y": {"I11", "I41", "I44", "I45", "I61"},
    "X15Y": {"I11", "I51", "I52", "I55", "I61"},
    "X2Y": {"I22", "I23", "I61"},
    "X3Y": {"I31", "I32", "I61"},
}

EXTENDED_MARKS = {
    "111₁": {"I11", "I41", "I61"},
    "141₁": {"I11", "I44", "I61"},
    "151₁": {"I11", "I45", "I61"},
    "111₂": {"I11", "I51", "I61"},
    "121₁": {"I11", "I52", "I61"},
    "151₂": {"I11", "I55", "I61"},
    "21₁": {"I22", "I61"},
    "31": {"I23", "I61"},
    "11": {"I31", "I61"},
    "21₂": {"I32", "I61"},
}


def test_generalized_rows_match_reference(g, paths):
    table = build_generalized_fdt(g, paths)
    assert table.kind == "generalized"
    got = {r.label: {m.label for m in r.marks} for r in table.rows}
    assert got == GENERALIZED_MARKS


def test_extended_rows_match_reference(extended):
    got = {r.label: {m.label for m in r.marks} for r in extended.rows}
    assert got == EXTENDED_MARKS
    assert extended.row_labels() == tuple(EXTENDED_MARKS)


def test_single_rib_generalized_row():
    from test_testsynth import single_rib_graph
    from rtgdiag.testsynth import enumerate_paths
    g = single_rib_graph()
    table = build_generalized_fdt(g, enumerate_paths(g))
    assert len(table.rows) == 1
    assert {m.label for m in table.rows[0].marks} == {"I11"}


def test_term_marks_subset_of_path_marks(g, paths, suite, extended):
    generalized = build_generalized_fdt(g, paths)
    by_path = {r.label: r.marks for r in generalized.rows}
    for row in extended.rows:
        assert row.marks <= by_path[row.path]


def test_extended_marks_union_is_column_set(g, extended):
    union = frozenset().union(*(r.marks for r in extended.rows))
    assert union == frozenset(extended.columns)


def test_attach_response(extended):
    v = ResponseVector((0, 0, 0, 1, 1, 1, 0, 0, 0, 0))
    bound = attach_response(extended, v)
    assert bound.response == v
    assert extended.response is None  # original untouched


def test_attach_response_generalized(g, paths):
    table = build_generalized_fdt(g, paths)
    bound = attach_response(table, ResponseVector((0, 1, 0, 0)))
    assert [r.v for r in bound.rows] == [0, 1, 0, 0]


def test_attach_response_length_mismatch(extended):
    with pytest.raises(LengthMismatch):
        attach_response(extended, ResponseVector((0, 1)))


def test_json_round_trip(g, paths, extended):
    for table in (build_generalized_fdt(g, paths),
                  attach_response(extended, ResponseVector((0, 0, 0, 1, 1, 1, 0, 0, 0, 0)))):
        assert loads_table(dumps_table(table)) == table


def test_render_cell_content(extended):
    v = ResponseVector((0, 0, 0, 1, 1, 1, 0, 0, 0, 0))
    text = render_table(attach_response(extended, v))
    lines = text.splitlines()
    assert lines[0].split() == ["Ti\\Ij", "I11", "I22", "I23", "I31", "I32", "I41",
                                "I44", "I45", "I51", "I52", "I55", "I61", "V"]
    # row 111₂ marks I11, I51, I61 and fails
    row = next(l for l in lines if l.startswith("111₂"))
    assert row.split() == ["111₂", "1", "1", "1", "1"]
    # column alignment: the 1 under I51 sits in the I51 column span
    header = lines[0]
    i51 = header.index("I51")
    i41 = header.index("I41")
    assert row[i51:i51 + 3].strip() == "1"
    assert row[i41:i41 + 3].strip() == ""


def test_complete_test_rows_follow_suite_order(g):
    suite = build_complete_test(g)
    table = build_extended_fdt(g, suite)
    assert table.row_labels() == suite.labels()
