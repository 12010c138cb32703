import itertools

import pytest
from hypothesis import given, settings, strategies as st

from twinwidth import Trigraph
from twinwidth.formats import (FormatError, compact_mapping, format_dimacs, format_sequence_text,
                               format_trigraph, is_compact, parse_dimacs, parse_sequence_text,
                               parse_trigraph, trigraph_digest)


def test_trigraph_header_counts_checked():
    with pytest.raises(FormatError):
        parse_trigraph("p tww 3 2 0\ne 1 2\n")
    with pytest.raises(FormatError):
        parse_trigraph("e 1 2\n")
    with pytest.raises(FormatError):
        parse_trigraph("p tww 2 1 0\ne 1 x\n")
    with pytest.raises(FormatError):
        parse_trigraph("p tww 2 1 1\ne 1 2\nr 1 2\n")


def test_compaction():
    g = Trigraph([3, 7])
    g.add_edge(3, 7)
    assert not is_compact(g)
    with pytest.raises(FormatError):
        format_trigraph(g)
    h = g.relabel(compact_mapping(g))
    assert parse_trigraph(format_trigraph(h)) == h


@st.composite
def trigraphs(draw):
    n = draw(st.integers(0, 10))
    g = Trigraph(range(1, n + 1))
    for u, v in itertools.combinations(range(1, n + 1), 2):
        kind = draw(st.sampled_from("nnbr"))
        if kind != "n":
            g.add_edge(u, v, red=kind == "r")
    return g


@settings(max_examples=100, deadline=None)
@given(trigraphs())
def test_trigraph_round_trip(g):
    text = format_trigraph(g, comments=["fuzz"])
    h = parse_trigraph(text)
    assert h == g
    assert format_trigraph(h, comments=["fuzz"]) == text
    assert trigraph_digest(h) == trigraph_digest(g)


def test_sequence_text():
    text = format_sequence_text(4, [(1, 2), (3, 5)], partial=True, final_digest="ab")
    assert parse_sequence_text(text) == (4, [(1, 2), (3, 5)], True, "ab")
    with pytest.raises(FormatError):
        parse_sequence_text("s tww 4 2\n1 2\n")
    with pytest.raises(FormatError):
        parse_sequence_text("s tww 3 1\n1 2\n")
    with pytest.raises(FormatError):
        parse_sequence_text("1 2\n")


def test_dimacs():
    text = "c hi\np cnf 3 2\n1 -2\n 3 0 -1 0\n%\n0\n"
    assert parse_dimacs(text) == (3, [[1, -2, 3], [-1]])
    assert parse_dimacs(format_dimacs(3, [[1, -2, 3], [-1]])) == (3, [[1, -2, 3], [-1]])
    with pytest.raises(FormatError):
        parse_dimacs("p cnf 2 1\n1 5 0\n")
    with pytest.raises(FormatError):
        parse_dimacs("p cnf 2 2\n1 0\n")
    with pytest.raises(FormatError):
        parse_dimacs("1 2 0\n")
