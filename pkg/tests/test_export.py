import random

import pytest
from hypothesis import given, settings, strategies as st

from pfsa_mml.automaton import Pfsa, build_canonical
from pfsa_mml.corpus import SymbolTable
from pfsa_mml.export import (ComparisonReport, DotOptions, MalformedAutomatonFile, PfsaSummary,
                             dump_automaton, dump_trace, load_automaton, parse_report,
                             render_report, to_dot)
from pfsa_mml.mml import NotScoreable, mml_bits
from pfsa_mml.reduce import TraceStep

from oracles import random_automaton

AB = SymbolTable(["!", "a", "b"])


def test_dot_of_two_state_trie():
    p = build_canonical([[1, 0], [1, 0]], AB)
    assert to_dot(p) == (
        'digraph pfsa {\n'
        '  rankdir=LR;\n'
        '  node [shape=circle];\n'
        '  0 [label="0"];\n'
        '  1 [label="1 !^2"];\n'
        '  0 -> 1 [label="a^2"];\n'
        '}\n')


def test_dot_options():
    p = build_canonical([[1, 0], [1, 0], [2, 0]], AB)
    assert "->" not in to_dot(p, DotOptions(prune_threshold=100))
    plain = to_dot(p, DotOptions(show_frequencies=False))
    assert '[label="a"]' in plain and "^" not in plain
    edges = to_dot(p, DotOptions(delimiter_edges=True))
    assert '1 -> 0 [label="!^2"];' in edges
    pruned = to_dot(p, DotOptions(prune_threshold=2))
    assert 'label="b^1"' not in pruned and 'label="a^2"' in pruned


def test_dot_escapes_quotes_and_sorts_edges():
    p = Pfsa(2, [(1, 0, 0, 1), (0, 2, 1, 1), (0, 1, 1, 1)], SymbolTable(["!", 'q"x', "a"]))
    text = to_dot(p)
    assert r'label="q\"x^1"' in text
    assert text.index('q\\"x') < text.index('"a^1"')


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 5))
def test_dot_is_deterministic_and_pure(seed, threshold):
    p = random_automaton(random.Random(seed), 20)
    shuffled = Pfsa(p.n_states, random.Random(seed).sample(list(p.arcs), p.n_arcs), p.symbols)
    opts = DotOptions(prune_threshold=threshold)
    assert to_dot(p, opts) == to_dot(shuffled, opts)
    assert shuffled == p
    assert p.n_arcs == len(shuffled.arcs)


def test_large_report_cells():
    assert PfsaSummary(35243.58, 1168, 1167).cell() == "35243.58 bits (1168 states, 1167 arcs)"
    assert PfsaSummary(30366.55, 142, 595).cell() == "30366.55 bits (142 states, 595 arcs)"
    assert PfsaSummary(2.005, 1, 0).cell() == "2.00 bits (1 states, 0 arcs)"


def report(values):
    r = ComparisonReport(["left", "right"])
    for (mode, lang), (c, rd) in values.items():
        r.add(mode, lang, c, rd)
    return r


def test_render_layout():
    r = report({
        ("diachronic", "left"): (PfsaSummary(10.0, 5, 4), PfsaSummary(8.0, 2, 3)),
        ("diachronic", "right"): (PfsaSummary(11.0, 6, 5), PfsaSummary(9.0, 3, 3)),
        ("allophonic", "left"): (PfsaSummary(12.0, 7, 6), PfsaSummary(9.5, 3, 4)),
        ("allophonic", "right"): (PfsaSummary(13.0, 8, 7), PfsaSummary(9.9, 3, 5)),
    })
    text = render_report(r)
    lines = text.splitlines()
    assert lines[0] == "MML of the canonical PFSA"
    assert "MML of the reduced PFSA" in lines
    assert lines[2].split("|")[1:] == [" left                          ", " right"]
    assert lines[4] == " Diachronic only         | 10.00 bits (5 states, 4 arcs) | 11.00 bits (6 states, 5 arcs)"
    assert sum("Diachronic + Allophonic" in line for line in lines) == 2
    assert parse_report(text) == [
        [PfsaSummary(10.0, 5, 4), PfsaSummary(11.0, 6, 5)],
        [PfsaSummary(12.0, 7, 6), PfsaSummary(13.0, 8, 7)],
        [PfsaSummary(8.0, 2, 3), PfsaSummary(9.0, 3, 3)],
        [PfsaSummary(9.5, 3, 4), PfsaSummary(9.9, 3, 5)],
    ]


def test_report_validation():
    r = ComparisonReport(["x"])
    with pytest.raises(ValueError):
        r.add("phonemic", "x", PfsaSummary(1, 1, 0), PfsaSummary(1, 1, 0))
    with pytest.raises(ValueError):
        r.add("diachronic", "x", PfsaSummary(-1, 1, 0), PfsaSummary(1, 1, 0))
    with pytest.raises(ValueError):
        r.add("diachronic", "x", PfsaSummary(1, 1, 0), PfsaSummary(1, 2, 0))


summaries = st.builds(PfsaSummary, st.floats(0, 1e6, allow_nan=False), st.integers(1, 5000),
                      st.integers(0, 50000))


@given(summaries, summaries)
def test_report_round_trip(a, b):
    lo, hi = sorted([a, b], key=lambda s: s.n_states)
    r = report({("diachronic", "left"): (hi, lo), ("diachronic", "right"): (hi, lo)})
    rows = parse_report(render_report(r))
    for got, want in zip([rows[0][0], rows[1][0]], [hi, lo]):
        assert got.bits == pytest.approx(round(want.bits, 2), abs=5e-3)
        assert (got.n_states, got.n_arcs) == (want.n_states, want.n_arcs)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_automaton_file_round_trip(seed):
    p = random_automaton(random.Random(seed), 30)
    text = dump_automaton(p)
    q = load_automaton(text)
    assert q == p
    assert dump_automaton(q) == text
    assert mml_bits(q) == mml_bits(p)


def test_automaton_file_layout():
    p = build_canonical([[1, 0], [1, 0]], AB)
    assert dump_automaton(p) == "PFSA 1\nN 2\nV 3\nARCS 2\n0 1 1 2\n1 0 0 2\nSYMBOLS\n0\t!\n1\ta\n2\tb\n"


@pytest.mark.parametrize("text", [
    "",
    "PFSA 2\nN 1\nV 1\nARCS 0\nSYMBOLS\n0\t!\n",
    "PFSA 1\nN 2\nV 2\nARCS 1\n0 1 1\nSYMBOLS\n0\t!\n1\ta\n",
    "PFSA 1\nN 2\nV 2\nARCS 1\n0 1 1 1\n0\t!\n1\ta\n",
    "PFSA 1\nN 2\nV 2\nARCS 1\n0 1 1 1\nSYMBOLS\n0\t!\n",
    "PFSA 1\nN 2\nV 2\nARCS 1\n0 1 1 1\nSYMBOLS\n0\t#\n1\ta\n",
    "PFSA 1\nN 2\nV 2\nARCS 1\n0 1 5 1\nSYMBOLS\n0\t!\n1\ta\n",
    "PFSA 1\nN 1\nV 1\nARCS 1\n0 0 0 1\nSYMBOLS\n0\t!\nextra\n",
])
def test_malformed_automaton_files(text):
    with pytest.raises(MalformedAutomatonFile):
        load_automaton(text)


def test_unreachable_state_loads_but_does_not_score():
    text = "PFSA 1\nN 2\nV 2\nARCS 2\n0 0 0 1\n1 0 0 1\nSYMBOLS\n0\t!\n1\ta\n"
    with pytest.raises(NotScoreable):
        mml_bits(load_automaton(text))


def test_trace_file():
    steps = [TraceStep("sk(k=1,s=50) merge 2+3", 3, 15.754887502, 15.754887502, ((2, 3),))]
    assert dump_trace(steps) == "# step\tstates\tmml_bits\tbest_bits\n" \
                                "sk(k=1,s=50) merge 2+3\t3\t15.754888\t15.754888\n"
