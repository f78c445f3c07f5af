import subprocess
import sys

import pytest

from pfsa_mml import data_path
from pfsa_mml.automaton import build_canonical
from pfsa_mml.cli import main
from pfsa_mml.corpus import encode, filter_allophonic, parse_classification, parse_corpus
from pfsa_mml.export import dump_automaton, load_automaton, parse_report
from pfsa_mml.mml import mml_bits

from oracles import mml_exact, symbols, trie

NORTH, SOUTH, CLASSES = (str(data_path(n)) for n in ("northern.tsv", "southern.tsv", "classes.tsv"))
FAST = ["--k-max", "2", "--s-min", "40", "--s-max", "60", "--beam", "4"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_pfsa(path, sequences, V):
    path.write_text(dump_automaton(build_canonical(sequences, symbols(V))))
    return path


def test_build_both_modes(tmp_path, capsys):
    code, out, _ = run(capsys, "build", "--corpus", NORTH, "--classes", CLASSES,
                       "--out", tmp_path / "n.pfsa")
    assert code == 0
    assert out.splitlines() == [
        "diachronic: 70 states, 69 arcs (non-delimiter), MML 2235.23 bits",
        "allophonic: 111 states, 110 arcs (non-delimiter), MML 2713.15 bits",
    ]
    assert (tmp_path / "n.diachronic.pfsa").exists() and (tmp_path / "n.allophonic.pfsa").exists()


@pytest.mark.parametrize("mode", ["diachronic", "allophonic"])
def test_build_matches_oracle(tmp_path, capsys, mode):
    text = data_path("northern.tsv").read_text()
    ds = parse_corpus(text)
    if mode == "diachronic":
        ds = filter_allophonic(ds, parse_classification(data_path("classes.tsv").read_text()))
    seqs, table = encode(ds)
    n, arcs = trie(seqs)
    want = mml_exact(n, arcs, table.V)
    out = tmp_path / "x.pfsa"
    code, printed, _ = run(capsys, "build", "--corpus", NORTH, "--classes", CLASSES,
                           "--mode", mode, "--out", out)
    assert code == 0
    assert printed == f"{n} states, {n - 1} arcs (non-delimiter), MML {want:.2f} bits\n"
    code, scored, _ = run(capsys, "score", out)
    assert scored.startswith(f"{want:.2f} bits")
    assert mml_bits(load_automaton(out.read_text())) == pytest.approx(want, abs=1e-6)


def test_diachronic_is_no_larger(capsys):
    _, out, _ = run(capsys, "build", "--corpus", SOUTH, "--classes", CLASSES)
    dia, allo = (int(line.split(": ")[1].split()[0]) for line in out.splitlines())
    assert dia <= allo


def test_build_errors(tmp_path, capsys):
    empty = tmp_path / "empty.tsv"
    empty.write_text("# nothing\n")
    code, out, err = run(capsys, "build", "--corpus", empty)
    assert code != 0 and out == ""
    assert err.count("\n") == 1 and err.startswith("pfsa-mml: error:")
    bad = tmp_path / "bad.tsv"
    bad.write_text("1\t\t\t\ta:\n2\t\t\t\ta:b\n")
    code, _, err = run(capsys, "build", "--corpus", bad)
    assert code != 0 and "line 2" in err and "offset 3" in err
    code, _, err = run(capsys, "build", "--corpus", tmp_path / "missing.tsv")
    assert code != 0 and "cannot read" in err


def test_score_examples(tmp_path, capsys):
    two = write_pfsa(tmp_path / "two.pfsa", [[1, 0], [1, 0]], 2)
    four = write_pfsa(tmp_path / "four.pfsa", [[1, 2, 0], [1, 3, 0]], 4)
    assert run(capsys, "score", two)[1] == "5.00 bits (N=2, V=2)\n"
    assert run(capsys, "score", four)[1] == "18.42 bits (N=4, V=4)\n"
    code, out, _ = run(capsys, "score", "--verbose", four)
    lines = out.splitlines()
    assert code == 0 and lines[0].split("\t")[0] == "state" and len(lines) == 4 + 3
    assert lines[1] == "0\t1.0000\t0.0000\t2.0000\t2.0000\t5.0000"


def test_score_rejects_tampered_file(tmp_path, capsys):
    bad = tmp_path / "bad.pfsa"
    bad.write_text("PFSA 1\nN 2\nV 2\nARCS 2\n0 0 0 1\n1 0 0 1\nSYMBOLS\n0\t!\n1\ta\n")
    code, _, err = run(capsys, "score", bad)
    assert code != 0 and "unreachable" in err and err.count("\n") == 1


def test_reduce_writes_automaton_and_trace(tmp_path, capsys):
    four = write_pfsa(tmp_path / "four.pfsa", [[1, 2, 0], [1, 3, 0]], 4)
    out = tmp_path / "r.pfsa"
    code, printed, _ = run(capsys, "reduce", four, "--beam", "200", "--out", out)
    assert code == 0
    reduced = load_automaton(out.read_text())
    assert mml_bits(reduced) <= 15.75488750216347 + 1e-9
    assert printed.splitlines()[-1].endswith(f"MML {mml_bits(reduced):.2f} bits")
    trace = (tmp_path / "r.pfsa.trace").read_text().splitlines()
    assert trace[0].startswith("#")
    for row in trace[1:]:
        desc, n, bits, best = row.split("\t")
        assert int(n) >= 1 and float(best) <= float(bits) + 1e-6


def test_reduce_rejects_bad_ranges(tmp_path, capsys):
    two = write_pfsa(tmp_path / "two.pfsa", [[1, 0]], 2)
    for flags in (["--k-min", "0"], ["--s-max", "101"], ["--k-min", "5", "--k-max", "4"],
                  ["--beam", "0"]):
        code, _, err = run(capsys, "reduce", two, *flags)
        assert code != 0 and err.startswith("pfsa-mml: error:")


def test_compare_identical_corpora_give_identical_columns(tmp_path, capsys):
    code, out, _ = run(capsys, "compare", "--corpus", SOUTH, "--corpus", SOUTH,
                       "--name", "a", "--name", "b", "--classes", CLASSES, *FAST)
    assert code == 0
    rows = parse_report(out)
    assert len(rows) == 4
    for left, right in rows:
        assert left == right
    assert "MML of the canonical PFSA" in out and "MML of the reduced PFSA" in out


def test_compare_needs_two_corpora(capsys):
    code, _, err = run(capsys, "compare", "--corpus", SOUTH, *FAST)
    assert code != 0 and "two" in err


def test_compare_single_mode_and_file_output(tmp_path, capsys):
    out = tmp_path / "report.txt"
    code, printed, _ = run(capsys, "compare", "--corpus", NORTH, "--corpus", SOUTH,
                           "--classes", CLASSES, "--mode", "diachronic", "--out", out, *FAST)
    assert code == 0 and printed == ""
    text = out.read_text()
    assert "northern" in text and "southern" in text
    assert "Allophonic" not in text and len(parse_report(text)) == 2


def test_export(tmp_path, capsys):
    p = write_pfsa(tmp_path / "p.pfsa", [[1, 0]] * 12 + [[2, 0]] * 3, 3)
    code, out, _ = run(capsys, "export", p)
    assert code == 0 and out.startswith("digraph pfsa {") and 'label="r2^3"' in out
    code, pruned, _ = run(capsys, "export", p, "--prune", "10")
    assert 'label="r2^3"' not in pruned and 'label="r1^12"' in pruned
    run(capsys, "export", p, "--out", tmp_path / "p.dot")
    assert (tmp_path / "p.dot").read_text() == out


def test_module_entry_point(tmp_path):
    p = write_pfsa(tmp_path / "two.pfsa", [[1, 0], [1, 0]], 2)
    done = subprocess.run([sys.executable, "-m", "pfsa_mml", "score", str(p)],
                          capture_output=True, text=True)
    assert done.returncode == 0 and done.stdout == "5.00 bits (N=2, V=2)\n"
    done = subprocess.run([sys.executable, "-m", "pfsa_mml", "frobnicate"],
                          capture_output=True, text=True)
    assert done.returncode != 0
