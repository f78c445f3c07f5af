"""DOT rendering, comparison tables and the automaton/trace file formats."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Sequence, Tuple, Union

from .automaton import AutomatonError, Pfsa, PrunedView, prune
from .corpus import DELIMITER, DELIMITER_ID, SymbolTable
from .mml import NotScoreable
from .reduce import TraceStep

FORMAT_VERSION = 1

MODES = ("diachronic", "allophonic")
MODE_LABELS = {"diachronic": "Diachronic only", "allophonic": "Diachronic + Allophonic"}


@dataclass(frozen=True)
class DotOptions:
    prune_threshold: int = 0
    show_frequencies: bool = True
    delimiter_edges: bool = False


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(p: Union[Pfsa, PrunedView], opts: DotOptions = DotOptions()) -> str:
    """Render as a DOT digraph.

    Delimiter arcs become a ``!^freq`` annotation on their source node unless
    ``delimiter_edges`` asks for plain edges back to state 0.
    """
    view = prune(p, opts.prune_threshold) if opts.prune_threshold > 0 else p
    spell = view.symbols.spelling_of

    def label(sym, freq):
        return f"{spell(sym)}^{freq}" if opts.show_frequencies else spell(sym)

    stops: Dict[int, int] = {}
    edges = []
    for a in sorted(view.arcs):
        if a.symbol == DELIMITER_ID and not opts.delimiter_edges:
            stops[a.src] = a.freq
        else:
            edges.append(f"  {a.src} -> {a.dst} [label={_quote(label(a.symbol, a.freq))}];")
    lines = ["digraph pfsa {", "  rankdir=LR;", "  node [shape=circle];"]
    for j in range(view.n_states):
        text = str(j)
        if j in stops:
            text += " " + label(DELIMITER_ID, stops[j])
        lines.append(f"  {j} [label={_quote(text)}];")
    lines.extend(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


class PfsaSummary(NamedTuple):
    bits: float
    n_states: int
    n_arcs: int

    @classmethod
    def of(cls, p: Pfsa, bits: float) -> "PfsaSummary":
        return cls(bits, p.n_states, p.n_symbol_arcs)

    def cell(self) -> str:
        return f"{self.bits:.2f} bits ({self.n_states} states, {self.n_arcs} arcs)"


@dataclass
class ComparisonReport:
    """Canonical and reduced summaries per (mode, language)."""

    languages: Sequence[str]
    canonical: Dict[Tuple[str, str], PfsaSummary] = field(default_factory=dict)
    reduced: Dict[Tuple[str, str], PfsaSummary] = field(default_factory=dict)

    def add(self, mode: str, language: str, canonical: PfsaSummary, reduced: PfsaSummary):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if min(canonical.bits, reduced.bits) < 0:
            raise ValueError("message lengths cannot be negative")
        if reduced.n_states > canonical.n_states:
            raise ValueError("a reduced automaton cannot have more states than its source")
        self.canonical[mode, language] = canonical
        self.reduced[mode, language] = reduced


def _table(title: str, languages: Sequence[str], cells: Dict[Tuple[str, str], PfsaSummary]) -> str:
    modes = [m for m in MODES if any((m, lang) in cells for lang in languages)]
    rows = [[""] + list(languages)]
    for m in modes:
        rows.append([MODE_LABELS[m]] + [cells[m, lang].cell() if (m, lang) in cells else "-"
                                         for lang in languages])
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    rule = "+".join("-" * (w + 2) for w in widths)
    out = [title, rule]
    for n, r in enumerate(rows):
        out.append("|".join(f" {text:<{w}} " for text, w in zip(r, widths)).rstrip())
        if n == 0:
            out.append(rule.replace("-", "="))
    out.append(rule)
    return "\n".join(out)


def render_report(r: ComparisonReport) -> str:
    return "\n".join([
        _table("MML of the canonical PFSA", r.languages, r.canonical),
        "",
        _table("MML of the reduced PFSA", r.languages, r.reduced),
    ]) + "\n"


_CELL = re.compile(r"(\d+\.\d{2}) bits \((\d+) states, (\d+) arcs\)")


def parse_report(text: str) -> List[List[PfsaSummary]]:
    """Cells of each table row, in reading order; the inverse of :func:`render_report`."""
    rows = []
    for line in text.splitlines():
        cells = [PfsaSummary(float(b), int(n), int(a)) for b, n, a in _CELL.findall(line)]
        if cells:
            rows.append(cells)
    return rows


class MalformedAutomatonFile(NotScoreable):
    pass


def dump_automaton(p: Pfsa) -> str:
    lines = [f"PFSA {FORMAT_VERSION}", f"N {p.n_states}", f"V {p.V}", f"ARCS {p.n_arcs}"]
    lines.extend(f"{a.src} {a.symbol} {a.dst} {a.freq}" for a in p.arcs)
    lines.append("SYMBOLS")
    lines.extend(f"{i}\t{s}" for i, s in enumerate(p.symbols.spellings))
    return "\n".join(lines) + "\n"


def load_automaton(text: str) -> Pfsa:
    lines = text.splitlines()
    pos = 0

    def take(label):
        nonlocal pos
        if pos >= len(lines):
            raise MalformedAutomatonFile(f"line {pos + 1}: expected {label!r}, found end of file")
        parts = lines[pos].split()
        if len(parts) != 2 or parts[0] != label or not parts[1].isdigit():
            raise MalformedAutomatonFile(f"line {pos + 1}: expected '{label} <integer>'")
        pos += 1
        return int(parts[1])

    version = take("PFSA")
    if version != FORMAT_VERSION:
        raise MalformedAutomatonFile(f"unsupported automaton file version {version}")
    n, v, n_arcs = take("N"), take("V"), take("ARCS")
    arcs = []
    for _ in range(n_arcs):
        if pos >= len(lines):
            raise MalformedAutomatonFile("file ends inside the arc list")
        parts = lines[pos].split()
        if len(parts) != 4 or not all(x.isdigit() for x in parts):
            raise MalformedAutomatonFile(f"line {pos + 1}: expected 'from symbol to freq'")
        arcs.append(tuple(map(int, parts)))
        pos += 1
    if pos >= len(lines) or lines[pos].strip() != "SYMBOLS":
        raise MalformedAutomatonFile(f"line {pos + 1}: expected 'SYMBOLS'")
    pos += 1
    spellings = []
    for i in range(v):
        if pos >= len(lines):
            raise MalformedAutomatonFile("file ends inside the symbol table")
        ident, _, spelling = lines[pos].partition("\t")
        if ident != str(i) or not spelling:
            raise MalformedAutomatonFile(f"line {pos + 1}: expected '{i}<TAB>spelling'")
        spellings.append(spelling)
        pos += 1
    if any(line.strip() for line in lines[pos:]):
        raise MalformedAutomatonFile(f"line {pos + 1}: unexpected trailing content")
    try:
        if spellings[:1] != [DELIMITER]:
            raise ValueError("symbol 0 must be the delimiter '!'")
        return Pfsa(n, arcs, SymbolTable(spellings))
    except (AutomatonError, ValueError) as exc:
        raise MalformedAutomatonFile(str(exc)) from None


def dump_trace(trace: Iterable[TraceStep]) -> str:
    lines = ["# step\tstates\tmml_bits\tbest_bits"]
    lines.extend(f"{t.description}\t{t.n_states}\t{t.mml_bits:.6f}\t{t.incumbent_bits:.6f}"
                 for t in trace)
    return "\n".join(lines) + "\n"
