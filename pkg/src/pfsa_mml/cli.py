"""Command-line driver: ``pfsa-mml build|score|reduce|compare|export``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from .automaton import AutomatonError, Pfsa, build_canonical
from .corpus import (CorpusError, RuleClassification, encode, filter_allophonic,
                     parse_classification, parse_corpus)
from .export import (MODES, ComparisonReport, DotOptions, PfsaSummary, dump_automaton,
                     dump_trace, load_automaton, render_report, to_dot)
from .mml import NotScoreable, mml
from .reduce import (DEFAULT_BEAM_WIDTH, K_RANGE, S_RANGE, BeamParams, reduce_pipeline)

log = logging.getLogger("pfsa_mml")


class CliError(Exception):
    pass


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text: str):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def _modes(mode: str) -> List[str]:
    return list(MODES) if mode == "both" else [mode]


def _load_corpus(path, classes: RuleClassification, mode: str):
    try:
        derivations = parse_corpus(_read(path))
    except CorpusError as exc:
        raise CliError(f"{path}: {exc}") from None
    if mode == "diachronic":
        derivations = filter_allophonic(derivations, classes)
    return derivations


def _load_classes(path) -> RuleClassification:
    if path is None:
        return RuleClassification()
    try:
        return parse_classification(_read(path))
    except CorpusError as exc:
        raise CliError(f"{path}: {exc}") from None


def _canonical(path, classes, mode) -> Pfsa:
    sequences, symbols = encode(_load_corpus(path, classes, mode))
    try:
        return build_canonical(sequences, symbols)
    except AutomatonError as exc:
        raise CliError(f"{path}: {exc}") from None


def _summary(p: Pfsa, bits: float) -> str:
    return f"{p.n_states} states, {p.n_symbol_arcs} arcs (non-delimiter), MML {bits:.2f} bits"


def _ranges(args) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    k, s = (args.k_min, args.k_max), (args.s_min, args.s_max)
    if not K_RANGE[0] <= k[0] <= k[1] <= K_RANGE[1]:
        raise CliError(f"k range {k} must lie within {K_RANGE}")
    if not S_RANGE[0] <= s[0] <= s[1] <= S_RANGE[1]:
        raise CliError(f"s range {s} must lie within {S_RANGE}")
    return k, s


def _beam(args) -> BeamParams:
    try:
        return BeamParams(args.beam, args.max_merges, args.patience)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _suffixed(out: Path, mode: str) -> Path:
    return out.with_name(f"{out.stem}.{mode}{out.suffix}")


def cmd_build(args) -> int:
    classes = _load_classes(args.classes)
    modes = _modes(args.mode)
    for mode in modes:
        p = _canonical(args.corpus[0], classes, mode)
        bits = mml(p).total_bits
        prefix = f"{mode}: " if len(modes) > 1 else ""
        print(prefix + _summary(p, bits))
        if args.out:
            out = Path(args.out)
            _write(_suffixed(out, mode) if len(modes) > 1 else out, dump_automaton(p))
    return 0


def _load_pfsa(path) -> Pfsa:
    return load_automaton(_read(path))


def cmd_score(args) -> int:
    b = mml(_load_pfsa(args.automaton))
    if args.verbose:
        print("state\tstructure\tarrangement\tsymbols\ttargets\ttotal")
        for c in b.per_state:
            print(f"{c.state}\t{c.structure_bits:.4f}\t{c.arrangement_bits:.4f}\t"
                  f"{c.symbol_bits:.4f}\t{c.target_bits:.4f}\t{c.total:.4f}")
        print(f"permutation discount\t{b.permutation_discount_bits:.4f}")
    print(f"{b.total_bits:.2f} bits (N={b.n_states}, V={b.alphabet_size})")
    return 0


def cmd_reduce(args) -> int:
    p = _load_pfsa(args.automaton)
    mml(p)
    k_range, s_range = _ranges(args)
    reduced, trace, sk_params = reduce_pipeline(p, k_range, s_range, _beam(args))
    bits = mml(reduced).total_bits
    if args.out:
        _write(args.out, dump_automaton(reduced))
    trace_path = args.trace or (args.out + ".trace" if args.out else None)
    if trace_path:
        _write(trace_path, dump_trace(trace))
    chosen = f"k={sk_params.k}, s={sk_params.s}" if sk_params else "none"
    print(f"sk parameters: {chosen}")
    print(_summary(reduced, bits))
    return 0


def compare(corpora: List[str], names: List[str], classes: RuleClassification, modes: List[str],
            k_range, s_range, beam: BeamParams) -> ComparisonReport:
    report = ComparisonReport(names)
    for mode in modes:
        for path, name in zip(corpora, names):
            p = _canonical(path, classes, mode)
            reduced, _, _ = reduce_pipeline(p, k_range, s_range, beam)
            report.add(mode, name,
                       PfsaSummary.of(p, mml(p).total_bits),
                       PfsaSummary.of(reduced, mml(reduced).total_bits))
            log.info("%s/%s: %d -> %d states", name, mode, p.n_states, reduced.n_states)
    return report


def cmd_compare(args) -> int:
    if len(args.corpus) < 2:
        raise CliError("compare needs two --corpus paths")
    names = args.name or [Path(c).stem for c in args.corpus]
    if len(names) != len(args.corpus):
        raise CliError("give one --name per --corpus")
    k_range, s_range = _ranges(args)
    report = compare(args.corpus, names, _load_classes(args.classes), _modes(args.mode),
                     k_range, s_range, _beam(args))
    text = render_report(report)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_export(args) -> int:
    p = _load_pfsa(args.automaton)
    text = to_dot(p, DotOptions(args.prune, not args.no_frequencies, args.delimiter_edges))
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _add_reduction_flags(sp):
    sp.add_argument("--k-min", type=int, default=K_RANGE[0])
    sp.add_argument("--k-max", type=int, default=K_RANGE[1])
    sp.add_argument("--s-min", type=int, default=S_RANGE[0])
    sp.add_argument("--s-max", type=int, default=S_RANGE[1])
    sp.add_argument("--beam", type=int, default=DEFAULT_BEAM_WIDTH, help="beam width")
    sp.add_argument("--max-merges", type=int, default=None)
    sp.add_argument("--patience", type=int, default=None,
                    help="stop beam search after this many steps without improvement")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfsa-mml",
        description="Build, score and minimise PFSA of rule-derivation corpora.")
    parser.add_argument("--verbose", "-v", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--out", help="output file (stdout if omitted where applicable)")

    def corpus_flags(sp, many=False):
        sp.add_argument("--corpus", action="append", required=True,
                        help="derivation corpus (TSV)" + ("; repeat per language" if many else ""))
        sp.add_argument("--classes", help="rule classification (TSV)")
        sp.add_argument("--mode", choices=["diachronic", "allophonic", "both"], default="both",
                        help="diachronic drops allophonic rules; allophonic keeps them")

    sp = sub.add_parser("build", parents=[common], help="build the canonical PFSA")
    corpus_flags(sp)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("score", parents=[common], help="MML of an automaton file")
    sp.add_argument("automaton")
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("reduce", parents=[common], help="sk-strings then beam reduction")
    sp.add_argument("automaton")
    sp.add_argument("--trace", help="trace file (default: OUT.trace)")
    _add_reduction_flags(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("compare", parents=[common], help="canonical and reduced MML tables")
    corpus_flags(sp, many=True)
    sp.add_argument("--name", action="append", help="language name, one per --corpus")
    _add_reduction_flags(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("export", parents=[common], help="DOT rendering of an automaton file")
    sp.add_argument("automaton")
    sp.add_argument("--prune", type=int, default=0, help="drop arcs with frequency below N")
    sp.add_argument("--no-frequencies", action="store_true")
    sp.add_argument("--delimiter-edges", action="store_true",
                    help="draw delimiter arcs as edges to state 0")
    sp.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, CorpusError, AutomatonError, NotScoreable, ValueError) as exc:
        print(f"pfsa-mml: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
