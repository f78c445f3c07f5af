"""Probabilistic finite state automata for rule-derivation corpora.

Build the canonical automaton of a corpus, score it by minimum message
length, and minimise it by sk-strings merging followed by beam search.
"""
from importlib import resources
from pathlib import Path

from .automaton import (Arc, AutomatonError, DelimiterMisplaced, EmptyCorpus, Pfsa,
                        PrunedView, SameState, build_canonical, canonical_form, merge_states,
                        prune, quotient, replay, state_stats)
from .corpus import (DELIMITER, DELIMITER_ID, CorpusError, Derivation, MalformedRecord,
                     MalformedSequence, RuleClass, RuleClassification, RuleKind, RuleToken,
                     SymbolTable, encode, filter_allophonic, parse_classification, parse_corpus,
                     parse_rule_sequence, render_rule_sequence)
from .export import (ComparisonReport, DotOptions, MalformedAutomatonFile, PfsaSummary,
                     dump_automaton, dump_trace, load_automaton, parse_report, render_report,
                     to_dot)
from .mml import MmlBreakdown, NotScoreable, StateCost, log2_factorial, mml, mml_bits
from .reduce import (BeamParams, SkParams, TraceStep, beam_reduce, reduce_pipeline, sk_reduce,
                     sk_sweep)

__version__ = "0.1.0"

__all__ = [
    "Arc", "AutomatonError", "DelimiterMisplaced", "EmptyCorpus", "Pfsa", "PrunedView",
    "SameState", "build_canonical", "canonical_form", "merge_states", "prune", "quotient",
    "replay", "state_stats", "DELIMITER", "DELIMITER_ID", "CorpusError", "Derivation",
    "MalformedRecord", "MalformedSequence", "RuleClass", "RuleClassification", "RuleKind",
    "RuleToken", "SymbolTable", "encode", "filter_allophonic", "parse_classification",
    "parse_corpus", "parse_rule_sequence", "render_rule_sequence", "ComparisonReport",
    "DotOptions", "MalformedAutomatonFile", "PfsaSummary", "dump_automaton", "dump_trace",
    "load_automaton", "parse_report", "render_report", "to_dot", "MmlBreakdown", "NotScoreable",
    "StateCost", "log2_factorial", "mml", "mml_bits", "BeamParams", "SkParams", "TraceStep",
    "beam_reduce", "reduce_pipeline", "sk_reduce", "sk_sweep", "BUNDLED", "data_path",
    "__version__",
]

BUNDLED = ("northern.tsv", "southern.tsv", "classes.tsv")


def data_path(name: str) -> Path:
    """Path of a bundled data file (one of :data:`BUNDLED`)."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled file {name!r}; have {', '.join(BUNDLED)}")
    return Path(str(resources.files(__name__).joinpath("data", name)))
