"""scikit-learn style wrappers so corpora can flow through a ``Pipeline``.

    >>> from sklearn.pipeline import make_pipeline
    >>> model = make_pipeline(AllophonicFilter(classes), PfsaInducer(beam_width=10))
    >>> model.fit(derivations)                                    # doctest: +SKIP
"""
from __future__ import annotations

from typing import Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .automaton import build_canonical, replay
from .corpus import (Derivation, RuleClass, RuleClassification, RuleToken, encode,
                     filter_allophonic, parse_classification, parse_rule_sequence)
from .mml import mml
from .reduce import (DEFAULT_BEAM_WIDTH, DEFAULT_BUDGET, K_RANGE, S_RANGE, BeamParams,
                     reduce_pipeline)

DerivationLike = Union[Derivation, str, Sequence[RuleToken]]


def check_derivations(X: Iterable[DerivationLike]) -> List[Derivation]:
    """Coerce a corpus to a list of :class:`Derivation`.

    Items may be derivations, rule-sequence strings such as ``"a:[b]:"``, or
    sequences of :class:`RuleToken`.
    """
    if isinstance(X, (str, bytes)):
        raise TypeError("expected a collection of derivations, got a single string")
    out = []
    for n, item in enumerate(X):
        if isinstance(item, Derivation):
            out.append(item)
        elif isinstance(item, str):
            out.append(Derivation(str(n), tuple(parse_rule_sequence(item))))
        elif isinstance(item, Sequence) and all(isinstance(t, RuleToken) for t in item):
            out.append(Derivation(str(n), tuple(item)))
        else:
            raise TypeError(f"item {n} is not a derivation: {item!r}")
    return out


def check_classification(classes) -> RuleClassification:
    if classes is None:
        return RuleClassification()
    if isinstance(classes, str):
        return parse_classification(classes)
    if isinstance(classes, Mapping):
        return RuleClassification({name: RuleClass(c) for name, c in classes.items()})
    raise TypeError(f"cannot interpret {type(classes).__name__} as a rule classification")


def check_range(name: str, value, bounds: Tuple[int, int]) -> Tuple[int, int]:
    lo, hi = value
    if not bounds[0] <= lo <= hi <= bounds[1]:
        raise ValueError(f"{name}={value!r} must satisfy {bounds[0]} <= lo <= hi <= {bounds[1]}")
    return int(lo), int(hi)


class AllophonicFilter(TransformerMixin, BaseEstimator):
    """Remove normal applications of allophonic rules from derivations.

    ``classes`` is a mapping from rule name to ``"allophonic"`` /
    ``"diachronic"`` (or :class:`RuleClass`), or classification file text.
    """

    def __init__(self, classes=None):
        self.classes = classes

    def fit(self, X=None, y=None):
        self.classes_ = check_classification(self.classes)
        return self

    def transform(self, X):
        check_is_fitted(self, "classes_")
        return filter_allophonic(check_derivations(X), self.classes_)


class PfsaInducer(BaseEstimator):
    """Build the canonical PFSA of a corpus and reduce it under MML.

    Fitted attributes
    -----------------
    symbols_ : SymbolTable
    canonical_ : Pfsa
    canonical_mml_ : MmlBreakdown
    automaton_ : Pfsa
        The reduced automaton (the canonical one when ``reduce=False``).
    mml_ : MmlBreakdown
    trace_ : list of TraceStep
    sk_params_ : SkParams or None
    """

    def __init__(self, k_range=K_RANGE, s_range=S_RANGE, beam_width=DEFAULT_BEAM_WIDTH,
                 max_merges=None, patience=None, reduce=True, budget=DEFAULT_BUDGET):
        self.k_range = k_range
        self.s_range = s_range
        self.beam_width = beam_width
        self.max_merges = max_merges
        self.patience = patience
        self.reduce = reduce
        self.budget = budget

    def fit(self, X, y=None):
        derivations = check_derivations(X)
        k_range = check_range("k_range", self.k_range, K_RANGE)
        s_range = check_range("s_range", self.s_range, S_RANGE)
        beam = BeamParams(self.beam_width, self.max_merges, self.patience)
        sequences, self.symbols_ = encode(derivations)
        self.n_sequences_ = len(sequences)
        self.canonical_ = build_canonical(sequences, self.symbols_)
        self.canonical_mml_ = mml(self.canonical_)
        if self.reduce:
            self.automaton_, self.trace_, self.sk_params_ = reduce_pipeline(
                self.canonical_, k_range, s_range, beam, self.budget)
        else:
            self.automaton_, self.trace_, self.sk_params_ = self.canonical_, [], None
        self.mml_ = mml(self.automaton_)
        return self

    def predict(self, X) -> np.ndarray:
        """Whether the fitted automaton accepts each derivation."""
        check_is_fitted(self, "automaton_")
        result = []
        for d in check_derivations(X):
            spellings = [t.spelling for t in d.rules]
            if all(s in self.symbols_ for s in spellings):
                seq = [self.symbols_.id_of(s) for s in spellings] + [0]
                result.append(replay(self.automaton_, seq))
            else:
                result.append(False)
        return np.array(result, dtype=bool)

    def score(self, X=None, y=None) -> float:
        """Negated message length of the fitted automaton, in bits (higher is better)."""
        check_is_fitted(self, "automaton_")
        return -self.mml_.total_bits
