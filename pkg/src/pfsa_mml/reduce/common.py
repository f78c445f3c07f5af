from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Tuple

from ..automaton import Pfsa, merge_states

K_RANGE = (1, 10)
S_RANGE = (1, 100)
DEFAULT_BEAM_WIDTH = 200

Pair = Tuple[int, int]


@dataclass(frozen=True, order=True)
class SkParams:
    k: int
    s: int

    def __post_init__(self):
        if not K_RANGE[0] <= self.k <= K_RANGE[1]:
            raise ValueError(f"k must be in {K_RANGE}, got {self.k}")
        if not S_RANGE[0] <= self.s <= S_RANGE[1]:
            raise ValueError(f"s must be in {S_RANGE}, got {self.s}")


@dataclass(frozen=True)
class BeamParams:
    """Beam search settings.

    ``patience`` is the number of consecutive steps without a new best
    automaton after which the search gives up; ``None`` keeps merging until a
    single state is left.
    """
    width: int = DEFAULT_BEAM_WIDTH
    max_merges: Optional[int] = None
    patience: Optional[int] = None

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("beam width must be at least 1")
        if self.max_merges is not None and self.max_merges < 0:
            raise ValueError("max_merges must be non-negative")
        if self.patience is not None and self.patience < 1:
            raise ValueError("patience must be at least 1")


class TraceStep(NamedTuple):
    """One recorded automaton of a reduction.

    ``merges`` is the full sequence of :func:`merge_states` pairs that turns
    the reduction's input into the recorded automaton; ``incumbent_bits`` is
    the lowest MML seen so far, the input included.
    """
    description: str
    n_states: int
    mml_bits: float
    incumbent_bits: float
    merges: Tuple[Pair, ...]


ReductionTrace = List[TraceStep]


def apply_merges(p: Pfsa, merges: Iterable[Pair]) -> Pfsa:
    for a, b in merges:
        p = merge_states(p, a, b)
    return p


def span(bounds: Tuple[int, int]) -> range:
    lo, hi = bounds
    if lo > hi:
        raise ValueError(f"empty parameter range {bounds}")
    return range(lo, hi + 1)
