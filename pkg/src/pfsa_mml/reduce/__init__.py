"""Minimise PFSA: sk-strings merging, then beam search under MML."""
from __future__ import annotations

import math
from typing import Optional, Tuple

from ..automaton import Pfsa
from .beam import beam_reduce
from .common import (DEFAULT_BEAM_WIDTH, K_RANGE, S_RANGE, BeamParams, ReductionTrace,
                     SkParams, TraceStep, apply_merges)
from .sk import DEFAULT_BUDGET, ranked_strings, sk_reduce, sk_strings_of_state, sk_sweep

__all__ = [
    "BeamParams", "DEFAULT_BEAM_WIDTH", "DEFAULT_BUDGET", "K_RANGE", "ReductionTrace",
    "S_RANGE", "SkParams", "TraceStep", "apply_merges", "beam_reduce", "ranked_strings",
    "reduce_pipeline", "sk_reduce", "sk_strings_of_state", "sk_sweep",
]


def reduce_pipeline(p: Pfsa, k_range: Tuple[int, int] = K_RANGE,
                    s_range: Tuple[int, int] = S_RANGE,
                    beam: BeamParams = BeamParams(),
                    budget: int = DEFAULT_BUDGET
                    ) -> Tuple[Pfsa, ReductionTrace, Optional[SkParams]]:
    """sk-strings sweep, then beam search from its result.

    Every trace path is relative to ``p``.
    """
    sk_result, sk_params, sk_trace = sk_sweep(p, k_range, s_range, budget)
    prefix = sk_trace[-1].merges if sk_trace else ()
    final, beam_trace = beam_reduce(sk_result, beam)
    trace = list(sk_trace)
    best = sk_trace[-1].incumbent_bits if sk_trace else math.inf
    for t in beam_trace:
        best = min(best, t.incumbent_bits)
        trace.append(t._replace(merges=prefix + t.merges, incumbent_bits=best))
    return final, trace, sk_params
