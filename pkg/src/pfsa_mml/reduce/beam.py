"""Beam search over pairwise state merges, scored by MML."""
from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Tuple

from ..automaton import Pfsa, canonical_form, merge_states, state_stats
from ..corpus import DELIMITER_ID
from ..mml import combine, local_bits, mml_bits
from .common import BeamParams, Pair, ReductionTrace, TraceStep

logger = logging.getLogger(__name__)


class _Scorer:
    """MML of every single-pair merge of one automaton without building it."""

    def __init__(self, p: Pfsa):
        self.p = p
        self.log2_v = math.log2(p.V)
        n = p.n_states
        self.out = [[(a.symbol, a.dst, a.freq) for a in p.out_arcs(j)] for j in range(n)]
        self.preds: List[set] = [set() for _ in range(n)]
        for a in p.arcs:
            self.preds[a.dst].add(a.src)
        self.local = []
        self.m_prime = []
        for j in range(n):
            st = state_stats(p, j)
            self.local.append(local_bits(st.t, st.m, st.freqs, self.log2_v))
            self.m_prime.append(st.m_prime)
        self.local_sum = math.fsum(self.local)
        self.m_prime_sum = sum(self.m_prime)

    def _state(self, arcs):
        folded: Dict[Tuple[int, int], int] = defaultdict(int)
        for sym, dst, f in arcs:
            folded[sym, dst] += f
        freqs = list(folded.values())
        m_prime = sum(1 for sym, _ in folded if sym != DELIMITER_ID)
        return local_bits(sum(freqs), len(freqs), freqs, self.log2_v), m_prime

    def merged_bits(self, a: int, b: int) -> float:
        def redirect(arcs):
            return [(sym, a if dst == b else dst, f) for sym, dst, f in arcs]

        local_sum = self.local_sum - self.local[a] - self.local[b]
        m_prime_sum = self.m_prime_sum - self.m_prime[a] - self.m_prime[b]
        loc, mp = self._state(redirect(self.out[a] + self.out[b]))
        local_sum += loc
        m_prime_sum += mp
        for src in self.preds[b]:
            if src == a or src == b:
                continue
            loc, mp = self._state(redirect(self.out[src]))
            local_sum += loc - self.local[src]
            m_prime_sum += mp - self.m_prime[src]
        return combine(local_sum, m_prime_sum, self.p.n_states - 1)


@dataclass
class _Candidate:
    automaton: Pfsa
    bits: float
    path: Tuple[Pair, ...]


def beam_reduce(p: Pfsa, params: BeamParams = BeamParams()) -> Tuple[Pfsa, ReductionTrace]:
    """Beam search over pairwise merges, scored by MML.

    Each step expands every frontier automaton into all of its single-pair
    merges and keeps the ``width`` best distinct results.  The best automaton
    seen at any step is returned, so the result never scores worse than ``p``.
    The search stops when one state is left, after ``max_merges`` steps, or
    after ``patience`` consecutive steps that fail to improve on the best.
    """
    incumbent = _Candidate(p, mml_bits(p), ())
    frontier = [incumbent]
    trace: ReductionTrace = []
    step = stale = 0
    while frontier[0].automaton.n_states > 1:
        if params.max_merges is not None and step >= params.max_merges:
            break
        step += 1
        scored = []
        for rank, cand in enumerate(frontier):
            scorer = _Scorer(cand.automaton)
            for a, b in combinations(range(cand.automaton.n_states), 2):
                bits = scorer.merged_bits(a, b)
                scored.append((round(bits, 9), a, b, rank))
        scored.sort()
        nxt: List[_Candidate] = []
        seen = set()
        for _, a, b, rank in scored:
            parent = frontier[rank]
            child = merge_states(parent.automaton, a, b)
            form = canonical_form(child)
            if form in seen:
                continue
            seen.add(form)
            nxt.append(_Candidate(child, mml_bits(child), parent.path + ((a, b),)))
            if len(nxt) == params.width:
                break
        nxt.sort(key=lambda c: (round(c.bits, 9), c.path[-1]))
        best = nxt[0]
        improved = best.bits < incumbent.bits
        if improved:
            incumbent = best
        trace.append(TraceStep(f"beam step {step}: merge {best.path[-1][0]}+{best.path[-1][1]}",
                               best.automaton.n_states, best.bits, incumbent.bits, best.path))
        logger.debug("beam step %d: N=%d best=%.4f incumbent=%.4f",
                     step, best.automaton.n_states, best.bits, incumbent.bits)
        stale = 0 if improved else stale + 1
        if params.patience is not None and stale >= params.patience:
            break
        frontier = nxt
    return incumbent.automaton, trace
