"""Minimum Message Length of a PFSA, in bits.

For each state ``j`` the message spends

* ``m_j`` bits on the number of distinct outgoing arcs,
* ``log2((t_j - 1)! / ((m_j - 1)! * prod_i (n_ij - 1)!))`` bits on the arc
  frequencies,
* ``m_j * log2(V)`` bits on arc symbols and
* ``m_j' * log2(N)`` bits on the targets of non-delimiter arcs,

and ``log2((N - 1)!)`` bits are discounted because the numbering of the
non-start states is arbitrary.
"""
from __future__ import annotations

import math
from typing import List, NamedTuple, Sequence

from .automaton import Pfsa, PrunedView, state_stats

_EXACT_LIMIT = 1024
_LN2 = math.log(2.0)


def _exact_table(limit: int) -> List[float]:
    table = [0.0] * (limit + 1)
    acc = 0.0
    for i in range(2, limit + 1):
        acc += math.log2(i)
        table[i] = acc
    return table


_LOG2_FACT = _exact_table(_EXACT_LIMIT)


class NotScoreable(ValueError):
    pass


def log2_factorial(n: int) -> float:
    if n < 0:
        raise ValueError("factorial of a negative number")
    if n <= _EXACT_LIMIT:
        return _LOG2_FACT[n]
    return math.lgamma(n + 1) / _LN2


class StateCost(NamedTuple):
    state: int
    structure_bits: float
    arrangement_bits: float
    symbol_bits: float
    target_bits: float

    @property
    def total(self) -> float:
        return self.structure_bits + self.arrangement_bits + self.symbol_bits + self.target_bits


class MmlBreakdown(NamedTuple):
    per_state: List[StateCost]
    permutation_discount_bits: float
    total_bits: float
    n_states: int
    alphabet_size: int


def arrangement_bits(t: int, m: int, freqs: Sequence[int]) -> float:
    bits = log2_factorial(t - 1) - log2_factorial(m - 1)
    for n in freqs:
        bits -= log2_factorial(n - 1)
    return max(bits, 0.0)


def local_bits(t: int, m: int, freqs: Sequence[int], log2_v: float) -> float:
    """Per-state cost excluding the target term, which depends on N."""
    return m + arrangement_bits(t, m, freqs) + m * log2_v


def combine(local_sum: float, m_prime_sum: int, n_states: int) -> float:
    return local_sum + m_prime_sum * math.log2(n_states) - log2_factorial(n_states - 1)


def mml(p: Pfsa) -> MmlBreakdown:
    if isinstance(p, PrunedView):
        raise NotScoreable("pruned views are for display only and cannot be scored")
    problems = p.problems()
    if problems:
        raise NotScoreable("; ".join(problems))
    n = p.n_states
    log2_v = math.log2(p.V)
    log2_n = math.log2(n)
    per_state = []
    for j in range(n):
        st = state_stats(p, j)
        per_state.append(StateCost(j, float(st.m), arrangement_bits(st.t, st.m, st.freqs),
                                   st.m * log2_v, st.m_prime * log2_n))
    discount = log2_factorial(n - 1)
    total = math.fsum(c.total for c in per_state) - discount
    return MmlBreakdown(per_state, discount, total, n, p.V)


def mml_bits(p: Pfsa) -> float:
    return mml(p).total_bits
