"""Probabilistic finite state automata over rule symbols.

States are dense integers with 0 as the start state.  Arcs carry traversal
counts; arcs on the delimiter (symbol 0) always lead back to state 0.
"""
from __future__ import annotations

from collections import defaultdict, deque
from typing import Dict, Iterable, List, NamedTuple, Sequence, Tuple

from .corpus import DELIMITER_ID, SymbolTable


class AutomatonError(ValueError):
    pass


class EmptyCorpus(AutomatonError):
    pass


class DelimiterMisplaced(AutomatonError):
    pass


class SameState(AutomatonError):
    pass


class Arc(NamedTuple):
    src: int
    symbol: int
    dst: int
    freq: int


class StateStats(NamedTuple):
    t: int
    m: int
    m_prime: int
    freqs: Tuple[int, ...]


def _fold(arcs: Iterable[Tuple[int, int, int, int]]) -> Tuple[Arc, ...]:
    acc: Dict[Tuple[int, int, int], int] = defaultdict(int)
    for src, sym, dst, freq in arcs:
        acc[src, sym, dst] += freq
    return tuple(Arc(s, y, d, f) for (s, y, d), f in sorted(acc.items()))


class Pfsa:
    """Immutable frequency-weighted automaton.

    Parallel arcs sharing ``(src, symbol, dst)`` are folded on construction.
    Structural checks that do not depend on reachability are enforced here;
    :meth:`problems` reports the rest.
    """

    __slots__ = ("n_states", "arcs", "symbols", "_out", "_hash")

    def __init__(self, n_states: int, arcs: Iterable[Tuple[int, int, int, int]],
                 symbols: SymbolTable):
        if n_states < 1:
            raise AutomatonError("an automaton needs at least one state")
        self.n_states = n_states
        self.symbols = symbols
        self.arcs = _fold(arcs)
        for a in self.arcs:
            if not (0 <= a.src < n_states and 0 <= a.dst < n_states):
                raise AutomatonError(f"arc {a} refers to a missing state")
            if not 0 <= a.symbol < symbols.V:
                raise AutomatonError(f"arc {a} uses an unknown symbol")
            if a.freq < 1:
                raise AutomatonError(f"arc {a} has non-positive frequency")
            if a.symbol == DELIMITER_ID and a.dst != 0:
                raise AutomatonError(f"delimiter arc {a} does not return to state 0")
        out: List[List[Arc]] = [[] for _ in range(n_states)]
        for a in self.arcs:
            out[a.src].append(a)
        self._out = tuple(tuple(o) for o in out)
        self._hash = None

    @property
    def N(self) -> int:
        return self.n_states

    @property
    def V(self) -> int:
        return self.symbols.V

    def out_arcs(self, state: int) -> Tuple[Arc, ...]:
        return self._out[state]

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    @property
    def n_symbol_arcs(self) -> int:
        """Arcs on rule symbols, i.e. excluding delimiter arcs."""
        return sum(1 for a in self.arcs if a.symbol != DELIMITER_ID)

    @property
    def total_frequency(self) -> int:
        return sum(a.freq for a in self.arcs)

    def problems(self) -> List[str]:
        """Invariant violations that make the automaton unscoreable."""
        found = []
        for j, arcs in enumerate(self._out):
            if not arcs:
                found.append(f"state {j} has no outgoing arc")
        seen = {0}
        queue = deque([0])
        while queue:
            j = queue.popleft()
            for a in self._out[j]:
                if a.dst not in seen:
                    seen.add(a.dst)
                    queue.append(a.dst)
        unreachable = sorted(set(range(self.n_states)) - seen)
        if unreachable:
            found.append(f"states unreachable from 0: {unreachable}")
        return found

    def is_valid(self) -> bool:
        return not self.problems()

    def __eq__(self, other):
        return (isinstance(other, Pfsa) and self.n_states == other.n_states
                and self.arcs == other.arcs and self.symbols == other.symbols)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n_states, self.arcs))
        return self._hash

    def __repr__(self):
        return f"Pfsa(N={self.n_states}, arcs={self.n_arcs}, V={self.V})"


class PrunedView:
    """Arcs below a frequency threshold removed; for display only, never scored."""

    __slots__ = ("n_states", "arcs", "symbols", "threshold")

    def __init__(self, source: Pfsa, threshold: int):
        self.n_states = source.n_states
        self.symbols = source.symbols
        self.threshold = threshold
        self.arcs = tuple(a for a in source.arcs if a.freq >= threshold)

    @property
    def N(self) -> int:
        return self.n_states

    def __repr__(self):
        return f"PrunedView(N={self.n_states}, arcs={len(self.arcs)}, threshold={self.threshold})"


def build_canonical(sequences: Sequence[Sequence[int]], symbols: SymbolTable) -> Pfsa:
    """Prefix-tree acceptor; each sequence's final delimiter arc returns to 0."""
    if not sequences:
        raise EmptyCorpus("no derivations to build an automaton from")
    children: List[Dict[int, int]] = [{}]
    freq: Dict[Tuple[int, int, int], int] = defaultdict(int)
    for n, seq in enumerate(sequences):
        if not seq or seq[-1] != DELIMITER_ID:
            raise DelimiterMisplaced(f"sequence {n} does not end with the delimiter")
        if DELIMITER_ID in seq[:-1]:
            raise DelimiterMisplaced(f"sequence {n} has a delimiter before its end")
        state = 0
        for sym in seq[:-1]:
            nxt = children[state].get(sym)
            if nxt is None:
                nxt = len(children)
                children[state][sym] = nxt
                children.append({})
            freq[state, sym, nxt] += 1
            state = nxt
        freq[state, DELIMITER_ID, 0] += 1
    return Pfsa(len(children), ((s, y, d, f) for (s, y, d), f in freq.items()), symbols)


def state_stats(p: Pfsa, j: int) -> StateStats:
    arcs = p.out_arcs(j)
    freqs = tuple(a.freq for a in arcs)
    m_prime = sum(1 for a in arcs if a.symbol != DELIMITER_ID)
    return StateStats(sum(freqs), len(freqs), m_prime, freqs)


def merge_mapping(n_states: int, a: int, b: int) -> List[int]:
    """Old-id -> new-id map for folding ``b`` into ``a``.

    Remaining states keep their relative order; if either is the start state
    the merged state is 0.
    """
    keep = [s for s in range(n_states) if s != b]
    if b == 0:
        keep.remove(a)
        keep.insert(0, a)
    mapping = [0] * n_states
    for new, old in enumerate(keep):
        mapping[old] = new
    mapping[b] = mapping[a]
    return mapping


def merge_states(p: Pfsa, a: int, b: int) -> Pfsa:
    if a == b:
        raise SameState(f"cannot merge state {a} with itself")
    for s in (a, b):
        if not 0 <= s < p.n_states:
            raise AutomatonError(f"no state {s}")
    mapping = merge_mapping(p.n_states, a, b)
    return Pfsa(p.n_states - 1,
                ((mapping[x.src], x.symbol, mapping[x.dst], x.freq) for x in p.arcs),
                p.symbols)


def quotient(p: Pfsa, blocks: Sequence[Iterable[int]]) -> Pfsa:
    """Automaton whose states are the given blocks of ``p``'s states.

    The block containing state 0 must come first.
    """
    mapping = {}
    for new, block in enumerate(blocks):
        for old in block:
            mapping[old] = new
    if mapping.get(0) != 0:
        raise AutomatonError("the first block must contain state 0")
    return Pfsa(len(blocks), ((mapping[x.src], x.symbol, mapping[x.dst], x.freq) for x in p.arcs),
                p.symbols)


def replay(p: Pfsa, sequence: Sequence[int]) -> bool:
    """True iff some path from state 0 consumes ``sequence`` and ends at state 0."""
    current = {0}
    for sym in sequence:
        current = {a.dst for s in current for a in p.out_arcs(s) if a.symbol == sym}
        if not current:
            return False
    return 0 in current and bool(sequence) and sequence[-1] == DELIMITER_ID


def prune(p: Pfsa, threshold: int) -> PrunedView:
    return PrunedView(p, threshold)


def canonical_form(p: Pfsa) -> Tuple:
    """Hashable key with states renumbered in breadth-first order from 0."""
    order = {0: 0}
    queue = deque([0])
    while queue:
        j = queue.popleft()
        for a in sorted(p.out_arcs(j), key=lambda x: (x.symbol, x.freq, x.dst)):
            if a.dst not in order:
                order[a.dst] = len(order)
                queue.append(a.dst)
    for j in range(p.n_states):
        order.setdefault(j, len(order))
    return (p.n_states,) + tuple(sorted((order[a.src], a.symbol, order[a.dst], a.freq)
                                        for a in p.arcs))
