"""sk-strings state merging.

Two states are indistinguishable when the smallest set of their most
probable output strings (length <= k) covering at least s% of the
probability mass is the same for both.  Strings stop at the delimiter or
are cut at k symbols; arc probabilities are frequency / visits of the
source state.
"""
from __future__ import annotations

import heapq
import logging
import math
from bisect import bisect_left, insort
from collections import defaultdict
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

from ..automaton import Pfsa
from ..corpus import DELIMITER_ID
from ..mml import combine, local_bits, mml_bits
from .common import (K_RANGE, S_RANGE, Pair, ReductionTrace, SkParams, TraceStep, span)

logger = logging.getLogger(__name__)

SymbolString = Tuple[int, ...]

# heap pops allowed per state ranking; beyond it the ranking is cut short
DEFAULT_BUDGET = 20_000

_EPS = 1e-12
# probabilities equal to this many decimals tie; ties rank lexicographically
_DIGITS = 12


class _Ranking:
    """Output strings of one state in descending probability, produced lazily.

    Best-first search over string prefixes: a prefix carries the probability
    of every state it can end in, and its total mass bounds the probability
    of any string extending it, so complete strings leave the heap in exact
    rank order even when the automaton is nondeterministic.
    """

    __slots__ = ("strings", "cum", "heap", "pops", "keys", "by_s", "touched", "worst", "cut")
    frozen = False

    def __init__(self, start: int):
        self.strings: List[SymbolString] = []
        self.cum: List[float] = []
        self.heap = [(-1.0, 0, (), {start: 1.0})]
        self.pops = 0
        self.keys: Dict[int, FrozenSet[SymbolString]] = {}
        # once computed, the prefix for a given s never changes
        self.by_s: Dict[int, FrozenSet[SymbolString]] = {}
        # every state whose arcs the search has read
        self.touched = {start}
        # heap keys of the lightest pop and of the heaviest string cut at length k
        self.worst = -math.inf
        self.cut = math.inf

    @property
    def exhausted(self) -> bool:
        return not self.heap

    def cover(self, target: float, trans, k: int, budget: int) -> int:
        """Length of the shortest ranked prefix with cumulative mass >= target."""
        strings, cum, heap = self.strings, self.cum, self.heap
        # the budget never stops the search before one string is complete
        while (not cum or cum[-1] < target) and heap and (self.pops < budget or not cum):
            negm, kind, word, vec = heapq.heappop(heap)
            self.pops += 1
            if negm > self.worst:
                self.worst = negm
            if kind:
                strings.append(word)
                cum.append((cum[-1] if cum else 0.0) + vec)
                continue
            self.touched.update(vec)
            stop = 0.0
            if len(word) + 1 == k:
                # children are complete strings, so only their mass matters
                masses: Dict[int, float] = {}
                for x, wx in vec.items():
                    sx, arcs = trans[x]
                    stop += wx * sx
                    for sym, _, q in arcs:
                        masses[sym] = masses.get(sym, 0.0) + wx * q
                for sym, mass in masses.items():
                    negm = -round(mass, _DIGITS)
                    if negm < self.cut:
                        self.cut = negm
                    heapq.heappush(heap, (negm, 1, word + (sym,), mass))
            else:
                children: Dict[int, Dict[int, float]] = {}
                for x, wx in vec.items():
                    sx, arcs = trans[x]
                    stop += wx * sx
                    for sym, dst, q in arcs:
                        child = children.get(sym)
                        if child is None:
                            child = children[sym] = {}
                        child[dst] = child.get(dst, 0.0) + wx * q
                for sym, child in children.items():
                    mass = sum(child.values())
                    heapq.heappush(heap, (-round(mass, _DIGITS), 0, word + (sym,), child))
            if stop > 0.0:
                heapq.heappush(heap, (-round(stop, _DIGITS), 1, word + (DELIMITER_ID,), stop))
        return min(bisect_left(cum, target) + 1, len(cum))

    @property
    def deep(self) -> bool:
        """Whether a larger k could change anything popped so far.

        With a larger k a cut string would be expanded instead, but its
        continuations are no heavier, so pops strictly heavier than every
        cut string happen identically.
        """
        return self.worst >= self.cut

    def key(self, s: int, trans, k: int, budget: int) -> FrozenSet[SymbolString]:
        return self.keys_for([s], trans, k, budget)[0]

    def keys_for(self, ss: List[int], trans, k: int, budget: int
                 ) -> List[FrozenSet[SymbolString]]:
        """Keys for ascending ``ss``, extending the ranking once for the largest."""
        by_s = self.by_s
        if all(s in by_s for s in ss):
            return [by_s[s] for s in ss]
        self.cover(ss[-1] / 100.0 - _EPS, trans, k, budget)
        cum, keys, strings = self.cum, self.keys, self.strings
        last = len(cum)
        result = []
        i = 0
        for s in ss:
            key = by_s.get(s)
            if key is None:
                target = s / 100.0 - _EPS
                while i < last and cum[i] < target:
                    i += 1
                n = min(i + 1, last)
                key = keys.get(n)
                if key is None:
                    key = keys[n] = frozenset(strings[:n])
                by_s[s] = key
            result.append(key)
        return result

    def freeze(self) -> "_Frozen":
        return _Frozen(dict(self.by_s), frozenset(self.touched), self.deep)


class _Frozen:
    """Answers a ranking had already given, kept after a merge it never saw.

    It cannot be extended: the search state may mention merged-away states.
    """

    __slots__ = ("by_s", "touched", "deep")
    frozen = True

    def __init__(self, by_s, touched, deep):
        self.by_s = by_s
        self.touched = touched
        self.deep = deep

    def keys_for(self, ss, trans, k, budget):
        return [self.by_s[s] for s in ss]


def _out_table(p: Pfsa):
    out = {j: {} for j in range(p.n_states)}
    for a in p.arcs:
        out[a.src][a.symbol, a.dst] = a.freq
    return out, {j: sum(o.values()) for j, o in out.items()}


class _Transitions(dict):
    """State -> (stop probability, non-delimiter arcs as (symbol, dst, probability))."""

    def __init__(self, out, total, cached=()):
        super().__init__(cached)
        self.out = out
        self.total = total

    def __missing__(self, x):
        t = self.total[x]
        stop, arcs = 0.0, []
        for (sym, dst), f in self.out[x].items():
            if sym == DELIMITER_ID:
                stop = f / t
            else:
                arcs.append((sym, dst, f / t))
        value = self[x] = (stop, tuple(arcs))
        return value


def ranked_strings(p: Pfsa, j: int, k: int, mass: float = 1.0,
                   budget: int = DEFAULT_BUDGET) -> List[Tuple[SymbolString, float]]:
    """Most probable output strings of state ``j`` until ``mass`` is covered."""
    r = _Ranking(j)
    n = r.cover(mass - _EPS, _Transitions(*_out_table(p)), k, budget)
    probs = [c - (r.cum[i - 1] if i else 0.0) for i, c in enumerate(r.cum[:n])]
    return list(zip(r.strings[:n], probs))


def sk_strings_of_state(p: Pfsa, j: int, params: SkParams,
                        budget: int = DEFAULT_BUDGET) -> FrozenSet[SymbolString]:
    """The most probable output strings of ``j`` covering at least s% of its mass."""
    if not 0 <= j < p.n_states:
        raise ValueError(f"no state {j}")
    return _Ranking(j).key(params.s, _Transitions(*_out_table(p)), params.k, budget)


class _Engine:
    """Mutable automaton with lazily maintained per-state rankings.

    State ids are the input's ids and stay stable across merges.  The merged
    state always keeps the smaller id, so dense renumbering never changes the
    relative order of surviving states and "lowest pair" means the same in
    both numberings.
    """

    def __init__(self, p: Pfsa, k: int, budget: int, deep: Optional[List[bool]] = None):
        self.k = k
        # shared by all copies: set once any ranking depended on k
        self.deep = [False] if deep is None else deep
        self.budget = budget
        self.log2_v = math.log2(p.V)
        self.alive: List[int] = list(range(p.n_states))
        self.out, self.total = _out_table(p)
        self.trans = _Transitions(self.out, self.total)
        self.preds: Dict[int, Dict[int, int]] = {j: {} for j in self.alive}
        for a in p.arcs:
            if a.symbol != DELIMITER_ID:
                self.preds[a.dst][a.src] = self.preds[a.dst].get(a.src, 0) + 1
        self.local: Dict[int, float] = {}
        self.m_prime: Dict[int, int] = {}
        for j in self.alive:
            self._rescore(j)
        self.local_sum = math.fsum(self.local.values())
        self.m_prime_sum = sum(self.m_prime.values())
        self.rankings: Dict[int, Union[_Ranking, _Frozen]] = {}

    def copy(self) -> "_Engine":
        new = object.__new__(_Engine)
        new.k, new.budget, new.log2_v, new.deep = self.k, self.budget, self.log2_v, self.deep
        new.alive = list(self.alive)
        new.out = {j: dict(o) for j, o in self.out.items()}
        new.total = dict(self.total)
        new.trans = _Transitions(new.out, new.total, self.trans)
        new.preds = {j: dict(d) for j, d in self.preds.items()}
        new.local = dict(self.local)
        new.m_prime = dict(self.m_prime)
        new.local_sum, new.m_prime_sum = self.local_sum, self.m_prime_sum
        # a ranking only reads states downstream of its own, which are
        # identical in both copies for as long as it stays cached
        new.rankings = dict(self.rankings)
        return new

    def _rescore(self, j):
        freqs = list(self.out[j].values())
        self.local[j] = local_bits(self.total[j], len(freqs), freqs, self.log2_v)
        self.m_prime[j] = sum(1 for sym, _ in self.out[j] if sym != DELIMITER_ID)

    def mml(self, exact: bool = False) -> float:
        if exact:
            return combine(math.fsum(self.local.values()), sum(self.m_prime.values()),
                           len(self.alive))
        return combine(self.local_sum, self.m_prime_sum, len(self.alive))

    def key(self, j: int, s: int) -> FrozenSet[SymbolString]:
        return self.keys(j, [s])[0]

    def keys(self, j: int, ss: List[int]) -> List[FrozenSet[SymbolString]]:
        r = self.rankings.get(j)
        if r is None or (r.frozen and not all(s in r.by_s for s in ss)):
            r = self.rankings[j] = _Ranking(j)
        keys = r.keys_for(ss, self.trans, self.k, self.budget)
        if r.deep:
            self.deep[0] = True
        return keys

    def dense(self, j: int) -> int:
        return bisect_left(self.alive, j)

    def _link(self, src, dst, delta):
        pd = self.preds[dst]
        n = pd.get(src, 0) + delta
        if n:
            pd[src] = n
        else:
            del pd[src]

    def merge(self, a: int, b: int) -> List[int]:
        """Fold ``b`` into ``a`` (a < b); returns the states whose rankings changed."""
        sources = {a, b} | set(self.preds[b])
        for src in sources:
            for sym, dst in self.out[src]:
                if sym != DELIMITER_ID:
                    self._link(src, dst, -1)
        out_b = self.out.pop(b)
        del self.preds[b]
        sources.discard(b)
        for src in sources:
            o = self.out[src]
            for sym, dst in [e for e in o if e[1] == b]:
                f = o.pop((sym, dst))
                o[sym, a] = o.get((sym, a), 0) + f
        o = self.out[a]
        for (sym, dst), f in out_b.items():
            dst = a if dst == b else dst
            o[sym, dst] = o.get((sym, dst), 0) + f
        for src in sources:
            for sym, dst in self.out[src]:
                if sym != DELIMITER_ID:
                    self._link(src, dst, 1)
        self.total[a] += self.total.pop(b)
        self.alive.remove(b)
        self.local_sum -= self.local.pop(b)
        self.m_prime_sum -= self.m_prime.pop(b)
        for j in sources:
            self.local_sum -= self.local[j]
            self.m_prime_sum -= self.m_prime[j]
            self._rescore(j)
            self.local_sum += self.local[j]
            self.m_prime_sum += self.m_prime[j]
        changed = sources | {b}
        for j in changed:
            self.trans.pop(j, None)
        self.rankings.pop(b, None)
        stale = []
        for j in self._upstream(a):
            r = self.rankings.get(j)
            if r is not None and r.touched.isdisjoint(changed):
                # unaffected, but the live search may be shared with other copies
                if not r.frozen:
                    self.rankings[j] = r.freeze()
            else:
                self.rankings.pop(j, None)
                stale.append(j)
        return sorted(stale)

    def _upstream(self, a):
        # rankings look k - 1 arcs ahead, so only these can have changed
        seen = {a}
        frontier = [a]
        for _ in range(self.k - 1):
            nxt = []
            for x in frontier:
                for src in self.preds[x]:
                    if src not in seen:
                        seen.add(src)
                        nxt.append(src)
            if not nxt:
                break
            frontier = nxt
        return seen

    def to_pfsa(self, symbols) -> Pfsa:
        index = {j: n for n, j in enumerate(self.alive)}
        return Pfsa(len(self.alive),
                    ((index[src], sym, index[dst], f)
                     for src, o in self.out.items() for (sym, dst), f in o.items()),
                    symbols)


class _Groups:
    """States of one engine grouped by their sk-string set for one ``s``.

    The lowest mergeable pair of every group sits on a lazily cleaned heap.
    """

    def __init__(self, engine: _Engine, s: int, keys: Dict[int, FrozenSet]):
        self.engine = engine
        self.s = s
        self.key_of: Dict[int, FrozenSet] = {}
        self.members: Dict[FrozenSet, List[int]] = defaultdict(list)
        self.heap: List[Tuple[int, int, int]] = []
        self.key_ids: Dict[FrozenSet, int] = {}
        self.id_keys: List[FrozenSet] = []
        for j in engine.alive:
            key = keys[j]
            self.key_of[j] = key
            self.members[key].append(j)
        for key in self.members:
            self._push(key)

    def _push(self, key):
        g = self.members.get(key)
        if g is not None and len(g) >= 2:
            kid = self.key_ids.get(key)
            if kid is None:
                kid = self.key_ids[key] = len(self.id_keys)
                self.id_keys.append(key)
            heapq.heappush(self.heap, (g[0], g[1], kid))

    def lowest_pair(self) -> Optional[Pair]:
        while self.heap:
            a, b, kid = self.heap[0]
            g = self.members.get(self.id_keys[kid])
            if g is not None and len(g) >= 2 and g[0] == a and g[1] == b:
                return a, b
            heapq.heappop(self.heap)
        return None

    def _remove(self, j):
        key = self.key_of.pop(j)
        g = self.members[key]
        g.remove(j)
        if not g:
            del self.members[key]
        else:
            self._push(key)

    def update(self, removed: int, fresh: Dict[int, FrozenSet]):
        """Drop ``removed`` and regroup the states whose keys were recomputed."""
        self._remove(removed)
        for j, key in fresh.items():
            self._remove(j)
            self.key_of[j] = key
            insort(self.members[key], j)
            self._push(key)


# (merged pair in dense ids, states after the merge, MML after the merge)
_Step = Tuple[Pair, int, float]


def _sweep_k(p: Pfsa, k: int, ss: Iterable[int], budget: int,
             deep: Optional[List[bool]] = None) -> Iterator[Tuple[int, _Engine, List[_Step]]]:
    """Run sk merging for every ``s`` at one ``k``, sharing work between runs.

    Runs that pick the same pair share one engine; it is copied only when
    their choices diverge.  Yields ``(s, engine, steps)`` at each fixpoint;
    the engine may be mutated after the consumer resumes the generator.
    ``deep[0]`` ends up False when no ranking ever looked k - 1 symbols
    ahead, in which case every larger k repeats these runs exactly.
    """
    ss = sorted(ss)
    root = _Engine(p, k, budget, deep)
    keys = {j: root.keys(j, ss) for j in root.alive}
    stack = [(root, {s: _Groups(root, s, {j: ks[i] for j, ks in keys.items()})
                     for i, s in enumerate(ss)}, [])]
    while stack:
        engine, groups, steps = stack.pop()
        while groups:
            by_pair: Dict[Optional[Pair], List[int]] = defaultdict(list)
            for s, g in groups.items():
                by_pair[g.lowest_pair()].append(s)
            for s in by_pair.pop(None, []):
                del groups[s]
                yield s, engine, steps
            if not by_pair:
                break
            pairs = sorted(by_pair)
            branches = [(engine, steps)] + [(engine.copy(), list(steps)) for _ in pairs[1:]]
            for pair, (eng, stp) in zip(pairs, branches):
                a, b = pair
                dense = (eng.dense(a), eng.dense(b))
                changed = eng.merge(a, b)
                stp.append((dense, len(eng.alive), eng.mml()))
                members = by_pair[pair]  # ascending, as groups keeps s order
                fresh = {j: eng.keys(j, members) for j in changed}
                sub = {s: groups[s] for s in members}
                for i, g in enumerate(sub.values()):
                    g.engine = eng
                    g.update(b, {j: ks[i] for j, ks in fresh.items()})
                if eng is not engine:
                    stack.append((eng, sub, stp))
            groups = {s: groups[s] for s in by_pair[pairs[0]]}


def _trace(steps: List[_Step], params: SkParams, start_bits: float) -> ReductionTrace:
    trace = []
    path: Tuple[Pair, ...] = ()
    best = start_bits
    for pair, n, bits in steps:
        path = path + (pair,)
        best = min(best, bits)
        trace.append(TraceStep(f"sk(k={params.k},s={params.s}) merge {pair[0]}+{pair[1]}",
                               n, bits, best, path))
    return trace


def sk_reduce(p: Pfsa, params: SkParams, budget: int = DEFAULT_BUDGET
              ) -> Tuple[Pfsa, ReductionTrace]:
    """Merge the lowest-numbered indistinguishable pair until none is left."""
    for _, engine, steps in _sweep_k(p, params.k, [params.s], budget):
        return engine.to_pfsa(p.symbols), _trace(steps, params, mml_bits(p))
    raise AssertionError("unreachable")


def sk_sweep(p: Pfsa, k_range: Tuple[int, int] = K_RANGE, s_range: Tuple[int, int] = S_RANGE,
             budget: int = DEFAULT_BUDGET
             ) -> Tuple[Pfsa, Optional[SkParams], ReductionTrace]:
    """Best sk-strings reduction over every (k, s) in the inclusive ranges.

    Results are ranked by MML, then state count, then (k, s).  The
    unreduced input competes as well and is reported with ``None``
    parameters; it only wins when every (k, s) result is strictly worse.
    """
    ks, ss = span(k_range), span(s_range)
    SkParams(ks[0], ss[0]), SkParams(ks[-1], ss[-1])
    start_bits = mml_bits(p)
    best_rank = (round(start_bits, 9), p.n_states, 0, 0)
    best = (p, None, [])
    for k in ks:
        deep = [False]
        for s, engine, steps in _sweep_k(p, k, ss, budget, deep):
            if not steps:
                continue
            bits = engine.mml(exact=True)
            rank = (round(bits, 9), len(engine.alive), k, s)
            if rank < best_rank:
                params = SkParams(k, s)
                best_rank = rank
                best = (engine.to_pfsa(p.symbols), params, _trace(steps, params, start_bits))
        logger.debug("sk sweep k=%d: best %s", k, best_rank)
        if not deep[0]:
            # larger k would rerun the same merges and lose the tie on k
            break
    return best
