"""Exact twin-width for small trigraphs, the tree sequence and a greedy bound."""
from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .sequence import ContractionSequence, verify
from .trigraph import Trigraph, TrigraphError

YES, NO, UNKNOWN = "yes", "no", "unknown"
EXACT, UPPER_BOUND_ONLY, BUDGET_EXHAUSTED = "exact", "upper-bound-only", "budget-exhausted"


@dataclass
class SolverBudget:
    max_nodes: int = 2_000_000
    max_seconds: float = 60.0
    d_cap: int = 8

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_seconds <= 0 or self.d_cap <= 0:
            raise ValueError("budget fields must be positive")


@dataclass
class Decision:
    answer: str
    witness: Optional[ContractionSequence] = None
    nodes: int = 0


@dataclass
class SolveResult:
    status: str
    value: int
    witness: ContractionSequence
    nodes: int = 0


class _OutOfBudget(Exception):
    pass


def _canon(parts: Dict[int, FrozenSet[int]]) -> FrozenSet[FrozenSet[int]]:
    return frozenset(parts.values())


def decide_at_most(g: Trigraph, d: int, budget: Optional[SolverBudget] = None) -> Decision:
    """Search all contraction sequences staying at red degree <= d.

    States are partitions of V(g); partitions already shown to be dead ends
    are memoised.  Children are tried smallest pair (by minimum original
    vertex) first.
    """
    budget = budget or SolverBudget()
    if g.max_red_degree() > d:
        return Decision(NO)
    if len(g) <= 1:
        return Decision(YES, ContractionSequence(g.copy(), []))
    deadline = time.monotonic() + budget.max_seconds
    dead: Set[FrozenSet[FrozenSet[int]]] = set()
    start_id = g.max_id() + 1
    nodes = 0
    path: List[Tuple[int, int]] = []

    def rec(cur: Trigraph, parts: Dict[int, FrozenSet[int]]) -> bool:
        nonlocal nodes
        if len(cur) == 1:
            return True
        key = _canon(parts)
        if key in dead:
            return False
        nodes += 1
        if nodes > budget.max_nodes or (nodes & 1023 == 0 and time.monotonic() > deadline):
            raise _OutOfBudget
        w = start_id + len(path)
        ids = sorted(parts, key=lambda v: min(parts[v]))
        for i, u in enumerate(ids):
            for v in ids[i + 1:]:
                black, red = cur.merged_neighborhood(u, v)
                if len(red) > d:
                    continue
                ok = True
                ru, rv = cur.red_neighbors(u), cur.red_neighbors(v)
                for z in red:
                    if cur.red_degree(z) - (z in ru) - (z in rv) + 1 > d:
                        ok = False
                        break
                if not ok:
                    continue
                nxt = cur.contract(u, v, w)
                sub = dict(parts)
                sub[w] = sub.pop(u) | sub.pop(v)
                path.append((u, v))
                if rec(nxt, sub):
                    return True
                path.pop()
        dead.add(key)
        return False

    try:
        found = rec(g, {v: frozenset([v]) for v in g.vertices})
    except _OutOfBudget:
        return Decision(UNKNOWN, nodes=nodes)
    if found:
        return Decision(YES, ContractionSequence(g.copy(), list(path)), nodes)
    return Decision(NO, nodes=nodes)


def twin_width_exact(g: Trigraph, budget: Optional[SolverBudget] = None) -> SolveResult:
    budget = budget or SolverBudget()
    greedy = greedy_upper_bound(g)
    best, witness = greedy.value, greedy.witness
    nodes = 0
    for d in range(g.max_red_degree(), min(best, budget.d_cap + 1)):
        res = decide_at_most(g, d, budget)
        nodes += res.nodes
        if res.answer == YES:
            return SolveResult(EXACT, d, res.witness, nodes)
        if res.answer == UNKNOWN:
            return SolveResult(UPPER_BOUND_ONLY, best, witness, nodes)
    if best > budget.d_cap + 1:
        # everything up to the cap was refuted, but the bound is not tight
        return SolveResult(BUDGET_EXHAUSTED, best, witness, nodes)
    return SolveResult(EXACT, best, witness, nodes)


# -- trees -------------------------------------------------------------------

def _tree_check(t: Trigraph) -> Dict[int, Set[int]]:
    adj = {v: t.neighbors(v) for v in t.vertices}
    n = len(adj)
    if n == 0:
        raise TrigraphError("empty trigraph is not a tree")
    edges = sum(map(len, adj.values())) // 2
    if edges != n - 1 or len(t.components()) != 1:
        raise TrigraphError("input is not a tree")
    return adj


def tree_sequence(t: Trigraph) -> ContractionSequence:
    """Contract two sibling leaves while possible, otherwise the deepest leaf
    into its parent.  Width at most 2 on black trees and at most the maximum
    degree on red trees."""
    adj = _tree_check(t)
    root = min(adj)
    parent: Dict[int, Optional[int]] = {root: None}
    depth = {root: 0}
    n_children = dict.fromkeys(adj, 0)
    order = [root]
    for x in order:
        for z in adj[x]:
            if z not in parent:
                parent[z] = x
                depth[z] = depth[x] + 1
                n_children[x] += 1
                order.append(z)
    leaf_kids: Dict[int, List[int]] = {}
    heap: List[Tuple[int, int]] = []
    for v in sorted(adj):
        if not n_children[v] and v != root:
            leaf_kids.setdefault(parent[v], []).append(v)
            heap.append((-depth[v], v))
    heapq.heapify(heap)
    pairable = sorted(p for p, ks in leaf_kids.items() if len(ks) >= 2)
    dead: Set[int] = set()
    nxt = t.max_id() + 1
    pairs: List[Tuple[int, int]] = []

    def new_leaf(w, p):
        ks = leaf_kids.setdefault(p, [])
        ks.append(w)
        heapq.heappush(heap, (-depth[w], w))
        if len(ks) == 2:
            pairable.append(p)

    for _ in range(len(adj) - 1):
        w = nxt
        nxt += 1
        if pairable:
            p = pairable.pop()
            ks = leaf_kids[p]
            l1, l2 = ks.pop(), ks.pop()
            if len(ks) >= 2:
                pairable.append(p)
            pairs.append((l1, l2))
            dead.update((l1, l2))
            parent[w] = p
            depth[w] = depth[p] + 1
            new_leaf(w, p)
            continue
        while True:
            _, l = heapq.heappop(heap)
            if l not in dead:
                break
        p = parent[l]
        # p has no other leaf child, and l is deepest, so l is p's only child
        leaf_kids[p].remove(l)
        pairs.append((l, p))
        dead.update((l, p))
        gp = parent[p]
        parent[w] = gp
        depth[w] = depth[p]
        if gp is not None:
            new_leaf(w, gp)
    return ContractionSequence(t.copy(), pairs)


# -- greedy ------------------------------------------------------------------

def _merge_cost(g: Trigraph, u: int, v: int, by_degree: List[int]) -> Tuple[int, int]:
    black, red = g.merged_neighborhood(u, v)
    ru, rv = g.red_neighbors(u), g.red_neighbors(v)
    local = len(red)
    for z in red:
        dz = g.red_degree(z) - (z in ru) - (z in rv) + 1
        if dz > local:
            local = dz
    rest = 0
    for z in by_degree:
        if z != u and z != v and z not in red:
            rest = g.red_degree(z)
            break
    return max(local, rest), local


def greedy_upper_bound(g: Trigraph) -> SolveResult:
    """Contract the pair giving the smallest resulting red degree, ties by ids."""
    cur = g.copy()
    nxt = g.max_id() + 1
    pairs = []
    while len(cur) > 1:
        ids = sorted(cur.vertices)
        by_degree = sorted(ids, key=lambda z: -cur.red_degree(z))
        best = None
        for i, u in enumerate(ids):
            for v in ids[i + 1:]:
                cost = _merge_cost(cur, u, v, by_degree)
                if best is None or cost < best[0]:
                    best = (cost, u, v)
        _, u, v = best
        cur.contract_inplace(u, v, nxt)
        nxt += 1
        pairs.append((u, v))
    seq = ContractionSequence(g.copy(), pairs)
    return SolveResult(UPPER_BOUND_ONLY, verify(seq).width, seq)
