"""Encoding a trigraph by a plain graph through biclique blow-ups.

Every vertex v_i of a red component S becomes a biclique K_{t,t} with
sides A_i and B_i.  Black edges inside S become complete joins, red edges
become the canonical matchings a_{i,j}a_{i',j} and b_{i,j}b_{i',j}.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .sequence import ContractionSequence, Contractor
from .trigraph import Trigraph


class EncodingError(ValueError):
    pass


def sound_t(d: int, size: int) -> int:
    return 2 * (2 * d + 2) * (2 * d) ** (size - 1) + 1


@dataclass
class EncodingPlan:
    d: int
    S: List[int]
    t: int
    sound_t: int
    A: Dict[int, List[int]] = field(default_factory=dict)
    B: Dict[int, List[int]] = field(default_factory=dict)

    @property
    def tainted(self) -> bool:
        return self.t < self.sound_t

    @property
    def T(self) -> set:
        return {x for v in self.S for x in self.A[v] + self.B[v]}

    def to_dict(self) -> dict:
        return {"d": self.d, "S": self.S, "t": self.t, "sound_t": self.sound_t,
                "tainted": self.tainted,
                "A": {str(v): ids for v, ids in self.A.items()},
                "B": {str(v): ids for v, ids in self.B.items()}}


def _check_component(h: Trigraph, s, d: int) -> List[int]:
    s = sorted(set(s))
    if not s:
        raise EncodingError("empty component")
    if set(s) not in [set(c) for c in h.red_components()]:
        raise EncodingError("s is not a connected component of the red graph")
    worst = max(h.red_degree(v) for v in s)
    if worst > d:
        raise EncodingError(f"red degree {worst} in the component exceeds d={d}")
    return s


def estimated_size(size: int, t: int) -> Tuple[int, int]:
    """(vertices, lower bound on edges) added by encoding one component."""
    return 2 * t * size, t * t * size


def memory_guard_mb() -> float:
    return float(os.environ.get("TWW_MEMORY_GUARD_MB", "512"))


def _guard(size: int, t: int, force: bool) -> None:
    verts, edges = estimated_size(size, t)
    # roughly two set entries per edge plus per-vertex overhead
    mb = (edges * 2 * 70 + verts * 500) / 2 ** 20
    if mb > memory_guard_mb() and not force:
        raise EncodingError(f"encoding needs about {mb:.0f} MB ({verts} vertices, "
                            f"{edges} edges), above the {memory_guard_mb():.0f} MB guard")


def encode_component(h: Trigraph, s, d: int, t_override: Optional[int] = None,
                     force: bool = False) -> Tuple[Trigraph, set, EncodingPlan]:
    s = _check_component(h, s, d)
    st = sound_t(d, len(s))
    t = st if t_override is None else t_override
    if t < 1:
        raise EncodingError("t must be positive")
    _guard(len(s), t, force)
    sset = set(s)
    g = h.induced(set(h.vertices) - sset)
    plan = EncodingPlan(d, s, t, st)
    nxt = h.max_id() + 1
    for v in s:
        plan.A[v] = list(range(nxt, nxt + t))
        plan.B[v] = list(range(nxt + t, nxt + 2 * t))
        nxt += 2 * t
        for x in plan.A[v] + plan.B[v]:
            g.add_vertex(x)
        for a in plan.A[v]:
            for b in plan.B[v]:
                g.add_edge(a, b)
    for k, v in enumerate(s):
        Lv = plan.A[v] + plan.B[v]
        for v2 in s[k + 1:]:
            if h.is_black(v, v2):
                for x in Lv:
                    for y in plan.A[v2] + plan.B[v2]:
                        g.add_edge(x, y)
            elif h.is_red(v, v2):
                for x, y in zip(plan.A[v], plan.A[v2]):
                    g.add_edge(x, y)
                for x, y in zip(plan.B[v], plan.B[v2]):
                    g.add_edge(x, y)
        for z in h.black_neighbors(v) - sset:
            for x in Lv:
                g.add_edge(x, z)
    return g, plan.T, plan


def _decontract(c: Contractor, plan: EncodingPlan) -> Dict[int, int]:
    cur = {v: (plan.A[v][0], plan.B[v][0]) for v in plan.S}
    for side in (0, 1):
        for j in range(1, plan.t):
            for v in plan.S:
                members = plan.A[v] if side == 0 else plan.B[v]
                acc = c.merge(cur[v][side], members[j])
                cur[v] = (acc, cur[v][1]) if side == 0 else (cur[v][0], acc)
    return {c.merge(*cur[v]): v for v in plan.S}


def decontraction_sequence(g: Trigraph, plan: EncodingPlan) -> Tuple[ContractionSequence, Dict[int, int]]:
    """Partial sequence from the encoding back to the encoded trigraph.

    Returns the sequence and the map from final biclique vertices to v_i.
    """
    c = Contractor(g)
    back = _decontract(c, plan)
    return c.sequence(partial=True), back


@dataclass
class EncodingResult:
    g: Trigraph
    plans: List[EncodingPlan]

    def decontraction(self) -> Tuple[ContractionSequence, Dict[int, int]]:
        c = Contractor(self.g)
        back: Dict[int, int] = {}
        for plan in self.plans:
            back.update(_decontract(c, plan))
        return c.sequence(partial=True), back


def encode_all(h: Trigraph, d: int, t_override: Optional[int] = None,
               force: bool = False, max_component: Optional[int] = None) -> EncodingResult:
    comps = sorted((sorted(c) for c in h.red_components() if len(c) >= 2), key=lambda c: c[0])
    if max_component is not None:
        for comp in comps:
            if len(comp) > max_component:
                raise EncodingError(f"red component of size {len(comp)} above {max_component}")
    for comp in comps:
        _guard(len(comp), sound_t(d, len(comp)) if t_override is None else t_override, force)
    g = h.copy()
    plans = []
    for comp in comps:
        g, _, plan = encode_component(g, comp, d, t_override, force)
        plans.append(plan)
    return EncodingResult(g, plans)
