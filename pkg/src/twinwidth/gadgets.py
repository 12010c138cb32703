"""Hardness gadgets and their explicit contraction routines.

Construction goes through :class:`InstanceBuilder`, which owns a trigraph,
a role manifest (``"clause[2].or1.a" -> id``) and the propagation digraph.
Contraction routines act on a live :class:`~twinwidth.sequence.Contractor`
and always name vertices by their original ids.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .sequence import Contractor
from .trigraph import Trigraph


class GadgetError(ValueError):
    pass


class PreconditionError(GadgetError):
    pass


class AttachmentViolation(GadgetError):
    def __init__(self, bullet: str, vertex, message: str):
        super().__init__(f"attachment rule, {bullet}: {message}")
        self.bullet = bullet
        self.vertex = vertex


# -- handles -----------------------------------------------------------------

@dataclass
class FenceHandle:
    A: List[int]
    B: List[int]
    S: List[int]

    @property
    def vertices(self) -> List[int]:
        return self.A + self.B


@dataclass
class VerticalSet:
    name: str
    x: int
    y: int
    fence: FenceHandle

    @property
    def unit(self) -> List[int]:
        return [self.x, self.y] + self.fence.vertices


@dataclass
class OrHandle:
    name: str
    a: int
    b: int
    c: int
    d: int
    e: int
    vab: VerticalSet
    vcd: VerticalSet
    outer: FenceHandle
    in1: Tuple[int, int]
    in2: Tuple[int, int]
    inputs: Tuple[Optional[VerticalSet], Optional[VerticalSet]] = (None, None)
    out: Optional[VerticalSet] = None

    @property
    def vertices(self) -> List[int]:
        return [self.a, self.b, self.c, self.d, self.e] + self.vab.fence.vertices \
            + self.vcd.fence.vertices + self.outer.vertices


@dataclass
class AndHandle:
    inputs: Tuple[VerticalSet, VerticalSet]
    out: VerticalSet


@dataclass
class HalfHandle:
    """One side (top or bottom) of a variable gadget."""
    core: OrHandle
    f: int
    g: int
    inner_fence: FenceHandle
    fence: FenceHandle

    @property
    def T(self) -> List[int]:
        return self.core.vertices + self.inner_fence.vertices + [self.f, self.g]

    @property
    def vertices(self) -> List[int]:
        return self.T + self.fence.vertices


@dataclass
class VariableHandle:
    name: str
    x: int
    top: int
    bot: int
    fence: FenceHandle
    halves: Dict[str, HalfHandle]
    guards: Tuple[VerticalSet, VerticalSet]
    outputs: Tuple[VerticalSet, VerticalSet]

    def literal(self, polarity: str) -> int:
        return self.top if polarity == "top" else self.bot


@dataclass
class ClauseHandle:
    name: str
    ors: List[OrHandle]
    chain: List[VerticalSet]
    inputs: List[VerticalSet]
    out: VerticalSet


# -- propagation digraph -----------------------------------------------------

class PropagationDigraph:
    def __init__(self, max_out: int = 2, max_in: int = 2, max_total: int = 3):
        self.nodes: Dict[str, VerticalSet] = {}
        self.children: Dict[str, List[str]] = {}
        self.parents: Dict[str, List[str]] = {}
        self.caps = (max_out, max_in, max_total)

    def add_node(self, v: VerticalSet) -> None:
        if v.name in self.nodes:
            raise GadgetError(f"vertical set {v.name} already registered")
        self.nodes[v.name] = v
        self.children[v.name] = []
        self.parents[v.name] = []

    def degree(self, name: str) -> int:
        return len(self.children[name]) + len(self.parents[name])

    def add_arc(self, src: str, dst: str) -> None:
        if src == dst:
            raise GadgetError(f"self-arc on {src}")
        if dst in self.children[src]:
            raise GadgetError(f"arc {src}->{dst} already present")
        max_out, max_in, max_total = self.caps
        if len(self.children[src]) + 1 > max_out:
            raise GadgetError(f"out-degree cap exceeded at {src}")
        if len(self.parents[dst]) + 1 > max_in:
            raise GadgetError(f"in-degree cap exceeded at {dst}")
        for v in (src, dst):
            if self.degree(v) + 1 > max_total:
                raise GadgetError(f"total degree cap exceeded at {v}")
        self.children[src].append(dst)
        self.parents[dst].append(src)

    def arcs(self) -> List[Tuple[str, str]]:
        return [(s, t) for s, ts in self.children.items() for t in ts]

    def reachable(self, roots: Iterable[str]) -> Set[str]:
        seen = set(roots)
        stack = list(seen)
        while stack:
            v = stack.pop()
            for w in self.children[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def topological(self, subset: Optional[Iterable[str]] = None) -> List[str]:
        keep = set(self.nodes if subset is None else subset)
        indeg = {v: sum(p in keep for p in self.parents[v]) for v in keep}
        order = []
        ready = sorted(v for v, k in indeg.items() if k == 0)
        while ready:
            v = ready.pop(0)
            order.append(v)
            for w in self.children[v]:
                if w in keep:
                    indeg[w] -= 1
                    if indeg[w] == 0:
                        ready.append(w)
        if len(order) != len(keep):
            raise GadgetError("propagation digraph has a cycle")
        return order


# -- builder -----------------------------------------------------------------

class InstanceBuilder:
    def __init__(self, g: Optional[Trigraph] = None):
        self.g = g if g is not None else Trigraph()
        self.next_id = self.g.max_id() + 1
        self.manifest: Dict[str, int] = {}
        self.digraph = PropagationDigraph()
        self.fences: Dict[str, FenceHandle] = {}
        self.ors: Dict[str, OrHandle] = {}

    def vertex(self, role: Optional[str] = None) -> int:
        v = self.next_id
        self.next_id += 1
        self.g.add_vertex(v)
        if role is not None:
            if role in self.manifest:
                raise GadgetError(f"role {role} used twice")
            self.manifest[role] = v
        return v

    def join(self, xs: Iterable[int], ys: Iterable[int]) -> None:
        for u in xs:
            for v in ys:
                if u != v and not self.g.is_black(u, v):
                    self.g.add_edge(u, v)

    def attach_fence(self, s: Iterable[int], role: str) -> FenceHandle:
        s = list(s)
        if not s:
            raise GadgetError("a fence needs a non-empty attached set")
        A = [self.vertex(f"{role}.a[{i}]") for i in range(1, 7)]
        B = [self.vertex(f"{role}.b[{i}]") for i in range(1, 7)]
        for i in range(6):
            self.g.add_edge(A[i], A[(i + 1) % 6])
            self.g.add_edge(B[i], B[(i + 1) % 6])
            self.g.add_edge(A[i], B[i], red=True)
            if i < 5:
                self.g.add_edge(A[i], B[i + 1], red=True)
        self.g.add_edge(B[0], A[5])
        self.join(A, s)
        fence = FenceHandle(A, B, s)
        self.fences[role] = fence
        return fence

    def vertical_set(self, name: str, register: bool = True) -> VerticalSet:
        x = self.vertex(f"{name}.x")
        y = self.vertex(f"{name}.y")
        v = VerticalSet(name, x, y, self.attach_fence([x, y], f"{name}.fence"))
        if register:
            self.digraph.add_node(v)
        return v

    def guard(self, unit: Iterable[int], child: VerticalSet) -> None:
        """Make ``child.x`` adjacent to every vertex of ``unit``."""
        self.join([child.x], unit)

    def add_arc(self, parent: VerticalSet, child: VerticalSet) -> None:
        self.digraph.add_arc(parent.name, child.name)
        self.guard(parent.unit, child)

    def long_chain(self, src: VerticalSet, dst: VerticalSet, L: int, name: str) -> List[VerticalSet]:
        """Directed path on L vertical sets from src to dst (L - 2 new ones)."""
        if L < 2:
            raise GadgetError("a long chain needs L >= 2")
        chain = [src] + [self.vertical_set(f"{name}[{k}]") for k in range(1, L - 1)] + [dst]
        for p, q in zip(chain, chain[1:]):
            self.add_arc(p, q)
        return chain

    def or_core(self, in1: Tuple[int, int], in2: Tuple[int, int], name: str) -> OrHandle:
        a, b, c, d, e = (self.vertex(f"{name}.{r}") for r in "abcde")
        vab = VerticalSet(f"{name}.ab", a, b, self.attach_fence([a, b], f"{name}.ab.fence"))
        vcd = VerticalSet(f"{name}.cd", c, d, self.attach_fence([c, d], f"{name}.cd.fence"))
        self.g.add_edge(a, c)
        self.g.add_edge(b, d)
        self.g.add_edge(e, a)
        self.g.add_edge(e, c)
        outer = self.attach_fence([e] + vab.unit + vcd.unit, f"{name}.outer")
        self.join([a], in1)
        self.join([c], in2)
        h = OrHandle(name, a, b, c, d, e, vab, vcd, outer, tuple(in1), tuple(in2))
        self.ors[name] = h
        return h

    def or_gadget(self, in1: VerticalSet, in2: VerticalSet, out: VerticalSet, name: str) -> OrHandle:
        h = self.or_core((in1.x, in1.y), (in2.x, in2.y), name)
        h.inputs = (in1, in2)
        h.out = out
        self.guard(h.vertices, out)
        return h

    def and_gadget(self, in1: VerticalSet, in2: VerticalSet, out: VerticalSet) -> AndHandle:
        self.add_arc(in1, out)
        self.add_arc(in2, out)
        return AndHandle((in1, in2), out)

    def variable_gadget(self, name: str, guards: Tuple[VerticalSet, VerticalSet],
                        outputs: Tuple[VerticalSet, VerticalSet]) -> VariableHandle:
        x = self.vertex(f"{name}.x")
        top = self.vertex(f"{name}.top")
        bot = self.vertex(f"{name}.bot")
        fence = self.attach_fence([x, top, bot], f"{name}.fence")
        halves = {}
        for pol, lit, out in (("top", top, outputs[0]), ("bot", bot, outputs[1])):
            f = self.vertex(f"{name}.{pol}.f")
            g = self.vertex(f"{name}.{pol}.g")
            core = self.or_core((x, lit), (f, g), f"{name}.{pol}.or")
            inner = self.attach_fence(core.vertices + [f], f"{name}.{pol}.inner_fence")
            T = core.vertices + inner.vertices + [f, g]
            outer = self.attach_fence(T, f"{name}.{pol}.fence")
            halves[pol] = HalfHandle(core, f, g, inner, outer)
            self.guard(T + outer.vertices, out)
        self.join([top], [guards[0].x, guards[0].y])
        self.join([bot], [guards[1].x, guards[1].y])
        return VariableHandle(name, x, top, bot, fence, halves, guards, outputs)

    def clause_gadget(self, inputs: Sequence[VerticalSet], out: VerticalSet, L: int,
                      name: str) -> ClauseHandle:
        if len(inputs) == 2:
            h = self.or_gadget(inputs[0], inputs[1], out, f"{name}.or1")
            return ClauseHandle(name, [h], [], list(inputs), out)
        if len(inputs) != 3:
            raise GadgetError("clause gadgets take two or three inputs")
        mid = self.vertical_set(f"{name}.mid")
        mid2 = self.vertical_set(f"{name}.mid2")
        or1 = self.or_gadget(inputs[0], inputs[1], mid, f"{name}.or1")
        chain = self.long_chain(mid, mid2, L, f"{name}.chain")
        or2 = self.or_gadget(mid2, inputs[2], out, f"{name}.or2")
        return ClauseHandle(name, [or1, or2], chain, list(inputs), out)


# -- attachment rule ---------------------------------------------------------

def check_attachment_rule(g: Trigraph, fence: FenceHandle, s: Optional[Iterable[int]] = None) -> Set[int]:
    """Return X for ``fence`` attached to ``s`` (default: its recorded set)."""
    F = set(fence.vertices)
    S = set(fence.S if s is None else s)
    for v in F:
        if v not in g:
            raise AttachmentViolation("structure", v, f"fence vertex {v} is not live")
        if g.red_neighbors(v) - F:
            raise AttachmentViolation("red component", v, f"red edge leaves the fence at {v}")
    comp = {fence.A[0]}
    stack = [fence.A[0]]
    while stack:
        u = stack.pop()
        for z in g.red_neighbors(u):
            if z not in comp:
                comp.add(z)
                stack.append(z)
    if comp != F:
        raise AttachmentViolation("red component", fence.A[0], "fence is not red-connected")
    X = g.neighbors(fence.A[0]) - F - S
    for v in fence.A:
        if g.neighbors(v) - F != X | S:
            raise AttachmentViolation("bullet 1", v, f"A-vertex {v} has neighbourhood other than X+S")
    for v in fence.B:
        if g.neighbors(v) - F != X:
            raise AttachmentViolation("bullet 2", v, f"B-vertex {v} has neighbourhood other than X")
    for v in X:
        if not S <= g.neighbors(v):
            raise AttachmentViolation("bullet 3", v, f"X-vertex {v} misses part of S")
    return X


def red_graph_is_fence_paths(g: Trigraph) -> bool:
    """Every red component is an isolated vertex or a path on 12 vertices."""
    for comp in g.red_components():
        if len(comp) == 1:
            continue
        if len(comp) != 12:
            return False
        degs = sorted(g.red_degree(v) for v in comp)
        if degs != [1, 1] + [2] * 10:
            return False
    return True


# -- contraction routines ----------------------------------------------------

def _single(c: Contractor, ids: Iterable[int]) -> Optional[int]:
    reps = {c.find(v) for v in ids}
    return reps.pop() if len(reps) == 1 else None


def contract_fence(c: Contractor, fence: FenceHandle, s: int) -> int:
    """Collapse an untouched fence attached to the single vertex ``s``.

    Returns the new fence vertex, whose only red neighbour is ``s``.
    """
    for v in fence.vertices:
        if c.find(v) != v:
            raise PreconditionError(f"fence vertex {v} was already contracted")
    s = c.find(s)
    if _single(c, fence.S) != s:
        raise PreconditionError("the attached set is not contracted to s")
    if c.red_degree(s) > 3:
        raise PreconditionError(f"s has red degree {c.red_degree(s)} > 3")
    check_attachment_rule(c.g, fence, [s])
    a, b = fence.A, fence.B
    c1 = c.merge(a[0], b[0])
    bb = c.merge(b[1], b[2])
    aa = c.merge(a[1], a[2])
    for i in (3, 4, 5):
        bb = c.merge(b[i], bb)
        aa = c.merge(a[i], aa)
    return c.merge(c.merge(aa, c1), bb)


def collapse_vertical_set(c: Contractor, v: VerticalSet) -> int:
    z = prime(c, v)
    return finish_vertical_set(c, v, z)


def prime(c: Contractor, v: VerticalSet) -> int:
    if c.find(v.x) == c.find(v.y):
        return c.find(v.x)
    return c.merge(v.x, v.y)


def finish_vertical_set(c: Contractor, v: VerticalSet, z: Optional[int] = None) -> int:
    z = c.find(v.x) if z is None else z
    if c.find(v.y) != z:
        raise PreconditionError(f"vertical pair of {v.name} is not contracted")
    f = contract_fence(c, v.fence, z)
    return c.merge(f, z)


def is_collapsed(c: Contractor, ids: Iterable[int]) -> bool:
    return _single(c, ids) is not None


def contract_or(c: Contractor, h: OrHandle, side: int) -> int:
    """Collapse an OR gadget once input ``side`` (1 or 2) is contracted.

    The result has exactly the red neighbours z (the contracted input) and
    the two vertices of the other input.
    """
    if side not in (1, 2):
        raise GadgetError("side must be 1 or 2")
    pin, pother = (h.in1, h.in2) if side == 1 else (h.in2, h.in1)
    z = _single(c, pin)
    if z is None:
        raise PreconditionError(f"{h.name}: input {side} is not contracted")
    for v in [h.a, h.b, h.c, h.d, h.e]:
        if c.find(v) != v:
            raise PreconditionError(f"{h.name}: gadget already touched")
    near, far = (h.vab, h.vcd) if side == 1 else (h.vcd, h.vab)
    # each input vertex turns red towards its merged pair unless already red
    checks = [(z, near.x)] + [(c.find(u), far.x) for u in pother]
    for v, hook in checks:
        if c.red_degree(v) + (not c.g.is_red(v, hook)) > 4:
            raise PreconditionError(f"{h.name}: input vertex {v} would exceed red degree 4")
    alpha = c.merge(near.x, near.y)
    gamma = c.merge(far.x, far.y)
    alpha = c.merge(contract_fence(c, near.fence, alpha), alpha)
    alpha = c.merge(alpha, h.e)
    gamma = c.merge(contract_fence(c, far.fence, gamma), gamma)
    eps = c.merge(alpha, gamma)
    return c.merge(contract_fence(c, h.outer, eps), eps)


def contract_variable_half(c: Contractor, var: VariableHandle, polarity: str) -> int:
    """Contract x with the literal vertex, then the whole half into one vertex."""
    if polarity not in ("top", "bot"):
        raise GadgetError("polarity is 'top' or 'bot'")
    for v in (var.x, var.top, var.bot):
        if c.find(v) != v:
            raise PreconditionError(f"{var.name}: variable core already contracted")
    half = var.halves[polarity]
    c.merge(var.x, var.literal(polarity))
    u = contract_or(c, half.core, 1)
    u = c.merge(u, half.f)
    u = c.merge(contract_fence(c, half.inner_fence, u), u)
    v = c.merge(u, half.g)
    return c.merge(contract_fence(c, half.fence, v), v)


def contract_variable_rest(c: Contractor, var: VariableHandle, polarity: str) -> int:
    """Finish a variable gadget whose ``polarity`` half is contracted and whose
    half-guard pairs are both contracted."""
    other = "bot" if polarity == "top" else "top"
    lit = c.find(var.x)
    if c.find(var.literal(polarity)) != lit or c.find(var.literal(other)) == lit:
        raise PreconditionError(f"{var.name}: the {polarity} half was not contracted")
    u = _single(c, var.halves[polarity].vertices)
    if u is None:
        raise PreconditionError(f"{var.name}: the {polarity} half is not a single vertex")
    z = []
    for gv in var.guards:
        zz = _single(c, (gv.x, gv.y))
        if zz is None:
            raise PreconditionError(f"{var.name}: half-guard {gv.name} is not contracted")
        z.append(zz)
    z_other = z[1] if polarity == "top" else z[0]
    if c.red_degree(z_other) > 3:
        raise PreconditionError(f"{var.name}: guard vertex has red degree above 3")
    half = var.halves[other]
    v = c.merge(var.literal(other), lit)
    w = contract_or(c, half.core, 1)
    w = c.merge(w, half.f)
    w = c.merge(contract_fence(c, half.inner_fence, w), w)
    w = c.merge(w, half.g)
    w = c.merge(contract_fence(c, half.fence, w), w)
    y = c.merge(u, w)
    v = c.merge(contract_fence(c, var.fence, v), v)
    return c.merge(v, y)


# -- exhaustive checks -------------------------------------------------------

@dataclass
class FirstStepReport:
    checked: Dict[str, int] = field(default_factory=dict)
    minimum: Dict[str, int] = field(default_factory=dict)
    failures: List[Tuple[str, int, int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def exhaustive_first_step_check(g: Trigraph, fence: FenceHandle,
                                s: Optional[Iterable[int]] = None) -> FirstStepReport:
    """Try every single first contraction that the fence bounds cover.

    * A x A and B x B merges must create red degree >= 5,
    * A x B merges must have red degree >= 3 inside the fence,
    * X x S, Y x S and X x Y merges must create red degree >= 6, 6, 12.
    """
    F = set(fence.vertices)
    S = set(fence.S if s is None else s)
    X = check_attachment_rule(g, fence, S)
    Y = set(g.vertices) - F - S - X
    rep = FirstStepReport()

    def run(kind, pairs, bound, within=None):
        count = 0
        low = None
        for u, v in pairs:
            _, red = g.merged_neighborhood(u, v)
            k = len(red & within) if within is not None else len(red)
            count += 1
            low = k if low is None else min(low, k)
            if k < bound:
                rep.failures.append((kind, u, v, k))
        rep.checked[kind] = count
        if low is not None:
            rep.minimum[kind] = low

    same_side = list(itertools.combinations(fence.A, 2)) + list(itertools.combinations(fence.B, 2))
    run("AxA/BxB", same_side, 5)
    run("AxB", itertools.product(fence.A, fence.B), 3, within=F)
    run("XxS", itertools.product(sorted(X), sorted(S)), 6)
    run("YxS", itertools.product(sorted(Y), sorted(S)), 6)
    run("XxY", itertools.product(sorted(X), sorted(Y)), 12)
    return rep


def explore(g: Trigraph, depth: int, predicate: Callable[[Dict[int, frozenset]], Optional[str]],
            d: int = 4, max_nodes: int = 100_000):
    """Bounded search over partial d-sequences of length <= depth.

    ``predicate`` receives the current partition (vertex -> original set) and
    returns a message when the state is forbidden.  Returns
    ``(violation or None, nodes, exhausted)``; exhausted is False when the
    node budget ran out first.
    """
    nodes = 0
    seen = set()
    start = g.max_id() + 1

    def rec(cur: Trigraph, parts, k):
        nonlocal nodes
        key = frozenset(parts.values())
        if key in seen:
            return None
        seen.add(key)
        nodes += 1
        if nodes > max_nodes:
            raise StopIteration
        msg = predicate(parts)
        if msg:
            return msg
        if k == depth:
            return None
        ids = sorted(cur.vertices)
        w = start + k
        for i, u in enumerate(ids):
            for v in ids[i + 1:]:
                _, red = cur.merged_neighborhood(u, v)
                if len(red) > d:
                    continue
                nxt = cur.contract(u, v, w)
                if nxt.max_red_degree() > d:
                    continue
                sub = dict(parts)
                sub[w] = sub.pop(u) | sub.pop(v)
                found = rec(nxt, sub, k + 1)
                if found:
                    return found
        return None

    try:
        res = rec(g, {v: frozenset([v]) for v in g.vertices}, 0)
    except StopIteration:
        return None, nodes, False
    return res, nodes, True
