"""Long subdivisions and their explicit 4-sequence.

The vertices of H sit at the leaves of a virtual full binary tree whose
internal edges are red.  Every subdivided edge is first shortened to
exactly 2h - 1 inner vertices (h the tree height), then "zipped" with the
walk leaf i -> root -> leaf j, which deletes it.  What remains is a red
binary tree, contracted with the tree sequence.  Restricting the whole
sequence to the original vertices gives a sequence for the subdivision.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple, Union

from .sequence import ContractionSequence, Contractor, restrict
from .solver import tree_sequence
from .trigraph import Trigraph, TrigraphError


class SubdivisionError(ValueError):
    pass


def ceil_log2(n: int) -> int:
    return max(0, (n - 1).bit_length())


def length_bound(n: int) -> int:
    """Minimum number of inner vertices per subdivided edge for n branch vertices."""
    return max(0, 2 * ceil_log2(n) - 1)


@dataclass
class SubdivisionInstance:
    """A trigraph ``g`` that subdivides ``h``.

    ``paths[k] = (i, inner, j)`` lists the inner vertices of the k-th edge
    from i to j.  Parallel edges and loops are allowed, which lets this also
    describe arbitrary degree-<=4 red residuals.
    """
    h_vertices: List[int]
    paths: List[Tuple[int, List[int], int]]
    g: Trigraph
    h: Optional[Trigraph] = None

    @property
    def n(self) -> int:
        return len(self.h_vertices)

    def path(self, i: int, j: int) -> List[int]:
        for a, inner, b in self.paths:
            if (a, b) == (i, j):
                return inner
            if (b, a) == (i, j):
                return inner[::-1]
        raise KeyError((i, j))

    def registry(self) -> Dict[Tuple[Tuple[int, int], int], int]:
        """s(ij, k) -> vertex id, positions counted from min(i, j)."""
        out = {}
        for a, inner, b in self.paths:
            seq = inner if a <= b else inner[::-1]
            for k, s in enumerate(seq, 1):
                out[((min(a, b), max(a, b)), k)] = s
        return out


def subdivide(h: Trigraph, lengths: Union[int, Mapping[Tuple[int, int], int]],
              red: Union[None, str, Iterable[Tuple[int, int]]] = None) -> SubdivisionInstance:
    """Replace every edge ij of ``h`` by a path with ``lengths[ij]`` inner vertices.

    A red edge of ``h`` gives an all-red path.  ``red="all"`` turns every
    edge of the result red; an iterable of pairs turns just those red.
    """
    g = Trigraph(h.vertices)
    nxt = h.max_id() + 1
    paths = []
    edges = sorted((e, False) for e in h.black_edges()) + sorted((e, True) for e in h.red_edges())
    edges.sort()
    for (i, j), is_red in edges:
        z = lengths if isinstance(lengths, int) else lengths.get((i, j), lengths.get((j, i)))
        if z is None or z < 1:
            raise SubdivisionError(f"edge {i}-{j} needs a positive subdivision length")
        inner = list(range(nxt, nxt + z))
        nxt += z
        for v in inner:
            g.add_vertex(v)
        walk = [i] + inner + [j]
        for a, b in zip(walk, walk[1:]):
            g.add_edge(a, b, red=is_red)
        paths.append((i, inner, j))
    if red == "all":
        for u, v in list(g.black_edges()):
            g.remove_edge(u, v)
            g.add_edge(u, v, red=True)
    elif red is not None:
        for u, v in red:
            if not g.is_black(u, v):
                raise SubdivisionError(f"{u}-{v} is not a black edge of the subdivision")
            g.remove_edge(u, v)
            g.add_edge(u, v, red=True)
    return SubdivisionInstance(sorted(h.vertices), paths, g, h.copy())


def desubdivide(g: Trigraph) -> Tuple[SubdivisionInstance, List[Set[int]]]:
    """Read ``g`` as a subdivision of the multigraph on its vertices of degree != 2.

    Components where every vertex has degree 2 (cycles) have no branch
    vertex; they are returned separately.
    """
    deg = {v: len(g.neighbors(v)) for v in g.vertices}
    h_vertices = sorted(v for v, k in deg.items() if k != 2)
    branch = set(h_vertices)
    paths = []
    used: Set[Tuple[int, int]] = set()
    for i in h_vertices:
        for first in sorted(g.neighbors(i)):
            if (i, first) in used:
                continue
            inner = []
            prev, cur = i, first
            while cur not in branch:
                inner.append(cur)
                nxt_ = [z for z in g.neighbors(cur) if z != prev]
                prev, cur = cur, nxt_[0]
            used.add((i, first))
            used.add((cur, prev))
            paths.append((i, inner, cur))
    covered = branch | {v for _, inner, _ in paths for v in inner}
    cycles = [c for c in g.components() if not c & covered]
    inst = SubdivisionInstance(h_vertices, paths, g.induced(covered))
    return inst, cycles


@dataclass
class TreeRegistry:
    height: int
    # nodes[level][index]; level 0 is the root, level `height` holds the leaves
    nodes: List[List[int]]
    leaf_of: Dict[int, int] = field(default_factory=dict)
    padding: List[int] = field(default_factory=list)

    def internal(self) -> List[int]:
        return [v for level in self.nodes[:-1] for v in level]

    def walk(self, i: int, j: int) -> List[int]:
        """Inner vertices of the walk leaf i -> root -> leaf j."""
        up = []
        p = self.leaf_of[i]
        for level in range(self.height - 1, -1, -1):
            p //= 2
            up.append(self.nodes[level][p])
        down = []
        q = self.leaf_of[j]
        for level in range(self.height - 1, 0, -1):
            q //= 2
            down.append(self.nodes[level][q])
        return up + down[::-1]

    def parent(self, v: int) -> Optional[int]:
        for level in range(1, self.height + 1):
            if v in self.nodes[level]:
                return self.nodes[level - 1][self.nodes[level].index(v) // 2]
        return None


def build_supertrigraph(inst: SubdivisionInstance) -> Tuple[Trigraph, TreeRegistry]:
    """Add a virtual binary tree over the branch vertices; leaf edges omitted,
    all other tree edges red."""
    g = inst.g.copy()
    h = ceil_log2(inst.n)
    nxt = g.max_id() + 1
    nodes: List[List[int]] = []
    for level in range(h):
        row = list(range(nxt, nxt + 2 ** level))
        nxt += len(row)
        for v in row:
            g.add_vertex(v)
        nodes.append(row)
    leaves = list(inst.h_vertices)
    padding = []
    while len(leaves) < 2 ** h:
        g.add_vertex(nxt)
        padding.append(nxt)
        leaves.append(nxt)
        nxt += 1
    nodes.append(leaves)
    for level in range(1, h):
        for k, v in enumerate(nodes[level]):
            g.add_edge(nodes[level - 1][k // 2], v, red=True)
    reg = TreeRegistry(h, nodes, {v: k for k, v in enumerate(leaves)}, padding)
    return g, reg


def check_preconditions(inst: SubdivisionInstance) -> None:
    bound = length_bound(inst.n)
    for i, inner, j in inst.paths:
        if len(inner) < bound:
            raise SubdivisionError(f"edge {i}-{j} has {len(inner)} inner vertices, "
                                   f"needs at least {bound}")
    g = inst.g
    for v in g.vertices:
        r = g.red_degree(v)
        if r > 4:
            raise SubdivisionError(f"vertex {v} has red degree {r} > 4")
        if r == 4 and g.black_neighbors(v):
            raise SubdivisionError(f"vertex {v} has red degree 4 and a black neighbour")


def _normalize(c: Contractor, inner: List[int], z: int) -> List[int]:
    cur = [c.find(v) for v in inner]
    if len(cur) < z:
        raise SubdivisionError(f"path has {len(cur)} inner vertices, needs {z}")
    while len(cur) > z:
        k = (len(cur) - 1) // 2
        w = c.merge(cur[k], cur[k + 1])
        cur[k:k + 2] = [w]
    return cur


def _zip(c: Contractor, reg: TreeRegistry, i: int, inner: List[int], j: int) -> None:
    walk = reg.walk(i, j)
    if len(walk) != len(inner):
        raise SubdivisionError(f"path {i}-{j} has {len(inner)} inner vertices, "
                               f"walk has {len(walk)}; normalise first")
    for v, s in zip(walk, inner):
        c.merge(v, s)


def apply_sequence(c: Contractor, seq: ContractionSequence) -> None:
    """Replay ``seq`` (whose base is the contractor's live trigraph) inside ``c``."""
    ids: Dict[int, int] = {}
    start = seq.first_result_id
    for k, (u, v) in enumerate(seq.pairs):
        ids[start + k] = c.merge(ids.get(u, u), ids.get(v, v))


def _finish_forest(c: Contractor) -> None:
    """Collapse a live all-red forest to a single vertex at width <= max(2, degree)."""
    g = c.g
    comps = g.components()
    isolated = [next(iter(x)) for x in comps if len(x) == 1]
    big = [x for x in comps if len(x) > 1]
    for comp in big:
        apply_sequence(c, tree_sequence(c.g.induced(comp)))
    rest = sorted(c.find(v) for v in isolated) + sorted(c.find(next(iter(x))) for x in big)
    if rest:
        c.merge_all(sorted(set(rest)))


def _path_or_cycle(c: Contractor, comp: Set[int]) -> None:
    """Merge along a path or cycle; red degree never exceeds 2."""
    g = c.g
    start = min(comp, key=lambda v: (len(g.neighbors(v)), v))
    order = [start]
    seen = {start}
    while True:
        nxt_ = sorted(z for z in g.neighbors(order[-1]) if z not in seen)
        if not nxt_:
            break
        order.append(nxt_[0])
        seen.add(nxt_[0])
    c.merge_all(order)


def normalize_path(inst: SubdivisionInstance, edge: Tuple[int, int]) -> ContractionSequence:
    c = Contractor(inst.g)
    _normalize(c, inst.path(*edge), length_bound(inst.n))
    return c.sequence(partial=True)


def zip_edge(inst: SubdivisionInstance, edge: Tuple[int, int],
             supertrigraph: Optional[Tuple[Trigraph, TreeRegistry]] = None) -> ContractionSequence:
    """Partial sequence over the supertrigraph deleting the (normalised) path of ``edge``."""
    gp, reg = supertrigraph or build_supertrigraph(inst)
    i, j = min(edge), max(edge)
    inner = inst.path(i, j)
    if len(inner) != length_bound(inst.n):
        raise SubdivisionError("path is not normalised")
    c = Contractor(gp)
    _zip(c, reg, i, inner, j)
    return c.sequence(partial=True)


def supertrigraph_sequence(inst: SubdivisionInstance, limit: Optional[int] = 4):
    """Full sequence of the supertrigraph; returns (sequence, registry, zip end index)."""
    gp, reg = build_supertrigraph(inst)
    c = Contractor(gp, limit=limit)
    z = length_bound(inst.n)
    order = sorted(range(len(inst.paths)),
                   key=lambda k: (min(inst.paths[k][0], inst.paths[k][2]),
                                  max(inst.paths[k][0], inst.paths[k][2]), k))
    for k in order:
        i, inner, j = inst.paths[k]
        if i > j:
            i, inner, j = j, inner[::-1], i
        cur = _normalize(c, inner, z)
        _zip(c, reg, i, cur, j)
    zipped = len(c.pairs)
    _finish_forest(c)
    return c.sequence(), reg, zipped


def subdivision_sequence(inst: SubdivisionInstance, limit: Optional[int] = 4) -> ContractionSequence:
    """A full sequence of ``inst.g`` of width at most 4."""
    check_preconditions(inst)
    if len(inst.g) <= 1:
        return ContractionSequence(inst.g.copy(), [])
    seq, _, _ = supertrigraph_sequence(inst, limit)
    return restrict(seq, inst.g.vertices)


def red_subdivision_sequence(g: Trigraph, limit: Optional[int] = 4) -> ContractionSequence:
    """Sequence for an all-red trigraph read as a long subdivision.

    Cycle components are merged along the cycle first; the rest goes
    through the zipping routine.
    """
    if g.n_black_edges():
        raise SubdivisionError("expected an all-red trigraph")
    inst, cycles = desubdivide(g)
    check_preconditions(inst)
    c = Contractor(g, limit=limit)
    for comp in cycles:
        _path_or_cycle(c, comp)
    if len(inst.g) > 1:
        seq, _, _ = supertrigraph_sequence(inst, limit)
        apply_sequence(c, restrict(seq, inst.g.vertices))
    live = sorted(c.g.vertices)
    if len(live) > 1:
        c.merge_all(live)
    return c.sequence(partial=False)
