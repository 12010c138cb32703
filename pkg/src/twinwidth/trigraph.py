"""Trigraphs: graphs whose edges are coloured black or red.

Vertices are opaque integers.  Adjacency is kept as two dicts of neighbour
sets so that a contraction costs O(deg(u) + deg(v)).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Set, Tuple


class TrigraphError(ValueError):
    pass


Edge = Tuple[int, int]


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass
class RedDegreeProfile:
    degrees: Dict[int, int]
    max_red_degree: int


class Trigraph:
    __slots__ = ("_black", "_red")

    def __init__(self, vertices: Iterable[int] = (), black: Iterable[Edge] = (),
                 red: Iterable[Edge] = ()):
        self._black: Dict[int, Set[int]] = {}
        self._red: Dict[int, Set[int]] = {}
        for v in vertices:
            self.add_vertex(v)
        for u, v in black:
            self.add_edge(u, v)
        for u, v in red:
            self.add_edge(u, v, red=True)

    # -- construction ------------------------------------------------------

    def add_vertex(self, v: int) -> None:
        if v in self._black:
            raise TrigraphError(f"vertex {v} already present")
        self._black[v] = set()
        self._red[v] = set()

    def add_edge(self, u: int, v: int, red: bool = False) -> None:
        if u == v:
            raise TrigraphError(f"self-loop on {u}")
        if u not in self._black or v not in self._black:
            raise TrigraphError(f"unknown endpoint in edge {u}-{v}")
        if v in self._black[u] or v in self._red[u]:
            raise TrigraphError(f"edge {u}-{v} already present")
        adj = self._red if red else self._black
        adj[u].add(v)
        adj[v].add(u)

    def remove_edge(self, u: int, v: int) -> None:
        for adj in (self._black, self._red):
            adj[u].discard(v)
            adj[v].discard(u)

    def copy(self) -> "Trigraph":
        g = Trigraph.__new__(Trigraph)
        g._black = {v: set(n) for v, n in self._black.items()}
        g._red = {v: set(n) for v, n in self._red.items()}
        return g

    # -- queries -----------------------------------------------------------

    @property
    def vertices(self):
        return self._black.keys()

    @property
    def n_vertices(self) -> int:
        return len(self._black)

    def __len__(self) -> int:
        return len(self._black)

    def __contains__(self, v) -> bool:
        return v in self._black

    def max_id(self) -> int:
        return max(self._black, default=0)

    def black_neighbors(self, v: int) -> Set[int]:
        return self._black[v]

    def red_neighbors(self, v: int) -> Set[int]:
        return self._red[v]

    def neighbors(self, v: int) -> Set[int]:
        return self._black[v] | self._red[v]

    def is_black(self, u: int, v: int) -> bool:
        return v in self._black[u]

    def is_red(self, u: int, v: int) -> bool:
        return v in self._red[u]

    def black_edges(self) -> Set[Edge]:
        return {(u, v) for u, ns in self._black.items() for v in ns if u < v}

    def red_edges(self) -> Set[Edge]:
        return {(u, v) for u, ns in self._red.items() for v in ns if u < v}

    def n_black_edges(self) -> int:
        return sum(map(len, self._black.values())) // 2

    def n_red_edges(self) -> int:
        return sum(map(len, self._red.values())) // 2

    def red_degree(self, v: int) -> int:
        try:
            return len(self._red[v])
        except KeyError:
            raise TrigraphError(f"unknown vertex {v}") from None

    def max_red_degree(self) -> int:
        return max(map(len, self._red.values()), default=0)

    def red_degree_profile(self) -> RedDegreeProfile:
        degrees = {v: len(ns) for v, ns in self._red.items()}
        return RedDegreeProfile(degrees, max(degrees.values(), default=0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trigraph):
            return NotImplemented
        return self._black == other._black and self._red == other._red

    def __repr__(self) -> str:
        return (f"Trigraph(n={self.n_vertices}, black={self.n_black_edges()}, "
                f"red={self.n_red_edges()})")

    # -- operations --------------------------------------------------------

    def merged_neighborhood(self, u: int, v: int) -> Tuple[Set[int], Set[int]]:
        """Black and red neighbours a vertex merging ``u`` and ``v`` would get."""
        bu, bv = self._black[u], self._black[v]
        black = (bu & bv) - {u, v}
        red = ((bu | bv | self._red[u] | self._red[v]) - {u, v}) - black
        return black, red

    def contract_inplace(self, u: int, v: int, w: int) -> None:
        if u == v:
            raise TrigraphError(f"cannot contract {u} with itself")
        if u not in self._black or v not in self._black:
            raise TrigraphError(f"unknown vertex in contraction {u},{v}")
        if w in self._black:
            raise TrigraphError(f"result id {w} is already live")
        black, red = self.merged_neighborhood(u, v)
        for x in (u, v):
            for z in self._black.pop(x):
                self._black[z].discard(x)
            for z in self._red.pop(x):
                self._red[z].discard(x)
        self._black[w] = black
        self._red[w] = red
        for z in black:
            self._black[z].add(w)
        for z in red:
            self._red[z].add(w)

    def contract(self, u: int, v: int, w: int) -> "Trigraph":
        g = self.copy()
        g.contract_inplace(u, v, w)
        return g

    def induced(self, s: Iterable[int]) -> "Trigraph":
        s = set(s)
        missing = s - self._black.keys()
        if missing:
            raise TrigraphError(f"unknown vertices {sorted(missing)[:5]}")
        g = Trigraph.__new__(Trigraph)
        g._black = {v: self._black[v] & s for v in s}
        g._red = {v: self._red[v] & s for v in s}
        return g

    def remove_vertices(self, s: Iterable[int]) -> "Trigraph":
        return self.induced(self._black.keys() - set(s))

    def relabel(self, mapping: Dict[int, int]) -> "Trigraph":
        """Rename vertices; ids missing from ``mapping`` keep their name."""
        m = lambda x: mapping.get(x, x)
        g = Trigraph.__new__(Trigraph)
        g._black = {m(v): {m(z) for z in ns} for v, ns in self._black.items()}
        g._red = {m(v): {m(z) for z in ns} for v, ns in self._red.items()}
        if len(g._black) != len(self._black):
            raise TrigraphError("relabelling is not injective")
        return g

    def components(self, red_only: bool = False) -> List[Set[int]]:
        seen: Set[int] = set()
        out = []
        for start in sorted(self._black):
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            while stack:
                x = stack.pop()
                nbrs = self._red[x] if red_only else self._red[x] | self._black[x]
                for z in nbrs:
                    if z not in comp:
                        comp.add(z)
                        stack.append(z)
            seen |= comp
            out.append(comp)
        return out

    def red_components(self) -> List[Set[int]]:
        return self.components(red_only=True)

    def check_invariants(self) -> None:
        for v in self._black:
            if v in self._black[v] or v in self._red[v]:
                raise TrigraphError(f"self-loop on {v}")
            if self._black[v] & self._red[v]:
                raise TrigraphError(f"vertex {v} has an edge both black and red")
            for adj in (self._black, self._red):
                for z in adj[v]:
                    if z not in adj or v not in adj[z]:
                        raise TrigraphError(f"asymmetric or dangling edge {v}-{z}")


def contract(g: Trigraph, u: int, v: int, w: int) -> Trigraph:
    return g.contract(u, v, w)


def red_degree(g: Trigraph, v: int) -> int:
    return g.red_degree(v)


def induced_subtrigraph(g: Trigraph, s: Iterable[int]) -> Trigraph:
    return g.induced(s)


def red_components(g: Trigraph) -> List[Set[int]]:
    return g.red_components()


def from_edges(n: int, black: Iterable[Edge] = (), red: Iterable[Edge] = ()) -> Trigraph:
    """Trigraph on vertices 1..n."""
    return Trigraph(range(1, n + 1), black, red)
