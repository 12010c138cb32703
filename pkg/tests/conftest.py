import itertools
import json
import random
from functools import lru_cache
from pathlib import Path

import pytest

from twinwidth import Trigraph
from twinwidth.formats import parse_trigraph, read_text

DATA = Path(__file__).parent / "data"


def fig1():
    return parse_trigraph(read_text(DATA / "fig1.tgf"))


def fig1_pairs():
    lines = [l.split() for l in read_text(DATA / "fig1.seq").splitlines()]
    return [(int(a), int(b)) for a, b in (l for l in lines if len(l) == 2)]


def fig1_panels():
    return json.loads(read_text(DATA / "fig1_panels.json"))


def random_graph(rng, n, p=0.5, red_p=0.0):
    g = Trigraph(range(1, n + 1))
    for u, v in itertools.combinations(range(1, n + 1), 2):
        if rng.random() < p:
            g.add_edge(u, v, red=rng.random() < red_p)
    return g


def random_tree(rng, n, red=False, max_degree=None):
    g = Trigraph(range(1, n + 1))
    for v in range(2, n + 1):
        while True:
            u = rng.randrange(1, v)
            if max_degree is None or len(g.neighbors(u)) < max_degree:
                break
        g.add_edge(u, v, red=red)
    return g


def random_sequence(rng, g, length=None):
    alive = sorted(g.vertices)
    nxt = g.max_id() + 1
    pairs = []
    steps = len(alive) - 1 if length is None else length
    for _ in range(steps):
        u, v = rng.sample(alive, 2)
        alive.remove(u)
        alive.remove(v)
        alive.append(nxt)
        nxt += 1
        pairs.append((u, v))
    return pairs


# -- independent oracle ------------------------------------------------------
# Works on partitions of the original vertex set only, never on contracted
# trigraphs: red edges come straight from the homogeneity definition.

def _quotient_red_degrees(adj, red, parts):
    degs = []
    for i, p in enumerate(parts):
        k = 0
        for j, q in enumerate(parts):
            if i == j:
                continue
            links = [(x, y) for x in p for y in q if y in adj[x]]
            if not links:
                continue
            if len(links) < len(p) * len(q) or any(frozenset(e) in red for e in links):
                k += 1
        degs.append(k)
    return degs


def naive_twin_width(g):
    """Minimum over all contraction orders of the largest red degree seen."""
    verts = sorted(g.vertices)
    if len(verts) <= 1:
        return 0
    adj = {v: g.neighbors(v) for v in verts}
    red = {frozenset(e) for e in g.red_edges()}

    @lru_cache(maxsize=None)
    def best(parts):
        here = max(_quotient_red_degrees(adj, red, parts))
        if len(parts) == 1:
            return here
        sub = min(
            best(tuple(sorted([p for k, p in enumerate(parts) if k not in (i, j)]
                              + [tuple(sorted(parts[i] + parts[j]))])))
            for i, j in itertools.combinations(range(len(parts)), 2))
        return max(here, sub)

    return best(tuple((v,) for v in verts))


def naive_quotient(g, parts):
    """(black pairs, red pairs) over part indices, from the definition."""
    adj = {v: g.neighbors(v) for v in g.vertices}
    red = {frozenset(e) for e in g.red_edges()}
    black_out, red_out = set(), set()
    for (i, p), (j, q) in itertools.combinations(enumerate(parts), 2):
        links = [(x, y) for x in p for y in q if y in adj[x]]
        if not links:
            continue
        if len(links) == len(p) * len(q) and not any(frozenset(e) in red for e in links):
            black_out.add((i, j))
        else:
            red_out.add((i, j))
    return black_out, red_out


@pytest.fixture
def rng():
    return random.Random(12345)
