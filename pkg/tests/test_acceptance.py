"""One test per acceptance criterion; each prints a PASS/FAIL line."""
import itertools
import random
import time

import networkx as nx
import pytest

from conftest import (fig1, fig1_pairs, fig1_panels, naive_quotient, naive_twin_width,
                      random_graph, random_sequence, random_tree)
from twinwidth import (ContractionSequence, Trigraph, partition_view, restrict,
                       trigraph_of_partition, verify, width)
from twinwidth import gadgets as gd
from twinwidth.encoder import decontraction_sequence, encode_component, sound_t
from twinwidth.reduction import (CnfInstance, WitnessRefused, all_satisfying, build_instance,
                                 predicted_census, random_compliant_cnf, residual_red_graph,
                                 synthesize_witness, truth_table_solve, witness_phases)
from twinwidth.sequence import Contractor
from twinwidth.solver import EXACT, SolverBudget, decide_at_most, tree_sequence, twin_width_exact
from twinwidth.subdivision import length_bound, subdivide, subdivision_sequence


@pytest.fixture
def announce(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, f"criterion {number}: {detail}"
    return emit


def _edges(pairs):
    return {tuple(sorted(p)) for p in pairs}


def test_criterion_1_reference_replay(announce):
    g = fig1()
    seq = ContractionSequence(g, fig1_pairs())
    t0 = time.perf_counter()
    rep = verify(seq, 2)
    panels = [t.copy() for t in seq.trigraphs()][1:]
    elapsed = time.perf_counter() - t0
    ok = rep.accepted and rep.width == 2
    for got, want in zip(panels, fig1_panels()):
        ok &= _edges(got.black_edges()) == _edges(want["black"])
        ok &= _edges(got.red_edges()) == _edges(want["red"])
    ok &= len(panels) == 6
    announce(1, ok and elapsed < 0.001, f"width {rep.width}, 6 panels match, {elapsed * 1e3:.2f} ms")


def test_criterion_2_tree_sequences(announce):
    rng = random.Random(2)
    t0 = time.perf_counter()
    worst_black = 0
    for _ in range(500):
        t = random_tree(rng, rng.randint(1, 200))
        worst_black = max(worst_black, width(tree_sequence(t)))
    excess = 0
    for _ in range(100):
        d = rng.choice([3, 4])
        t = random_tree(rng, rng.randint(2, 200), red=True, max_degree=d)
        excess = max(excess, width(tree_sequence(t)) - d)
    elapsed = time.perf_counter() - t0
    ok = worst_black <= 2 and excess <= 0 and elapsed < 1.0
    announce(2, ok, f"black max {worst_black}, red excess {excess}, {elapsed:.2f} s")


def _random_base(rng, n, red):
    g = Trigraph(range(1, n + 1))
    for u, v in itertools.combinations(range(1, n + 1), 2):
        if rng.random() < 3.0 / n and len(g.neighbors(u)) < 4 and len(g.neighbors(v)) < 4:
            g.add_edge(u, v, red=red)
    return g


def test_criterion_3_subdivisions(announce):
    rng = random.Random(3)
    t0 = time.perf_counter()
    worst = 0
    for k in range(50):
        n = rng.randint(2, 64)
        red = k % 2 == 1
        h = _random_base(rng, n, red)
        lb = length_bound(n)
        lengths = {e: lb + rng.randint(0, 3) for e in sorted(h.black_edges() | h.red_edges())}
        inst = subdivide(h, lengths, red="all" if red else None)
        seq = subdivision_sequence(inst, limit=4)
        rep = verify(seq, 4)
        assert not rep.malformed
        worst = max(worst, rep.width)
    elapsed = time.perf_counter() - t0
    announce(3, worst <= 4 and elapsed < 10, f"max width {worst} over 50 graphs, {elapsed:.2f} s")


def test_criterion_4_encoding(announce):
    t0 = time.perf_counter()
    h = Trigraph(range(1, 6))
    h.add_edge(1, 2, red=True)
    h.add_edge(1, 3)
    h.add_edge(2, 3)
    h.add_edge(3, 4)
    h.add_edge(4, 5, red=True)
    h.add_edge(2, 4)
    # S = {1, 2}; 4-5 is a second red component and stays untouched
    g, T, plan = encode_component(h, [1, 2], 1)
    ok = plan.t == 17 == sound_t(1, 2) and len(T) == 68
    ok &= all(not g.red_neighbors(x) for x in T)
    ok &= g.induced(set(g.vertices) - T) == h.induced(set(h.vertices) - {1, 2})
    seq, back = decontraction_sequence(g, plan)
    rep = verify(seq, 2)
    end = seq.replay()
    mapping = {v: back.get(v, v) for v in end.vertices}
    ok &= rep.accepted and end.relabel(mapping) == h
    elapsed = time.perf_counter() - t0
    announce(4, ok and elapsed < 1, f"|T|={len(T)}, t={plan.t}, decontraction width {rep.width}, "
                                    f"{elapsed:.2f} s")


def _fence_contexts():
    b = gd.InstanceBuilder()
    s = b.vertex("s")
    for _ in range(3):
        b.g.add_edge(s, b.vertex(), red=True)
    b.attach_fence([s], "fence")
    yield b
    b = gd.InstanceBuilder()
    p, v, w = (b.vertical_set(x) for x in "pvw")
    b.add_arc(p, v)
    b.add_arc(v, w)
    yield b
    b = gd.InstanceBuilder()
    b.or_gadget(b.vertical_set("i1"), b.vertical_set("i2"), b.vertical_set("o"), "or")
    yield b
    b = gd.InstanceBuilder()
    sets = [b.vertical_set(f"v{k}") for k in range(4)]
    b.variable_gadget("var", tuple(sets[:2]), tuple(sets[2:]))
    yield b
    b = gd.InstanceBuilder()
    ins = [b.vertical_set(f"in{k}") for k in range(3)]
    b.clause_gadget(ins, b.vertical_set("out"), 4, "clause")
    yield b


def test_criterion_5_fence_first_steps(announce):
    t0 = time.perf_counter()
    failures = 0
    fences = 0
    kinds = set()
    for b in _fence_contexts():
        for f in b.fences.values():
            r = gd.exhaustive_first_step_check(b.g, f)
            failures += len(r.failures)
            kinds |= {k for k, c in r.checked.items() if c}
            fences += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and kinds == {"AxA/BxB", "AxB", "XxS", "YxS", "XxY"} and elapsed < 1
    announce(5, ok, f"{fences} fences in 5 contexts, {failures} failures, {elapsed:.2f} s")


def test_criterion_6_contraction_routines(announce):
    t0 = time.perf_counter()
    results = {}

    b = gd.InstanceBuilder()
    s = b.vertex("s")
    others = [b.vertex() for _ in range(3)]
    for o in others:
        b.g.add_edge(s, o, red=True)
    f = b.attach_fence([s], "fence")
    c = Contractor(b.g, limit=4)
    p = gd.contract_fence(c, f, s)
    results["fence"] = (verify(c.sequence(partial=True), 4).accepted
                        and set(c.g.vertices) == {s, p, *others} and c.g.red_neighbors(p) == {s})

    for side in (1, 2):
        b = gd.InstanceBuilder()
        i1, i2, o = b.vertical_set("i1"), b.vertical_set("i2"), b.vertical_set("o")
        h = b.or_gadget(i1, i2, o, "or")
        c = Contractor(b.g, limit=4)
        near, far = (i1, i2) if side == 1 else (i2, i1)
        z = gd.prime(c, near)
        e = gd.contract_or(c, h, side)
        results[f"or{side}"] = (verify(c.sequence(partial=True), 4).accepted
                                and all(c.find(v) == e for v in h.vertices)
                                and c.g.red_neighbors(e) == {z, far.x, far.y})

    for pol in ("top", "bot"):
        b = gd.InstanceBuilder()
        sets = [b.vertical_set(f"v{k}") for k in range(4)]
        var = b.variable_gadget("var", tuple(sets[:2]), tuple(sets[2:]))
        c = Contractor(b.g, limit=4)
        u = gd.contract_variable_half(c, var, pol)
        results[f"half-{pol}"] = (verify(c.sequence(partial=True), 4).accepted
                                  and all(c.find(v) == u for v in var.halves[pol].vertices)
                                  and c.g.red_neighbors(u) == {c.find(var.x)})
        z1, z2 = gd.prime(c, sets[0]), gd.prime(c, sets[1])
        r = gd.contract_variable_rest(c, var, pol)
        gadget = [var.x, var.top, var.bot] + var.fence.vertices \
            + var.halves["top"].vertices + var.halves["bot"].vertices
        results[f"rest-{pol}"] = (verify(c.sequence(partial=True), 4).accepted
                                  and all(c.find(v) == r for v in gadget)
                                  and c.g.red_neighbors(r) == {z1, z2, sets[2].x, sets[3].x})
    elapsed = time.perf_counter() - t0
    bad = [k for k, v in results.items() if not v]
    announce(6, not bad and elapsed < 1, f"{len(results)} routines, failing {bad}, {elapsed:.2f} s")


def _criterion7_instances():
    hand = [
        CnfInstance(3, [[1, 2, 3], [-1, -2, -3]]),
        CnfInstance(3, [[1, 2], [-1, -2], [1, -3], [-1, 3, 2], [3, -2]]),
        CnfInstance(6, [[-1, 3, 4], [1, 2, -5], [1, -3, 4], [-2, -3, -6], [-1, 3, 6],
                        [2, -4, 5], [-2, -5, 6], [-4, 5, -6]]),
    ]
    rng = random.Random(7)
    out = [c for c in hand if truth_table_solve(c)]
    while len(out) < 24:
        cnf = random_compliant_cnf(rng, rng.randint(3, 6), rng.randint(1, 8))
        if cnf is not None and truth_table_solve(cnf) is not None:
            out.append(cnf)
    return out


def test_criterion_7_end_to_end(announce):
    t0 = time.perf_counter()
    rng = random.Random(70)
    passed = refused = 0
    for cnf in _criterion7_instances():
        assert cnf.is_compliant() and 3 <= cnf.n_vars <= 6 and 1 <= cnf.m <= 8
        out = build_instance(cnf)
        sats = all_satisfying(cnf)
        seq = synthesize_witness(out, rng.choice(sats))
        rep = verify(seq, 4)
        passed += rep.accepted and len(seq) == len(out.g) - 1
        falsifying = [a for a in (dict(enumerate(bits, 1)) for bits in
                      itertools.product([False, True], repeat=cnf.n_vars)) if not cnf.satisfied_by(a)]
        if falsifying:
            try:
                synthesize_witness(out, rng.choice(falsifying))
            except WitnessRefused:
                refused += 1
        else:
            refused += 1
    n = len(_criterion7_instances())
    elapsed = time.perf_counter() - t0
    ok = passed == n and refused == n and elapsed < 60
    announce("7 (end-to-end)", ok, f"{passed}/{n} witnesses verify at width <= 4, "
                                   f"{refused}/{n} falsifying assignments refused, {elapsed:.1f} s")


def test_criterion_7_residual_histogram(announce):
    """The stated census {deg 4: n, deg 3: 4n+3m} is checked exactly as written."""
    mismatches = []
    for cnf in _criterion7_instances():
        out = build_instance(cnf)
        a = truth_table_solve(cnf)
        prefix, _ = witness_phases(out, a, finale=False)
        res = residual_red_graph(out, prefix)
        n, m = cnf.n_vars, cnf.m
        want = {4: n, 3: 4 * n + 3 * m, 2: len(res.g) - n - (4 * n + 3 * m)}
        got = {k: res.histogram.get(k, 0) for k in (2, 3, 4)}
        if got != want or set(res.histogram) - {2, 3, 4}:
            mismatches.append((n, m, got[3], want[3]))
    announce("7 (histogram)", not mismatches,
             f"{len(mismatches)} instances differ (n, m, deg3 seen, deg3 stated): {mismatches[:4]}")


def test_criterion_8_oracle_agreement(announce):
    t0 = time.perf_counter()
    graphs = []
    for nxg in nx.graph_atlas_g():
        if 1 <= nxg.number_of_nodes() <= 6:
            g = Trigraph(range(1, nxg.number_of_nodes() + 1))
            for u, v in nxg.edges():
                g.add_edge(u + 1, v + 1)
            graphs.append(g)
    rng = random.Random(8)
    graphs += [random_graph(rng, 7, rng.choice([0.3, 0.5, 0.7])) for _ in range(200)]
    disagree = 0
    budget = SolverBudget(max_nodes=10 ** 7, max_seconds=300)
    for g in graphs:
        truth = naive_twin_width(g)
        res = twin_width_exact(g, budget)
        ok = res.status == EXACT and res.value == truth
        ok &= decide_at_most(g, truth, budget).answer == "yes"
        if truth > 0:
            ok &= decide_at_most(g, truth - 1, budget).answer == "no"
        disagree += not ok
    elapsed = time.perf_counter() - t0
    announce(8, disagree == 0 and elapsed < 300,
             f"{len(graphs)} graphs, {disagree} disagreements, {elapsed:.1f} s")


def test_criterion_9_semantics_cross_check(announce):
    rng = random.Random(9)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(1000):
        n = rng.randint(1, 12)
        g = random_graph(rng, n, rng.random(), red_p=rng.choice([0.0, 0.2]))
        seq = ContractionSequence(g, random_sequence(rng, g))
        for i, replayed in enumerate(seq.trigraphs()):
            view = partition_view(seq, i)
            if replayed != trigraph_of_partition(g, view):
                bad += 1
                break
            ids = sorted(view.parts)
            black, red = naive_quotient(g, [sorted(view.parts[v]) for v in ids])
            if _edges(replayed.black_edges()) != {(ids[a], ids[b]) for a, b in black} \
                    or _edges(replayed.red_edges()) != {(ids[a], ids[b]) for a, b in red}:
                bad += 1
                break
    elapsed = time.perf_counter() - t0
    announce(9, bad == 0 and elapsed < 10, f"1000 pairs, {bad} mismatches, {elapsed:.2f} s")


def test_criterion_10_monotonicity(announce):
    rng = random.Random(10)
    restrict_bad = 0
    for _ in range(500):
        n = rng.randint(2, 12)
        g = random_graph(rng, n, rng.random(), red_p=rng.choice([0.0, 0.3]))
        seq = ContractionSequence(g, random_sequence(rng, g))
        s = rng.sample(sorted(g.vertices), rng.randint(1, n))
        restrict_bad += width(restrict(seq, s)) > width(seq)
    redden_bad = 0
    for _ in range(200):
        n = rng.randint(2, 6)
        g = random_graph(rng, n, rng.random())
        h = g.copy()
        for u, v in sorted(g.black_edges()):
            if rng.random() < 0.4:
                h.remove_edge(u, v)
                h.add_edge(u, v, red=True)
        redden_bad += twin_width_exact(h).value < twin_width_exact(g).value
    announce(10, restrict_bad == 0 and redden_bad == 0,
             f"restriction violations {restrict_bad}/500, reddening violations {redden_bad}/200")
