"""From occurrence-limited 3-SAT to trigraphs of twin-width at most 4.

``build_instance`` wires variable gadgets, literal wires, clause gadgets,
the clause chain, the global output and the feedback chains.
``synthesize_witness`` turns a satisfying assignment into a 4-sequence.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from . import gadgets as gd
from .gadgets import InstanceBuilder, OrHandle, VariableHandle, VerticalSet
from .sequence import ContractionSequence, Contractor
from .subdivision import apply_sequence, ceil_log2, desubdivide, length_bound, red_subdivision_sequence
from .trigraph import Trigraph


class ReductionError(ValueError):
    pass


class WitnessRefused(ReductionError):
    def __init__(self, gadget: str, message: str):
        super().__init__(f"{gadget}: {message}")
        self.gadget = gadget


# -- CNF ---------------------------------------------------------------------

@dataclass
class CnfInstance:
    n_vars: int
    clauses: List[List[int]]

    def __post_init__(self):
        self.clauses = [list(c) for c in self.clauses]
        for c in self.clauses:
            if not c:
                raise ReductionError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ReductionError(f"literal {lit} outside 1..{self.n_vars}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def occurrences(self) -> Counter:
        return Counter(lit for c in self.clauses for lit in c)

    def satisfied_by(self, assignment: Mapping[int, bool]) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses)

    def first_falsified(self, assignment: Mapping[int, bool]) -> Optional[int]:
        for j, c in enumerate(self.clauses):
            if not any(assignment[abs(l)] == (l > 0) for l in c):
                return j
        return None

    def compliance_errors(self) -> List[str]:
        errs = []
        if not self.clauses:
            errs.append("no clauses")
        for j, c in enumerate(self.clauses):
            if not 2 <= len(c) <= 3:
                errs.append(f"clause {j + 1} has {len(c)} literals")
            if len({abs(l) for l in c}) != len(c):
                errs.append(f"clause {j + 1} repeats a variable")
        occ = self.occurrences()
        for v in range(1, self.n_vars + 1):
            for lit in (v, -v):
                if occ[lit] > 2:
                    errs.append(f"literal {lit} occurs {occ[lit]} times")
        return errs

    def is_compliant(self) -> bool:
        return not self.compliance_errors()


UNSAT_CORE = CnfInstance(2, [[1, 2], [1, -2], [-1, 2], [-1, -2]])
TRIVIAL_SAT = CnfInstance(2, [[1, 2], [-1, -2]])


def truth_table_solve(cnf: CnfInstance, limit: int = 20) -> Optional[Dict[int, bool]]:
    """First satisfying assignment in binary counting order, or None."""
    n = cnf.n_vars
    if n > limit:
        raise ReductionError(f"truth table limited to {limit} variables, got {n}")
    masks = []
    for c in cnf.clauses:
        pos = neg = 0
        for l in c:
            if l > 0:
                pos |= 1 << (l - 1)
            else:
                neg |= 1 << (-l - 1)
        masks.append((pos, neg))
    full = (1 << n) - 1
    for a in range(1 << n):
        na = full ^ a
        if all((a & p) or (na & q) for p, q in masks):
            return {v: bool(a >> (v - 1) & 1) for v in range(1, n + 1)}
    return None


def all_satisfying(cnf: CnfInstance) -> List[Dict[int, bool]]:
    out = []
    for bits in itertools.product([False, True], repeat=cnf.n_vars):
        a = dict(enumerate(bits, 1))
        if cnf.satisfied_by(a):
            out.append(a)
    return out


# -- preprocessing -----------------------------------------------------------

def _simplify(clauses: List[List[int]]):
    """Unit propagation and pure literals; returns (clauses, forced) or None if UNSAT."""
    forced: Dict[int, bool] = {}
    clauses = [list(c) for c in clauses]
    while True:
        if any(not c for c in clauses):
            return None
        unit = next((c[0] for c in clauses if len(c) == 1), None)
        if unit is None:
            occ = Counter(l for c in clauses for l in c)
            pure = next((l for l in sorted(occ, key=abs) if -l not in occ), None)
            if pure is None:
                return clauses, forced
            unit = pure
        forced[abs(unit)] = unit > 0
        clauses = [[l for l in c if l != -unit] for c in clauses if unit not in c]


def preprocess_occurrences(cnf: CnfInstance) -> CnfInstance:
    """Equisatisfiable instance where every literal occurs once or twice,
    clauses have two or three literals on distinct variables, and variables
    are numbered 1..n.  Unsatisfiable inputs detected on the way map to a
    fixed four-clause instance; fully simplified ones give zero clauses."""
    for c in cnf.clauses:
        if len(c) > 3:
            raise ReductionError(f"clause {c} wider than 3")
    clauses = []
    for c in cnf.clauses:
        lits = list(dict.fromkeys(c))
        if any(-l in lits for l in lits):
            continue
        clauses.append(lits)
    res = _simplify(clauses)
    if res is None:
        return CnfInstance(UNSAT_CORE.n_vars, UNSAT_CORE.clauses)
    clauses, _ = res
    occ = Counter(l for c in clauses for l in c)
    used = sorted({abs(l) for c in clauses for l in c})
    fresh = max(used, default=0) + 1
    extra: List[List[int]] = []
    for v in used:
        if occ[v] <= 2 and occ[-v] <= 2:
            continue
        copies = []
        for c in clauses:
            for k, l in enumerate(c):
                if abs(l) == v:
                    copies.append(fresh)
                    c[k] = fresh if l > 0 else -fresh
                    fresh += 1
        # a cycle of implications forces all copies equal
        for a, b in zip(copies, copies[1:] + copies[:1]):
            extra.append([-a, b])
    clauses += extra
    names = {v: i for i, v in enumerate(sorted({abs(l) for c in clauses for l in c}), 1)}
    clauses = [[names[abs(l)] * (1 if l > 0 else -1) for l in c] for c in clauses]
    return CnfInstance(len(names), clauses)


# -- construction ------------------------------------------------------------

def nominal_chain_length(n: int, m: int) -> int:
    return 2 * ceil_log2(5 * n + 3 * m)


def predicted_census(cnf: CnfInstance) -> Dict[str, int]:
    """Branch-vertex counts of the residual red graph for this layout."""
    occ = cnf.occurrences()
    n, m = cnf.n_vars, cnf.m
    branching = sum(1 for lit, k in occ.items() if k == 2)
    # a literal without occurrences keeps a wire that ends in a pendant
    pendants = sum(1 for v in range(1, n + 1) for lit in (v, -v) if not occ[lit])
    ors = sum(2 if len(c) == 3 else 1 for c in cnf.clauses)
    deg3 = branching + ors + (m - 1) + n + (n - 1)
    return {"deg4": n, "deg3": deg3, "deg1": pendants, "branch": n + deg3 + pendants}


def choose_chain_length(cnf: CnfInstance) -> Tuple[int, int]:
    """(L, L_nominal); L is raised by one when the subdivision bound needs it."""
    lp = nominal_chain_length(cnf.n_vars, cnf.m)
    need = length_bound(predicted_census(cnf)["branch"]) + 2
    return max(lp, need, 2), lp


@dataclass
class Wire:
    root: VerticalSet
    sets: List[VerticalSet]        # topological order, root first
    leaves: List[VerticalSet]


@dataclass
class ReductionOutput:
    cnf: CnfInstance
    g: Trigraph
    manifest: Dict[str, int]
    digraph: gd.PropagationDigraph
    L: int
    L_nominal: int
    variables: List[VariableHandle]
    clauses: List[gd.ClauseHandle]
    wires: Dict[int, Wire]
    clause_chain: List[VerticalSet]
    output: VerticalSet
    feedback: List[VerticalSet]
    stats: Dict[str, int] = field(default_factory=dict)

    @property
    def ors(self) -> List[OrHandle]:
        return [h for cl in self.clauses for h in cl.ors]

    def manifest_document(self) -> dict:
        return {
            "format": "tww-manifest/1",
            "cnf": {"n": self.cnf.n_vars, "clauses": self.cnf.clauses},
            "L": self.L,
            "L_nominal": self.L_nominal,
            "feedback": "V1r[i] -> V2r[i] -> V1r[i+1]; Vo -> V1r[1]; Vkr[i] -> var[i].guard{k}",
            "stats": self.stats,
            "roles": self.manifest,
        }


def build_instance(cnf: CnfInstance, L: Optional[int] = None) -> ReductionOutput:
    errs = cnf.compliance_errors()
    if errs:
        raise ReductionError("non-compliant instance: " + "; ".join(errs))
    auto_L, lp = choose_chain_length(cnf)
    L = auto_L if L is None else L
    if L < 2:
        raise ReductionError("L must be at least 2")
    b = InstanceBuilder()
    n, m = cnf.n_vars, cnf.m

    variables = []
    for i in range(1, n + 1):
        g1 = b.vertical_set(f"var[{i}].guard1")
        g2 = b.vertical_set(f"var[{i}].guard2")
        o3 = b.vertical_set(f"var[{i}].out_pos")
        o4 = b.vertical_set(f"var[{i}].out_neg")
        variables.append(b.variable_gadget(f"var[{i}]", (g1, g2), (o3, o4)))

    occ = cnf.occurrences()
    wires: Dict[int, Wire] = {}
    for i, var in enumerate(variables, 1):
        for lit, root in ((i, var.outputs[0]), (-i, var.outputs[1])):
            tag = f"lit[{lit:+d}]"
            branch = b.vertical_set(f"{tag}.branch")
            sets = b.long_chain(root, branch, L, f"{tag}.stem")
            leaves = []
            for k in range(1, occ[lit] + 1):
                leaf = b.vertical_set(f"{tag}.leaf[{k}]")
                sets += b.long_chain(branch, leaf, L, f"{tag}.arm{k}")[1:]
                leaves.append(leaf)
            wires[lit] = Wire(root, sets, leaves)

    used = Counter()
    clauses = []
    for j, c in enumerate(cnf.clauses, 1):
        inputs = []
        for lit in c:
            inputs.append(wires[lit].leaves[used[lit]])
            used[lit] += 1
        out = b.vertical_set(f"clause[{j}].out")
        clauses.append(b.clause_gadget(inputs, out, L, f"clause[{j}]"))

    vc = [b.vertical_set(f"vc[{j}]") for j in range(1, m + 1)]
    for j, cl in enumerate(clauses):
        b.long_chain(cl.out, vc[j], L, f"clause[{j + 1}].outchain")
    for j in range(m - 1, 0, -1):
        b.long_chain(vc[j], vc[j - 1], L, f"vc[{j + 1}].chain")
    vo = b.vertical_set("vo")
    b.add_arc(vc[0], vo)

    feedback = []
    prev = vo
    for i, var in enumerate(variables, 1):
        r1 = b.vertical_set(f"vr1[{i}]")
        r2 = b.vertical_set(f"vr2[{i}]")
        b.long_chain(prev, r1, L, f"vr1[{i}].in")
        b.long_chain(r1, r2, L, f"vr1[{i}].chain")
        b.long_chain(r1, var.guards[0], L, f"vr1[{i}].guard")
        b.long_chain(r2, var.guards[1], L, f"vr2[{i}].guard")
        feedback += [r1, r2]
        prev = r2

    out = ReductionOutput(cnf, b.g, b.manifest, b.digraph, L, lp, variables, clauses,
                          wires, vc, vo, feedback)
    out.stats = {"vertices": len(b.g), "black_edges": b.g.n_black_edges(),
                 "red_edges": b.g.n_red_edges(), "fences": len(b.fences),
                 "vertical_sets": len(b.digraph.nodes), "or_gadgets": len(out.ors)}
    return out


def check_output(out: ReductionOutput) -> None:
    """Structural invariants of a constructed instance."""
    if not gd.red_graph_is_fence_paths(out.g):
        raise ReductionError("red graph is not a union of fence paths")
    out.digraph.topological()
    for name in out.digraph.nodes:
        if len(out.digraph.children[name]) > 2 or len(out.digraph.parents[name]) > 2 \
                or out.digraph.degree(name) > 3:
            raise ReductionError(f"degree cap violated at {name}")


def check_all_fences(out: ReductionOutput, builder_fences: Optional[Dict[str, gd.FenceHandle]] = None):
    fences = builder_fences if builder_fences is not None else fences_of(out)
    for role, f in fences.items():
        gd.check_attachment_rule(out.g, f)


def fences_of(out: ReductionOutput) -> Dict[str, gd.FenceHandle]:
    fences = {}
    for name, v in out.digraph.nodes.items():
        fences[f"{name}.fence"] = v.fence
    for h in out.ors:
        fences[f"{h.name}.ab.fence"] = h.vab.fence
        fences[f"{h.name}.cd.fence"] = h.vcd.fence
        fences[f"{h.name}.outer"] = h.outer
    for var in out.variables:
        fences[f"{var.name}.fence"] = var.fence
        for pol, half in var.halves.items():
            core = half.core
            fences[f"{core.name}.ab.fence"] = core.vab.fence
            fences[f"{core.name}.cd.fence"] = core.vcd.fence
            fences[f"{core.name}.outer"] = core.outer
            fences[f"{var.name}.{pol}.inner_fence"] = half.inner_fence
            fences[f"{var.name}.{pol}.fence"] = half.fence
    return fences


# -- witness -----------------------------------------------------------------

PHASES = ("halves", "true_wires", "clauses", "output_component", "variables",
          "false_wires", "subdivision")


class _Synth:
    def __init__(self, out: ReductionOutput, assignment: Mapping[int, bool]):
        self.out = out
        self.a = assignment
        self.c = Contractor(out.g, limit=4)
        self.state: Dict[str, str] = {name: "open" for name in out.digraph.nodes}
        self.or_done: Set[str] = set()
        self.marks: Dict[str, int] = {}
        self.input_of: Dict[str, Tuple[OrHandle, int]] = {}
        self.out_of: Dict[str, OrHandle] = {}
        self.root_of: Dict[str, Tuple[VariableHandle, str]] = {}
        for h in out.ors:
            for k, v in enumerate(h.inputs, 1):
                self.input_of[v.name] = (h, k)
            self.out_of[h.out.name] = h
        for var in out.variables:
            self.root_of[var.outputs[0].name] = (var, "top")
            self.root_of[var.outputs[1].name] = (var, "bot")

    def pol(self, i: int) -> str:
        return "top" if self.a[i] else "bot"

    def V(self, name: str) -> VerticalSet:
        return self.out.digraph.nodes[name]

    def ready(self, v: VerticalSet) -> bool:
        if any(self.state[p] != "done" for p in self.out.digraph.parents[v.name]):
            return False
        if v.name in self.out_of:
            return self.out_of[v.name].name in self.or_done
        if v.name in self.root_of:
            var, pol = self.root_of[v.name]
            return gd.is_collapsed(self.c, var.halves[pol].vertices)
        return True

    def prime(self, v: VerticalSet) -> None:
        if not self.ready(v):
            raise WitnessRefused(v.name, "guards are not contracted")
        gd.prime(self.c, v)
        self.state[v.name] = "primed"

    def collapse(self, v: VerticalSet) -> None:
        if self.state[v.name] == "open":
            self.prime(v)
        gd.finish_vertical_set(self.c, v)
        self.state[v.name] = "done"

    def touch(self, v: VerticalSet) -> bool:
        """Advance v once if possible: leaves waiting on an OR only get primed."""
        if self.state[v.name] == "done" or not self.ready(v):
            return False
        if v.name in self.input_of and self.input_of[v.name][0].name not in self.or_done:
            if self.state[v.name] == "primed":
                return False
            self.prime(v)
            return True
        self.collapse(v)
        return True

    def do_or(self, h: OrHandle) -> bool:
        if h.name in self.or_done:
            return False
        primed = [self.state[v.name] != "open" for v in h.inputs]
        if not any(primed):
            return False
        gd.contract_or(self.c, h, 1 if primed[0] else 2)
        self.or_done.add(h.name)
        for v in h.inputs:
            if self.state[v.name] == "primed":
                self.collapse(v)
        self.collapse(h.out)
        return True

    def mark(self, phase: str) -> None:
        self.marks[phase] = len(self.c.pairs)

    def run(self, finale: bool = True) -> ContractionSequence:
        out = self.out
        for i, var in enumerate(out.variables, 1):
            gd.contract_variable_half(self.c, var, self.pol(i))
        self.mark("halves")

        for i in range(1, out.cnf.n_vars + 1):
            lit = i if self.a[i] else -i
            for v in out.wires[lit].sets:
                self.touch(v)
        self.mark("true_wires")

        changed = True
        while changed:
            changed = False
            for cl in out.clauses:
                for h in cl.ors:
                    changed |= self.do_or(h)
                if len(cl.ors) == 2 and cl.ors[0].name in self.or_done \
                        and cl.ors[1].name not in self.or_done:
                    for v in cl.chain[1:]:
                        changed |= self.touch(v)
        for j, cl in enumerate(out.clauses, 1):
            if self.state[cl.out.name] != "done":
                raise WitnessRefused(f"clause[{j}]", "no input of the clause gadget could be primed")
        self.mark("clauses")

        comp = out.digraph.reachable(cl.out.name for cl in out.clauses)
        for name in out.digraph.topological(comp):
            if self.state[name] != "done":
                self.collapse(self.V(name))
        self.mark("output_component")

        for i, var in enumerate(out.variables, 1):
            gd.contract_variable_rest(self.c, var, self.pol(i))
        self.mark("variables")

        changed = True
        while changed:
            changed = False
            for i in range(1, out.cnf.n_vars + 1):
                lit = -i if self.a[i] else i
                for v in out.wires[lit].sets:
                    changed |= self.touch(v)
            for cl in out.clauses:
                for h in cl.ors:
                    changed |= self.do_or(h)
                for v in cl.chain[1:]:
                    changed |= self.touch(v)
        left = [k for k, s in self.state.items() if s != "done"]
        if left or len(self.or_done) != len(out.ors):
            raise ReductionError(f"witness stalled with open vertical sets {left[:5]}")
        self.mark("false_wires")

        if finale:
            finish_residual(self.c)
        self.mark("subdivision")
        return self.c.sequence()


def finish_residual(c: Contractor) -> None:
    if c.g.n_black_edges():
        raise ReductionError("residual still has black edges")
    if len(c.g) > 1:
        apply_sequence(c, red_subdivision_sequence(c.g.copy(), limit=4))


def _check_assignment(out: ReductionOutput, assignment: Mapping[int, bool]) -> Dict[int, bool]:
    a = {int(k): bool(v) for k, v in assignment.items()}
    missing = [i for i in range(1, out.cnf.n_vars + 1) if i not in a]
    if missing:
        raise ReductionError(f"assignment misses variables {missing}")
    j = out.cnf.first_falsified(a)
    if j is not None:
        raise WitnessRefused(f"clause[{j + 1}]",
                             "every input is a false literal, so no OR gadget of the clause can be contracted")
    return a


def synthesize_witness(out: ReductionOutput, assignment: Mapping[int, bool]) -> ContractionSequence:
    return _Synth(out, _check_assignment(out, assignment)).run()


def witness_phases(out: ReductionOutput, assignment: Mapping[int, bool],
                   finale: bool = True) -> Tuple[ContractionSequence, Dict[str, int]]:
    """Like synthesize_witness, also returning the step count at each phase end."""
    s = _Synth(out, _check_assignment(out, assignment))
    seq = s.run(finale)
    return seq, dict(s.marks)


@dataclass
class Residual:
    g: Trigraph
    histogram: Dict[int, int]
    branch_vertices: int
    min_separation: int


def residual_red_graph(out: ReductionOutput, prefix: ContractionSequence) -> Residual:
    h = prefix.replay()
    if h.n_black_edges():
        raise ReductionError("prefix does not end at the all-red phase boundary")
    if h.max_red_degree() > 4:
        raise ReductionError("residual has red degree above 4")
    hist = Counter(h.red_degree(v) for v in h.vertices)
    inst, cycles = desubdivide(h)
    if cycles:
        raise ReductionError("residual has a cycle component without branch vertices")
    sep = min((len(inner) for _, inner, _ in inst.paths), default=0)
    need = length_bound(inst.n)
    if sep < need:
        raise ReductionError(f"branch vertices only {sep} apart, subdivision needs {need}")
    return Residual(h, dict(sorted(hist.items())), inst.n, sep)


def random_compliant_cnf(rng, n: int, m: int, tries: int = 200) -> Optional[CnfInstance]:
    """Random instance where each literal occurs once or twice, or None when
    no such instance with n variables and m clauses was found."""
    lo, hi = max(2 * m, 2 * n), min(3 * m, 4 * n)
    if lo > hi:
        return None
    lits = [lit for v in range(1, n + 1) for lit in (v, -v)]
    for _ in range(tries):
        total = rng.randint(lo, hi)
        slots = lits + rng.sample(lits, total - 2 * n)
        rng.shuffle(slots)
        sizes = [2] * m
        for k in rng.sample(range(m), total - 2 * m):
            sizes[k] = 3
        clauses, pos = [], 0
        for size in sizes:
            clauses.append(slots[pos:pos + size])
            pos += size
        cnf = CnfInstance(n, clauses)
        if cnf.is_compliant():
            return cnf
    return None
