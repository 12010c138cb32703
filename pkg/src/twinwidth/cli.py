"""The ``tww`` command line."""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional

from . import formats, gadgets, reduction, solver, subdivision
from .encoder import EncodingError, encode_all
from .sequence import SequenceError, sequence_from_text, verify
from .trigraph import Trigraph, TrigraphError

EX_OK, EX_VIOLATION, EX_MALFORMED = 0, 1, 2
EX_USAGE, EX_IOERR = 64, 74


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EX_USAGE)


class Report:
    """key=value lines, optionally followed by one JSON blob."""

    def __init__(self, command: str):
        self.items: Dict[str, object] = {"command": command}
        self.blob: Optional[dict] = None
        self.start = time.monotonic()

    def __setitem__(self, key, value):
        self.items[key] = value

    def digest(self, key: str, path: str) -> None:
        with open(path, "rb") as fh:
            self.items[f"input.{key}.sha256"] = hashlib.sha256(fh.read()).hexdigest()

    def render(self) -> str:
        self.items.setdefault("status", "ok")
        self.items["wall_time"] = f"{time.monotonic() - self.start:.3f}"
        lines = [f"{k}={v}" for k, v in self.items.items()]
        if self.blob is not None:
            lines.append(json.dumps(self.blob, sort_keys=True))
        return "\n".join(lines) + "\n"


def _read_graph(path: str, rep: Report, key: str = "graph") -> Trigraph:
    text = formats.read_text(path)
    rep.digest(key, path)
    return formats.parse_trigraph(text)


def _write(path: Optional[str], text: str, rep: Report, key: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        formats.write_text(path, text)
        rep[f"output.{key}"] = path


# -- subcommands -------------------------------------------------------------

def cmd_solve(args, rep: Report) -> int:
    g = _read_graph(args.graph, rep)
    budget = solver.SolverBudget(args.budget_nodes, args.budget_secs, args.d_cap)
    if args.decide is not None:
        res = solver.decide_at_most(g, args.decide, budget)
        rep["answer"] = res.answer
        rep["nodes"] = res.nodes
        rep["status"] = {"yes": "ok", "no": "violation", "unknown": "budget"}[res.answer]
        print(f"answer {res.answer}")
        if res.witness is not None and args.out:
            _write(args.out, res.witness.to_text(), rep, "witness")
        return {"yes": EX_OK, "no": EX_VIOLATION, "unknown": EX_OK}[res.answer]
    res = solver.twin_width_exact(g, budget)
    rep["value"] = res.value
    rep["solver_status"] = res.status
    rep["width"] = res.value
    rep["nodes"] = res.nodes
    if res.status == solver.BUDGET_EXHAUSTED:
        rep["status"] = "budget"
    print(f"value {res.value}\nstatus {res.status}")
    if args.out:
        _write(args.out, res.witness.to_text(), rep, "witness")
    return EX_OK


def _verify_one(graph_text: str, seq_text: str, d: Optional[int]):
    try:
        g = formats.parse_trigraph(graph_text)
    except formats.FormatError as exc:
        return EX_MALFORMED, None, f"graph: {exc}", None, []
    try:
        seq, digest = sequence_from_text(g, seq_text)
    except (formats.FormatError, SequenceError, TrigraphError) as exc:
        return EX_MALFORMED, None, str(exc), None, []
    r = verify(seq, d)
    if r.accepted and digest is not None and formats.trigraph_digest(seq.replay()) != digest:
        return EX_VIOLATION, r.width, "final trigraph digest mismatch", None, []
    return r.exit_code, r.width, r.message, r.violation_step, sorted(r.offending or [])


def cmd_verify(args, rep: Report) -> int:
    graph_text = formats.read_text(args.graph)
    rep.digest("graph", args.graph)
    seq_texts = []
    for k, path in enumerate(args.seq):
        seq_texts.append(formats.read_text(path))
        rep.digest(f"seq{k}", path)
    if args.jobs > 1 and len(seq_texts) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_verify_one, [graph_text] * len(seq_texts), seq_texts,
                                    [args.d] * len(seq_texts)))
    else:
        results = [_verify_one(graph_text, t, args.d) for t in seq_texts]
    worst = EX_OK
    for path, (code, w, msg, step, offending) in zip(args.seq, results):
        label = "accepted" if code == EX_OK else ("malformed" if code == EX_MALFORMED else "rejected")
        line = f"{path}: {label}"
        if w is not None:
            line += f" width {w}"
        if msg:
            line += f" ({msg})"
        if step is not None:
            line += f" at step {step}, vertices {offending}"
        print(line)
        worst = max(worst, code)
    rep["width"] = results[0][1] if len(results) == 1 else max((r[1] or 0) for r in results)
    rep["status"] = "ok" if worst == EX_OK else "violation"
    if len(results) == 1 and results[0][3] is not None:
        rep["violation_step"] = results[0][3]
        rep["offending"] = ",".join(map(str, results[0][4]))
    return worst


def cmd_subdivide(args, rep: Report) -> int:
    g = _read_graph(args.graph, rep)
    if g.n_red_edges() and not args.red:
        raise UsageError("input has red edges; pass --red to subdivide a red base")
    n = len(g)
    bound = subdivision.length_bound(n)
    if args.length == "auto":
        lengths = bound
    else:
        try:
            lengths = int(args.length)
        except ValueError:
            raise UsageError("--length takes an integer or 'auto'") from None
    inst = subdivision.subdivide(g, lengths, red="all" if args.red else None)
    rep["length"] = lengths
    rep["length_bound"] = bound
    if lengths < bound:
        rep["status"] = "refused"
        print(f"length {lengths} below the bound {bound} for {n} vertices", file=sys.stderr)
        return EX_VIOLATION
    seq = subdivision.subdivision_sequence(inst, limit=4)
    r = verify(seq, 4)
    rep["width"] = r.width
    _write(args.out, formats.format_trigraph(inst.g), rep, "graph")
    formats.write_text(args.emit_witness, seq.to_text())
    rep["output.witness"] = args.emit_witness
    print(f"width {r.width}")
    return EX_OK if r.accepted else EX_VIOLATION


def cmd_encode(args, rep: Report) -> int:
    h = _read_graph(args.graph, rep)
    try:
        res = encode_all(h, args.d, args.t_override, args.force)
    except EncodingError as exc:
        rep["status"] = "refused"
        print(str(exc), file=sys.stderr)
        return EX_VIOLATION
    mapping = formats.compact_mapping(res.g)
    g = res.g.relabel(mapping)
    _write(args.out, formats.format_trigraph(g), rep, "graph")
    plans = []
    for p in res.plans:
        d = p.to_dict()
        d["A"] = {k: [mapping[x] for x in v] for k, v in d["A"].items()}
        d["B"] = {k: [mapping[x] for x in v] for k, v in d["B"].items()}
        plans.append(d)
    doc = {"format": "tww-encoding-plan/1", "components": plans}
    if args.plan:
        formats.write_text(args.plan, json.dumps(doc, indent=1, sort_keys=True) + "\n")
        rep["output.plan"] = args.plan
    tainted = [i for i, p in enumerate(res.plans) if p.tainted]
    rep["components"] = len(res.plans)
    rep["tainted"] = ",".join(map(str, tainted)) or "none"
    for p in res.plans:
        print(f"component {p.S}: t={p.t} sound_t={p.sound_t}{' TAINTED' if p.tainted else ''}")
    return EX_OK


def _load_cnf(path: str, rep: Report) -> reduction.CnfInstance:
    n, clauses = formats.parse_dimacs(formats.read_text(path))
    rep.digest("cnf", path)
    return reduction.CnfInstance(n, clauses)


def cmd_reduce(args, rep: Report) -> int:
    cnf = _load_cnf(args.cnf, rep)
    if not args.no_preprocess and not cnf.is_compliant():
        cnf = reduction.preprocess_occurrences(cnf)
        if not cnf.clauses:
            cnf = reduction.CnfInstance(reduction.TRIVIAL_SAT.n_vars, reduction.TRIVIAL_SAT.clauses)
        rep["preprocessed"] = "yes"
    try:
        out = reduction.build_instance(cnf, args.L)
    except reduction.ReductionError as exc:
        rep["status"] = "refused"
        print(str(exc), file=sys.stderr)
        return EX_VIOLATION
    doc = out.manifest_document()
    doc["digest"] = formats.trigraph_digest(out.g)
    _write(args.out, formats.format_trigraph(out.g), rep, "graph")
    formats.write_text(args.manifest, json.dumps(doc, indent=1, sort_keys=True) + "\n")
    rep["output.manifest"] = args.manifest
    for k, v in out.stats.items():
        rep[k] = v
    rep["L"] = out.L
    rep["L_nominal"] = out.L_nominal
    print(f"vertices {len(out.g)} L {out.L}")
    return EX_OK


def _read_assignment(path: str, n: int) -> Dict[int, bool]:
    toks = formats.read_text(path).replace("v", " ").split()
    a = {}
    for tok in toks:
        lit = int(tok)
        if lit:
            a[abs(lit)] = lit > 0
    for i in range(1, n + 1):
        a.setdefault(i, False)
    return a


def cmd_witness(args, rep: Report) -> int:
    g = _read_graph(args.graph, rep)
    doc = json.loads(formats.read_text(args.manifest))
    rep.digest("manifest", args.manifest)
    try:
        cnf = reduction.CnfInstance(doc["cnf"]["n"], doc["cnf"]["clauses"])
        L = doc["L"]
    except (KeyError, TypeError) as exc:
        raise formats.FormatError(f"manifest lacks {exc}") from None
    out = reduction.build_instance(cnf, L)
    if out.g != g:
        rep["status"] = "refused"
        print("trigraph does not match the manifest", file=sys.stderr)
        return EX_VIOLATION
    if args.assignment == "auto":
        a = reduction.truth_table_solve(cnf)
        if a is None:
            rep["status"] = "refused"
            print("instance is unsatisfiable", file=sys.stderr)
            return EX_VIOLATION
    else:
        a = _read_assignment(args.assignment, cnf.n_vars)
    try:
        seq = reduction.synthesize_witness(out, a)
    except reduction.WitnessRefused as exc:
        rep["status"] = "refused"
        rep["gadget"] = exc.gadget
        print(f"refused: {exc}", file=sys.stderr)
        return EX_VIOLATION
    r = verify(seq, 4)
    rep["width"] = r.width
    _write(args.out, seq.to_text(), rep, "witness")
    return EX_OK if r.accepted else EX_VIOLATION


def gadget_self_check() -> List[tuple]:
    """(name, ok, detail) for the fence checks and each contraction routine."""
    from .sequence import Contractor
    rows = []

    def contexts():
        b = gadgets.InstanceBuilder()
        s = b.vertex("s")
        for _ in range(3):
            b.g.add_edge(s, b.vertex(), red=True)
        b.attach_fence([s], "fence")
        yield "fence", b
        b = gadgets.InstanceBuilder()
        p = b.vertical_set("p")
        v = b.vertical_set("v")
        b.add_arc(p, v)
        b.add_arc(v, b.vertical_set("w"))
        yield "wire", b
        b = gadgets.InstanceBuilder()
        b.or_gadget(b.vertical_set("in1"), b.vertical_set("in2"), b.vertical_set("out"), "or")
        yield "or", b
        b = gadgets.InstanceBuilder()
        sets = [b.vertical_set(f"v{k}") for k in range(4)]
        b.variable_gadget("var", (sets[0], sets[1]), (sets[2], sets[3]))
        yield "variable", b

    for name, b in contexts():
        low = {}
        bad = 0
        for f in b.fences.values():
            r = gadgets.exhaustive_first_step_check(b.g, f)
            bad += len(r.failures)
            for k, v in r.minimum.items():
                low[k] = min(low.get(k, v), v)
        rows.append((f"first-step[{name}]", bad == 0, json.dumps(low, sort_keys=True)))

    b = gadgets.InstanceBuilder()
    s = b.vertex("s")
    f = b.attach_fence([s], "fence")
    c = Contractor(b.g, limit=4)
    p = gadgets.contract_fence(c, f, s)
    rows.append(("contract_fence", len(c.g) == 2 and c.g.red_neighbors(p) == {s}, f"{len(c.pairs)} steps"))
    for side in (1, 2):
        b = gadgets.InstanceBuilder()
        i1, i2, o = b.vertical_set("in1"), b.vertical_set("in2"), b.vertical_set("out")
        h = b.or_gadget(i1, i2, o, "or")
        c = Contractor(b.g, limit=4)
        near, far = (i1, i2) if side == 1 else (i2, i1)
        z = gadgets.prime(c, near)
        e = gadgets.contract_or(c, h, side)
        rows.append((f"contract_or[side {side}]", c.g.red_neighbors(e) == {z, far.x, far.y},
                     f"{len(c.pairs)} steps"))
    for pol in ("top", "bot"):
        b = gadgets.InstanceBuilder()
        sets = [b.vertical_set(f"v{k}") for k in range(4)]
        var = b.variable_gadget("var", (sets[0], sets[1]), (sets[2], sets[3]))
        c = Contractor(b.g, limit=4)
        u = gadgets.contract_variable_half(c, var, pol)
        ok = c.g.red_neighbors(u) == {c.find(var.x)}
        rows.append((f"contract_variable_half[{pol}]", ok, f"{len(c.pairs)} steps"))
        z1, z2 = gadgets.prime(c, sets[0]), gadgets.prime(c, sets[1])
        r = gadgets.contract_variable_rest(c, var, pol)
        ok = c.g.red_neighbors(r) == {z1, z2, sets[2].x, sets[3].x}
        rows.append((f"contract_variable_rest[{pol}]", ok, f"{len(c.pairs)} steps"))
    return rows


def cmd_check_gadgets(args, rep: Report) -> int:
    try:
        rows = gadget_self_check()
    except (gadgets.GadgetError, SequenceError) as exc:
        rep["status"] = "violation"
        print(f"FAIL {exc}")
        return EX_VIOLATION
    ok = True
    for name, good, detail in rows:
        print(f"{'PASS' if good else 'FAIL'} {name} {detail}")
        ok &= good
    rep["checks"] = len(rows)
    rep["status"] = "ok" if ok else "violation"
    return EX_OK if ok else EX_VIOLATION


def cmd_stats(args, rep: Report) -> int:
    if args.cnf:
        cnf = _load_cnf(args.path, rep)
        if not cnf.is_compliant():
            cnf = reduction.preprocess_occurrences(cnf)
        rows = {"n": cnf.n_vars, "m": cnf.m, "compliant": cnf.is_compliant()}
        if cnf.is_compliant():
            L, lp = reduction.choose_chain_length(cnf)
            rows.update(L=L, L_nominal=lp, **reduction.predicted_census(cnf))
    else:
        g = _read_graph(args.path, rep)
        prof = g.red_degree_profile()
        rows = {"vertices": len(g), "black_edges": g.n_black_edges(), "red_edges": g.n_red_edges(),
                "max_red_degree": prof.max_red_degree, "components": len(g.components()),
                "red_components": len([c for c in g.red_components() if len(c) > 1])}
    for k, v in rows.items():
        print(f"{k} {v}")
        rep[k] = v
    return EX_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> Parser:
    def common(parser, default):
        parser.add_argument("--report", default=default(None), help="write a key=value run report here")
        parser.add_argument("--seed", type=int, default=default(0))
        parser.add_argument("--jobs", type=int, default=default(1))

    # global options are accepted before or after the subcommand
    shared = Parser(add_help=False)
    common(shared, lambda v: argparse.SUPPRESS)
    p = Parser(prog="tww", description="twin-width toolkit")
    common(p, lambda v: v)
    sub = p.add_subparsers(dest="command", parser_class=Parser)
    add = sub.add_parser
    sub.add_parser = lambda *a, **kw: add(*a, parents=[shared], **kw)

    s = sub.add_parser("solve", help="exact twin-width of a small trigraph")
    s.add_argument("graph")
    s.add_argument("--decide", type=int)
    s.add_argument("--budget-nodes", type=int, default=2_000_000)
    s.add_argument("--budget-secs", type=float, default=60.0)
    s.add_argument("--d-cap", type=int, default=8)
    s.add_argument("--out", help="witness sequence file")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", help="check contraction sequences")
    s.add_argument("graph")
    s.add_argument("seq", nargs="+")
    s.add_argument("--d", type=int)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("subdivide", help="subdivide a graph and emit its 4-sequence")
    s.add_argument("graph")
    s.add_argument("--length", default="auto")
    s.add_argument("--red", action="store_true", help="make every path red")
    s.add_argument("--emit-witness", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_subdivide)

    s = sub.add_parser("encode", help="replace red components by biclique encodings")
    s.add_argument("graph")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--t-override", type=int)
    s.add_argument("--force", action="store_true")
    s.add_argument("--out")
    s.add_argument("--plan")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("reduce", help="build the hardness trigraph of a CNF")
    s.add_argument("cnf")
    s.add_argument("--out")
    s.add_argument("--manifest", required=True)
    s.add_argument("--L", type=int)
    s.add_argument("--no-preprocess", action="store_true")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("witness", help="4-sequence from a satisfying assignment")
    s.add_argument("graph")
    s.add_argument("manifest")
    s.add_argument("--assignment", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("check-gadgets", help="exhaustive gadget self-check")
    s.set_defaults(func=cmd_check_gadgets)

    s = sub.add_parser("stats", help="summary of a trigraph or CNF")
    s.add_argument("path")
    s.add_argument("--cnf", action="store_true")
    s.set_defaults(func=cmd_stats)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command is None:
        build_parser().print_usage(sys.stderr)
        return EX_USAGE
    random.seed(args.seed)
    rep = Report(args.command)
    try:
        code = args.func(args, rep)
    except UsageError as exc:
        print(f"tww: {exc}", file=sys.stderr)
        return EX_USAGE
    except OSError as exc:
        print(f"tww: {exc}", file=sys.stderr)
        rep["status"] = "violation"
        code = EX_IOERR
    except (formats.FormatError, TrigraphError, reduction.ReductionError, SequenceError,
            subdivision.SubdivisionError, json.JSONDecodeError) as exc:
        print(f"tww: {exc}", file=sys.stderr)
        rep["status"] = "violation"
        code = EX_MALFORMED
    if args.report:
        try:
            formats.write_text(args.report, rep.render())
        except OSError as exc:
            print(f"tww: {exc}", file=sys.stderr)
            return EX_IOERR
    return code


if __name__ == "__main__":
    sys.exit(main())
