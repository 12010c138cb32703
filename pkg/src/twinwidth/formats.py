"""Text formats: trigraph files, sequence files and DIMACS CNF."""
from __future__ import annotations

import hashlib
from typing import Iterable, List, Optional, Tuple

from .trigraph import Trigraph, TrigraphError


class FormatError(ValueError):
    pass


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line:
            yield lineno, line


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"line {lineno}: expected an integer, got {tok!r}") from None


# -- trigraphs ---------------------------------------------------------------

def parse_trigraph(text: str) -> Trigraph:
    g = None
    declared = None
    n_black = n_red = 0
    for lineno, line in _lines(text):
        toks = line.split()
        if toks[0] == "c":
            continue
        if toks[0] == "p":
            if g is not None:
                raise FormatError(f"line {lineno}: second header")
            if len(toks) != 5 or toks[1] != "tww":
                raise FormatError(f"line {lineno}: bad header {line!r}")
            n, nb, nr = (_int(t, lineno) for t in toks[2:])
            if min(n, nb, nr) < 0:
                raise FormatError(f"line {lineno}: negative count")
            g = Trigraph(range(1, n + 1))
            declared = (nb, nr)
            continue
        if g is None:
            raise FormatError(f"line {lineno}: edge before header")
        if toks[0] not in ("e", "r") or len(toks) != 3:
            raise FormatError(f"line {lineno}: bad edge line {line!r}")
        u, v = _int(toks[1], lineno), _int(toks[2], lineno)
        try:
            g.add_edge(u, v, red=toks[0] == "r")
        except TrigraphError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        if toks[0] == "e":
            n_black += 1
        else:
            n_red += 1
    if g is None:
        raise FormatError("missing 'p tww' header")
    if (n_black, n_red) != declared:
        raise FormatError(f"header declares {declared[0]} black / {declared[1]} red edges, "
                          f"found {n_black} / {n_red}")
    return g


def is_compact(g: Trigraph) -> bool:
    return set(g.vertices) == set(range(1, len(g) + 1))


def compact_mapping(g: Trigraph) -> dict:
    return {v: i for i, v in enumerate(sorted(g.vertices), 1)}


def format_trigraph(g: Trigraph, comments: Iterable[str] = ()) -> str:
    if not is_compact(g):
        raise FormatError("trigraph ids must be 1..n; relabel with compact_mapping first")
    black = sorted(g.black_edges())
    red = sorted(g.red_edges())
    out = [f"c {c}" for c in comments]
    out.append(f"p tww {len(g)} {len(black)} {len(red)}")
    out += [f"e {u} {v}" for u, v in black]
    out += [f"r {u} {v}" for u, v in red]
    return "\n".join(out) + "\n"


def trigraph_digest(g: Trigraph) -> str:
    """sha256 of a canonical rendering; ids are kept as they are."""
    parts = ["v " + " ".join(map(str, sorted(g.vertices)))]
    parts += [f"e {u} {v}" for u, v in sorted(g.black_edges())]
    parts += [f"r {u} {v}" for u, v in sorted(g.red_edges())]
    return hashlib.sha256("\n".join(parts).encode()).hexdigest()


# -- sequences ---------------------------------------------------------------

def parse_sequence_text(text: str) -> Tuple[int, List[Tuple[int, int]], bool, Optional[str]]:
    """Returns (n, pairs, partial, final_digest)."""
    header = None
    pairs: List[Tuple[int, int]] = []
    partial = False
    digest = None
    for lineno, line in _lines(text):
        toks = line.split()
        if toks[0] == "c":
            if toks[1:2] == ["partial"]:
                partial = True
            elif toks[1:2] == ["final-digest"] and len(toks) == 3:
                digest = toks[2]
            continue
        if toks[0] == "s":
            if header is not None:
                raise FormatError(f"line {lineno}: second header")
            if len(toks) != 4 or toks[1] != "tww":
                raise FormatError(f"line {lineno}: bad header {line!r}")
            header = (_int(toks[2], lineno), _int(toks[3], lineno))
            continue
        if header is None:
            raise FormatError(f"line {lineno}: step before header")
        if len(toks) != 2:
            raise FormatError(f"line {lineno}: bad step line {line!r}")
        pairs.append((_int(toks[0], lineno), _int(toks[1], lineno)))
    if header is None:
        raise FormatError("missing 's tww' header")
    n, k = header
    if len(pairs) != k:
        raise FormatError(f"header declares {k} steps, found {len(pairs)}")
    if not partial and n > 0 and k != n - 1:
        raise FormatError(f"full sequence on {n} vertices needs {n - 1} steps, found {k}")
    return n, pairs, partial, digest


def format_sequence_text(n: int, pairs, partial: bool = False,
                         final_digest: Optional[str] = None) -> str:
    out = []
    if partial:
        out.append("c partial")
    if final_digest:
        out.append(f"c final-digest {final_digest}")
    out.append(f"s tww {n} {len(pairs)}")
    out += [f"{u} {v}" for u, v in pairs]
    return "\n".join(out) + "\n"


# -- DIMACS ------------------------------------------------------------------

def parse_dimacs(text: str) -> Tuple[int, List[List[int]]]:
    n = m = None
    clauses: List[List[int]] = []
    cur: List[int] = []
    for lineno, line in _lines(text):
        if line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        toks = line.split()
        if toks[0] == "p":
            if len(toks) != 4 or toks[1] != "cnf":
                raise FormatError(f"line {lineno}: bad header {line!r}")
            n, m = _int(toks[2], lineno), _int(toks[3], lineno)
            continue
        if n is None:
            raise FormatError(f"line {lineno}: clause before header")
        for tok in toks:
            lit = _int(tok, lineno)
            if lit == 0:
                if not cur:
                    raise FormatError(f"line {lineno}: empty clause")
                clauses.append(cur)
                cur = []
            else:
                if abs(lit) > n:
                    raise FormatError(f"line {lineno}: literal {lit} exceeds {n} variables")
                cur.append(lit)
    if n is None:
        raise FormatError("missing 'p cnf' header")
    if cur:
        clauses.append(cur)
    if len(clauses) != m:
        raise FormatError(f"header declares {m} clauses, found {len(clauses)}")
    return n, clauses


def format_dimacs(n: int, clauses) -> str:
    out = [f"p cnf {n} {len(clauses)}"]
    out += [" ".join(map(str, c)) + " 0" for c in clauses]
    return "\n".join(out) + "\n"


def read_text(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def write_text(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)
