"""Contraction sequences: replay, verification, restriction and partitions.

A sequence stores only the merged pairs.  The vertex created by step k
(0-based) gets id ``base.max_id() + 1 + k``; for a base on 1..n that is
``n + step_number``.  Pairs may name any vertex alive at that step.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from . import formats
from .trigraph import Trigraph, TrigraphError


class SequenceError(ValueError):
    pass


class WidthExceeded(SequenceError):
    def __init__(self, message, step, offending):
        super().__init__(message)
        self.step = step
        self.offending = offending


@dataclass(frozen=True)
class ContractionStep:
    left: int
    right: int
    result: int


@dataclass
class VerificationReport:
    accepted: bool
    width: int
    malformed: bool = False
    message: str = ""
    # 0 means the base trigraph itself, k means after the k-th contraction
    violation_step: Optional[int] = None
    offending: List[int] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if self.malformed:
            return 2
        return 0 if self.accepted else 1


@dataclass
class ContractionSequence:
    base: Trigraph
    pairs: List[Tuple[int, int]]
    partial: bool = False

    def __post_init__(self):
        self.pairs = [(int(u), int(v)) for u, v in self.pairs]

    @property
    def first_result_id(self) -> int:
        return self.base.max_id() + 1

    @property
    def steps(self) -> List[ContractionStep]:
        start = self.first_result_id
        return [ContractionStep(u, v, start + k) for k, (u, v) in enumerate(self.pairs)]

    def __len__(self) -> int:
        return len(self.pairs)

    def check_complete(self) -> None:
        if not self.partial and len(self.base) > 0 and len(self.pairs) != len(self.base) - 1:
            raise SequenceError(f"full sequence on {len(self.base)} vertices needs "
                                f"{len(self.base) - 1} steps, has {len(self.pairs)}")

    def replay(self, upto: Optional[int] = None) -> Trigraph:
        """Trigraph after ``upto`` steps (all steps by default)."""
        g = self.base.copy()
        nxt = self.first_result_id
        pairs = self.pairs if upto is None else self.pairs[:upto]
        for k, (u, v) in enumerate(pairs):
            try:
                g.contract_inplace(u, v, nxt + k)
            except TrigraphError as exc:
                raise SequenceError(f"step {k + 1}: {exc}") from None
        return g

    def trigraphs(self):
        """Yields the base and then every intermediate trigraph (shared object)."""
        g = self.base.copy()
        yield g
        nxt = self.first_result_id
        for k, (u, v) in enumerate(self.pairs):
            try:
                g.contract_inplace(u, v, nxt + k)
            except TrigraphError as exc:
                raise SequenceError(f"step {k + 1}: {exc}") from None
            yield g

    def then(self, other: "ContractionSequence") -> "ContractionSequence":
        """Concatenate with a sequence whose base is this sequence's end."""
        if other.first_result_id != self.first_result_id + len(self.pairs) and other.pairs:
            raise SequenceError("second sequence does not start where the first ends")
        return ContractionSequence(self.base, self.pairs + other.pairs, other.partial)

    # -- files -------------------------------------------------------------

    def to_text(self, final_digest: bool = False) -> str:
        if not formats.is_compact(self.base):
            raise SequenceError("base ids must be 1..n; use compacted() first")
        digest = formats.trigraph_digest(self.replay()) if final_digest else None
        return formats.format_sequence_text(len(self.base), self.pairs, self.partial, digest)

    def compacted(self) -> Tuple["ContractionSequence", Dict[int, int]]:
        """Relabel the base to 1..n; returns the new sequence and the vertex map."""
        mapping = formats.compact_mapping(self.base)
        n = len(self.base)
        old_start = self.first_result_id
        for k in range(len(self.pairs)):
            mapping[old_start + k] = n + 1 + k
        base = self.base.relabel({v: mapping[v] for v in self.base.vertices})
        try:
            pairs = [(mapping[u], mapping[v]) for u, v in self.pairs]
        except KeyError as exc:
            raise SequenceError(f"unknown id {exc.args[0]}") from None
        return ContractionSequence(base, pairs, self.partial), mapping


def sequence_from_text(base: Trigraph, text: str) -> Tuple[ContractionSequence, Optional[str]]:
    n, pairs, partial, digest = formats.parse_sequence_text(text)
    if n != len(base):
        raise formats.FormatError(f"sequence is for {n} vertices, trigraph has {len(base)}")
    return ContractionSequence(base, pairs, partial), digest


# -- verification ------------------------------------------------------------

def verify(seq: ContractionSequence, d: Optional[int] = None) -> VerificationReport:
    """Replay ``seq``; accept iff every trigraph has red degree at most ``d``.

    With ``d=None`` only well-formedness is checked and the width is reported.
    """
    try:
        seq.check_complete()
    except SequenceError as exc:
        return VerificationReport(False, 0, malformed=True, message=str(exc))
    g = seq.base.copy()
    width = g.max_red_degree()
    first_bad = None
    offending: List[int] = []
    if d is not None and width > d:
        first_bad = 0
        offending = sorted(v for v in g.vertices if g.red_degree(v) > d)
    nxt = seq.first_result_id
    for k, (u, v) in enumerate(seq.pairs):
        w = nxt + k
        try:
            g.contract_inplace(u, v, w)
        except TrigraphError as exc:
            return VerificationReport(False, width, malformed=True,
                                      message=f"step {k + 1}: {exc}", violation_step=k + 1,
                                      offending=[u, v])
        # only w and its red neighbours can have gained red degree
        touched = g.red_neighbors(w)
        local = max([len(touched)] + [g.red_degree(z) for z in touched])
        if local > width:
            width = local
        if d is not None and first_bad is None and local > d:
            first_bad = k + 1
            offending = sorted(z for z in touched | {w} if g.red_degree(z) > d)
    if first_bad is not None:
        return VerificationReport(False, width, violation_step=first_bad, offending=offending,
                                  message=f"red degree above {d} after step {first_bad}")
    return VerificationReport(True, width)


def width(seq: ContractionSequence) -> int:
    report = verify(seq)
    if report.malformed:
        raise SequenceError(report.message)
    return report.width


# -- partitions --------------------------------------------------------------

@dataclass
class PartitionView:
    parts: Dict[int, FrozenSet[int]]

    def part_of(self, original: int) -> int:
        for vid, part in self.parts.items():
            if original in part:
                return vid
        raise KeyError(original)

    def as_set(self) -> Set[FrozenSet[int]]:
        return set(self.parts.values())


def partition_view(seq: ContractionSequence, index: int) -> PartitionView:
    if not 0 <= index <= len(seq.pairs):
        raise SequenceError(f"index {index} outside 0..{len(seq.pairs)}")
    parts: Dict[int, FrozenSet[int]] = {v: frozenset([v]) for v in seq.base.vertices}
    nxt = seq.first_result_id
    for k, (u, v) in enumerate(seq.pairs[:index]):
        if u not in parts or v not in parts or u == v:
            raise SequenceError(f"step {k + 1}: dead or unknown vertex")
        parts[nxt + k] = parts.pop(u) | parts.pop(v)
    return PartitionView(parts)


def trigraph_of_partition(base: Trigraph, p: PartitionView) -> Trigraph:
    """Quotient trigraph: black between fully adjacent parts, red between
    non-homogeneous parts or parts joined by a red edge."""
    seen: Set[int] = set()
    for part in p.parts.values():
        if not part or part & seen:
            raise SequenceError("parts overlap or are empty")
        seen |= part
    if seen != set(base.vertices):
        raise SequenceError("parts do not cover the vertex set")
    owner = {x: vid for vid, part in p.parts.items() for x in part}
    black_count: Dict[Tuple[int, int], int] = {}
    red_pairs: Set[Tuple[int, int]] = set()
    for u, v in base.black_edges():
        pu, pv = owner[u], owner[v]
        if pu != pv:
            key = (pu, pv) if pu < pv else (pv, pu)
            black_count[key] = black_count.get(key, 0) + 1
    for u, v in base.red_edges():
        pu, pv = owner[u], owner[v]
        if pu != pv:
            red_pairs.add((pu, pv) if pu < pv else (pv, pu))
    q = Trigraph(p.parts.keys())
    for (pu, pv), c in black_count.items():
        full = len(p.parts[pu]) * len(p.parts[pv])
        if c == full and (pu, pv) not in red_pairs:
            q.add_edge(pu, pv)
        else:
            red_pairs.add((pu, pv))
    for pu, pv in red_pairs:
        q.add_edge(pu, pv, red=True)
    return q


# -- restriction -------------------------------------------------------------

def restrict(seq: ContractionSequence, s: Iterable[int]) -> ContractionSequence:
    """The sequence induced on ``base[s]``: keep merges of two parts that both meet s."""
    s = set(s)
    if not s:
        raise SequenceError("cannot restrict to an empty set")
    if not s <= set(seq.base.vertices):
        raise SequenceError("restriction set is not inside the base")
    sub = seq.base.induced(s)
    rid: Dict[int, int] = {v: v for v in s}
    nxt_new = sub.max_id() + 1
    out: List[Tuple[int, int]] = []
    start = seq.first_result_id
    for k, (u, v) in enumerate(seq.pairs):
        w = start + k
        ru, rv = rid.pop(u, None), rid.pop(v, None)
        if ru is not None and rv is not None:
            out.append((ru, rv))
            rid[w] = nxt_new
            nxt_new += 1
        elif ru is not None or rv is not None:
            rid[w] = ru if ru is not None else rv
    return ContractionSequence(sub, out, seq.partial)


# -- live builder ------------------------------------------------------------

class Contractor:
    """Builds a sequence by merging vertices of a live trigraph.

    Any id ever seen (original or created) can be used to name the vertex
    it currently belongs to.  ``limit`` turns red degree overflow into an
    immediate :class:`WidthExceeded`.
    """

    def __init__(self, base: Trigraph, limit: Optional[int] = None, copy: bool = True):
        self.base = base.copy() if copy else base
        self.g = self.base.copy()
        self.pairs: List[Tuple[int, int]] = []
        self.next_id = self.base.max_id() + 1
        self._parent: Dict[int, int] = {}
        self.limit = limit
        self.width = self.g.max_red_degree()
        if limit is not None and self.width > limit:
            raise WidthExceeded(f"base already has red degree {self.width}", 0, [])

    def find(self, x: int) -> int:
        path = []
        while x in self._parent:
            path.append(x)
            x = self._parent[x]
        for p in path:
            self._parent[p] = x
        return x

    def alive(self, x: int) -> bool:
        return self.find(x) in self.g

    def merge(self, a: int, b: int) -> int:
        u, v = self.find(a), self.find(b)
        if u == v:
            raise SequenceError(f"{a} and {b} are already merged")
        w = self.next_id
        self.g.contract_inplace(u, v, w)
        self.next_id += 1
        self._parent[u] = w
        self._parent[v] = w
        self.pairs.append((u, v))
        touched = self.g.red_neighbors(w)
        local = max([len(touched)] + [self.g.red_degree(z) for z in touched])
        if local > self.width:
            self.width = local
        if self.limit is not None and local > self.limit:
            bad = sorted(z for z in touched | {w} if self.g.red_degree(z) > self.limit)
            raise WidthExceeded(f"step {len(self.pairs)} merging {a}, {b}: red degree "
                                f"{local} exceeds {self.limit} at {bad}", len(self.pairs), bad)
        return w

    def merge_all(self, ids: Sequence[int]) -> int:
        """Merge the listed vertices left to right; returns the final id."""
        ids = list(ids)
        acc = self.find(ids[0])
        for x in ids[1:]:
            acc = self.merge(acc, x)
        return acc

    def red_degree(self, x: int) -> int:
        return self.g.red_degree(self.find(x))

    def red_neighbors(self, x: int) -> Set[int]:
        return self.g.red_neighbors(self.find(x))

    def sequence(self, partial: Optional[bool] = None) -> ContractionSequence:
        if partial is None:
            partial = len(self.g) > 1
        return ContractionSequence(self.base, list(self.pairs), partial)
