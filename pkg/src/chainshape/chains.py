"""Chains of points, vertex moves, and a bounded homotopy decision.

A chain is a vertex sequence in a Rips-type complex whose consecutive
entries are equal or joined by an edge.  Two chains with common endpoints
are homotopic when vertex additions and deletions carry one to the other;
a move is legal exactly when the three vertices it touches span a simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .complexes import SimplicialComplex2, build_rips_2skeleton
from .errors import (
    EndpointMismatch,
    IllegalMove,
    InvalidStep,
    LebesgueViolation,
    LengthMismatch,
    ScaleMismatch,
)
from .grouppres import path_to_word, presentation_at, word_class
from .metric_cover import Cover

DEFAULT_BUDGET = 10**6
DEFAULT_SLACK = (2, 8)


@dataclass(frozen=True)
class Chain:
    vertices: tuple
    complex: SimplicialComplex2 = field(repr=False, compare=False)

    def __post_init__(self):
        vs = tuple(self.vertices)
        object.__setattr__(self, "vertices", vs)
        if not vs:
            raise ValueError("a chain needs at least one vertex")
        K = self.complex
        for i in range(len(vs) - 1):
            if not K.has_edge(vs[i], vs[i + 1]):
                raise InvalidStep(i)

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __getitem__(self, i):
        return self.vertices[i]

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    def is_loop(self) -> bool:
        return self.vertices[0] == self.vertices[-1]

    def at(self, K: SimplicialComplex2) -> "Chain":
        """The same vertex sequence validated in another complex."""
        return Chain(self.vertices, K)

    def collapsed(self) -> "Chain":
        return Chain(_collapse(self.vertices), self.complex)

    def to_json(self) -> list:
        return list(self.vertices)


def _collapse(vs) -> tuple:
    out = []
    for v in vs:
        if not out or out[-1] != v:
            out.append(v)
    return tuple(out)


def validate_chain(vertices: Sequence[int], K: SimplicialComplex2) -> Chain:
    return Chain(tuple(vertices), K)


def _same_scale(a: Chain, b: Chain):
    if a.complex is not b.complex and a.complex != b.complex:
        raise ScaleMismatch("chains live in different complexes")


def concat(a: Chain, b: Chain) -> Chain:
    _same_scale(a, b)
    if a.end != b.start:
        raise EndpointMismatch(f"{a.end} != {b.start}")
    return Chain(a.vertices + b.vertices[1:], a.complex)


def concat_all(chains: Iterable[Chain]) -> Chain:
    it = iter(chains)
    out = next(it)
    for c in it:
        out = concat(out, c)
    return out


def inverse(a: Chain) -> Chain:
    return Chain(a.vertices[::-1], a.complex)


@dataclass(frozen=True, order=True)
class Move:
    """Insert `v` so that it lands at index `pos` ("add"), or remove the
    vertex at `pos` ("del"; `v` records the removed vertex)."""

    op: str
    pos: int
    v: int | None = None

    def inverse(self) -> "Move":
        if self.op == "add":
            return Move("del", self.pos, self.v)
        if self.v is None:
            raise ValueError("cannot invert a deletion that does not record its vertex")
        return Move("add", self.pos, self.v)

    def to_json(self) -> dict:
        return {"op": self.op, "pos": self.pos, "v": self.v}

    @classmethod
    def from_json(cls, d) -> "Move":
        return cls(d["op"], int(d["pos"]), None if d.get("v") is None else int(d["v"]))


def VertexAdd(pos, v):
    return Move("add", pos, v)


def VertexDelete(pos, v=None):
    return Move("del", pos, v)


def invert_moves(moves: Sequence[Move]) -> list:
    return [m.inverse() for m in reversed(moves)]


def _apply(vs: tuple, m: Move, K: SimplicialComplex2) -> tuple:
    n = len(vs)
    if m.op == "add":
        p, v = m.pos, m.v
        if v is None or not 0 <= p <= n:
            raise IllegalMove(f"bad addition {m}")
        if not 0 <= v < K.n:
            raise IllegalMove(f"vertex {v} not in complex")
        if p == 0:
            if v != vs[0]:
                raise IllegalMove("only a duplicate of the start may be added in front")
        elif p == n:
            if v != vs[-1]:
                raise IllegalMove("only a duplicate of the end may be appended")
        elif not K.spans_simplex(vs[p - 1], v, vs[p]):
            raise IllegalMove(f"{{{vs[p - 1]}, {v}, {vs[p]}}} is not a simplex")
        return vs[:p] + (v,) + vs[p:]
    if m.op == "del":
        p = m.pos
        if n < 2 or not 0 <= p < n:
            raise IllegalMove(f"bad deletion {m}")
        if m.v is not None and vs[p] != m.v:
            raise IllegalMove(f"vertex at {p} is {vs[p]}, not {m.v}")
        if p == 0:
            if vs[1] != vs[0]:
                raise IllegalMove("deleting the start changes an endpoint")
        elif p == n - 1:
            if vs[-2] != vs[-1]:
                raise IllegalMove("deleting the end changes an endpoint")
        elif not K.spans_simplex(vs[p - 1], vs[p], vs[p + 1]):
            raise IllegalMove(f"{{{vs[p - 1]}, {vs[p]}, {vs[p + 1]}}} is not a simplex")
        return vs[:p] + vs[p + 1:]
    raise IllegalMove(f"unknown move kind {m.op!r}")


def apply_move(c: Chain, m: Move) -> Chain:
    return Chain(_apply(c.vertices, m, c.complex), c.complex)


def replay(c: Chain, moves: Iterable[Move]) -> Chain:
    vs = c.vertices
    for m in moves:
        vs = _apply(vs, m, c.complex)
    return Chain(vs, c.complex)


@dataclass(frozen=True)
class HomotopyVerdict:
    """Yes (with moves), No (with two distinct abelian classes) or Unknown."""

    status: str
    moves: tuple = ()
    certificate: tuple | None = None
    expanded: int = 0
    note: str = ""

    @property
    def yes(self) -> bool:
        return self.status == "yes"

    @property
    def no(self) -> bool:
        return self.status == "no"

    @property
    def unknown(self) -> bool:
        return self.status == "unknown"

    def to_json(self) -> dict:
        d = {"verdict": self.status}
        if self.status == "yes":
            d["moves"] = [m.to_json() for m in self.moves]
        if self.certificate is not None:
            d["certificate"] = [list(c) for c in self.certificate]
        if self.status == "unknown":
            d["expanded"] = self.expanded
        if self.note:
            d["note"] = self.note
        return d


def Yes(moves=(), note=""):
    return HomotopyVerdict("yes", tuple(moves), note=note)


def No(certificate, note=""):
    return HomotopyVerdict("no", certificate=tuple(tuple(c) for c in certificate), note=note)


def Unknown(expanded=0, note=""):
    return HomotopyVerdict("unknown", expanded=expanded, note=note)


def canonical_reduce(vs: Sequence[int], K: SimplicialComplex2) -> tuple:
    """Greedy reduction: drop repeats, then leftmost legal shortcut, until stuck.

    Returns ``(reduced_vertices, moves)``.
    """
    c = list(vs)
    moves = []
    while True:
        i = 0
        while i < len(c) - 1:
            if c[i] == c[i + 1]:
                moves.append(Move("del", i + 1, c[i + 1]))
                del c[i + 1]
            else:
                i += 1
        for i in range(1, len(c) - 1):
            if K.spans_simplex(c[i - 1], c[i], c[i + 1]):
                moves.append(Move("del", i, c[i]))
                del c[i]
                break
        else:
            return tuple(c), moves


def _neighbors(c: tuple, K: SimplicialComplex2, max_len: int):
    """Moves out of a repeat-free chain, in a fixed lexicographic order."""
    n = len(c)
    for i in range(1, n - 1):
        l, m, r = c[i - 1], c[i], c[i + 1]
        if K.spans_simplex(l, m, r):
            if l == r:
                yield (Move("del", i, m), Move("del", i, r)), c[:i] + c[i + 2:]
            else:
                yield (Move("del", i, m),), c[:i] + c[i + 1:]
    if n + 1 <= max_len:
        apexes = K.apexes
        for i in range(n - 1):
            l, r = c[i], c[i + 1]
            for v in apexes.get((l, r) if l < r else (r, l), ()):
                yield (Move("add", i + 1, v),), c[:i + 1] + (v,) + c[i + 1:]
    if n + 2 <= max_len:
        nbrs = K.sorted_neighbors
        for i in range(n):
            x = c[i]
            for y in nbrs[x]:
                yield ((Move("add", i + 1, x), Move("add", i + 1, y)),
                       c[:i + 1] + (y, x) + c[i + 1:])


def _trace(parent, state):
    moves = []
    while parent[state] is not None:
        prev, mv = parent[state]
        moves[:0] = mv
        state = prev
    return moves


def bidirectional_search(src: tuple, dst: tuple, K: SimplicialComplex2, *,
                         budget: int, max_len: int):
    """Breadth-first search from both ends over repeat-free chains.

    Returns ``(moves, expanded)``; moves is None when the budget runs out or
    the length-bounded move graph is exhausted without meeting.
    """
    if src == dst:
        return [], 0
    fwd = {src: None}
    bwd = {dst: None}
    ffront, bfront = [src], [dst]
    expanded = 0
    while ffront and bfront:
        forward = len(ffront) <= len(bfront)
        front, mine, other = (ffront, fwd, bwd) if forward else (bfront, bwd, fwd)
        new = []
        for s in front:
            expanded += 1
            if expanded > budget:
                return None, expanded
            for mv, t in _neighbors(s, K, max_len):
                if t in mine:
                    continue
                mine[t] = (s, mv)
                if t in other:
                    return _trace(fwd, t) + invert_moves(_trace(bwd, t)), expanded
                new.append(t)
        if forward:
            ffront = new
        else:
            bfront = new
    return None, expanded


def abelian_classes(a: Sequence[int], b: Sequence[int], K: SimplicialComplex2):
    """H1 classes of two paths with common endpoints, closed along a tree."""
    p = presentation_at(K, a[0])
    inv = p.invariant
    return word_class(path_to_word(a, p), inv), word_class(path_to_word(b, p), inv)


def chain_homotopic(a: Chain, b: Chain, budget: int = DEFAULT_BUDGET, *,
                    slack: tuple = DEFAULT_SLACK, check_abelian: bool = True
                    ) -> HomotopyVerdict:
    """Decide fixed-endpoint homotopy of two chains, as far as the budget allows.

    Order of attack: identical chains; differing abelian classes (No);
    greedy canonical reduction of both sides; bidirectional BFS.  Any Yes
    carries a move list that replays `a` into `b`.
    """
    _same_scale(a, b)
    if a.start != b.start or a.end != b.end:
        raise EndpointMismatch(f"({a.start},{a.end}) vs ({b.start},{b.end})")
    K = a.complex
    if a.vertices == b.vertices:
        return Yes()
    if check_abelian:
        ca, cb = abelian_classes(a.vertices, b.vertices, K)
        if ca != cb:
            return No((ca, cb))
    ra, ma = canonical_reduce(a.vertices, K)
    rb, mb = canonical_reduce(b.vertices, K)
    if ra == rb:
        return Yes(ma + invert_moves(mb))
    factor, extra = slack
    max_len = factor * max(len(a), len(b)) + extra
    mid, expanded = bidirectional_search(ra, rb, K, budget=budget, max_len=max_len)
    if mid is None:
        return Unknown(expanded)
    return Yes(ma + mid + invert_moves(mb))


def ladder_moves(x: Sequence[int], y: Sequence[int], K: SimplicialComplex2) -> list:
    """Explicit moves from chain x to chain y of the same length.

    Walks the rungs x_i -> y_i one at a time; needs every
    {x_i, y_i, x_(i+1), y_(i+1)} to lie in a common simplex.  Raises
    IllegalMove otherwise.
    """
    x, y = tuple(x), tuple(y)
    if len(x) != len(y):
        raise LengthMismatch(f"{len(x)} != {len(y)}")
    if x[0] != y[0] or x[-1] != y[-1]:
        raise EndpointMismatch("ladder needs common endpoints")
    n = len(x)
    moves = [Move("add", 0, x[0])]
    cur = _apply(x, moves[0], K)
    for i in range(n - 1):
        for m in (Move("add", i + 2, y[i + 1]), Move("del", i + 1, x[i])):
            cur = _apply(cur, m, K)
            moves.append(m)
    last = Move("del", n, x[-1])
    cur = _apply(cur, last, K)
    moves.append(last)
    assert cur == y
    return moves


def discretize_path(samples: Sequence[int], cover: Cover,
                    K: SimplicialComplex2 | None = None) -> Chain:
    """Chain of a sampled path: consecutive samples must share an element."""
    samples = list(samples)
    if not samples:
        raise ValueError("no samples")
    for i in range(len(samples) - 1):
        if not cover.shares_element((samples[i], samples[i + 1])):
            raise LebesgueViolation(i)
    if K is None:
        K = build_rips_2skeleton(None, cover)
    return Chain(_collapse(samples), K)


def interleaved_chain(a: Chain, b: Chain) -> Chain:
    """a0 a1 b1 b2 a2 a3 b3 b4 ... with repeats collapsed."""
    _same_scale(a, b)
    n = len(a)
    if len(b) != n:
        raise LengthMismatch(f"{n} != {len(b)}")
    if a.start != b.start or a.end != b.end:
        raise EndpointMismatch("interleaving needs common endpoints")
    if n == 1:
        return Chain(a.vertices, a.complex)
    seq = []
    for j in range(n - 1):
        src = a if j % 2 == 0 else b
        seq.extend((src[j], src[j + 1]))
    seq = _collapse(seq)
    K = a.complex
    for i in range(len(seq) - 1):
        if not K.has_edge(seq[i], seq[i + 1]):
            raise InvalidStep(i)
    return Chain(seq, K)


def constant_chain(v: int, K: SimplicialComplex2) -> Chain:
    return Chain((v,), K)
