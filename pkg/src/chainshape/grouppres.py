"""Edge-path group presentations, words, induced maps and abelian invariants.

Generators are the non-tree edges of a breadth-first spanning tree of the
basepoint's component.  Letters are signed 1-based generator indices:
``+(g+1)`` traverses edge ``g = (u, v)`` (``u < v``) from ``u`` to ``v`` and
``-(g+1)`` traverses it backwards.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import Sequence

from .complexes import SimplicialComplex2, SimplicialMap
from .errors import (
    GeneratorOutOfRange,
    NotALoop,
    NotBasepointPreserving,
    RelatorImageNontrivial,
    StepNotEdge,
)

log = logging.getLogger(__name__)


class Word(tuple):
    """A freely reduced word; inversion is negation of letters."""

    def __new__(cls, letters=()):
        out = []
        for x in letters:
            if x == 0:
                raise ValueError("0 is not a letter")
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return super().__new__(cls, out)

    def __mul__(self, other):
        return Word(tuple(self) + tuple(other))

    def __invert__(self):
        return Word(-x for x in reversed(self))

    def __pow__(self, k):
        if k < 0:
            return (~self) ** -k
        return Word(tuple(self) * k)

    def __repr__(self):
        return f"Word({list(self)})"

    def exponents(self, n_generators: int) -> list:
        v = [0] * n_generators
        for x in self:
            g = abs(x) - 1
            if g >= n_generators:
                raise GeneratorOutOfRange(f"letter {x} with {n_generators} generators")
            v[g] += 1 if x > 0 else -1
        return v

    def cyclically_reduced(self) -> "Word":
        w = list(self)
        while len(w) > 1 and w[0] == -w[-1]:
            w = w[1:-1]
        return Word(w)


@dataclass(frozen=True, eq=False)
class Presentation:
    complex: SimplicialComplex2
    base: int
    tree: frozenset
    parent: tuple
    generators: tuple
    relators: tuple
    component: frozenset
    n_base_relators: int = -1

    def __post_init__(self):
        if self.n_base_relators < 0:
            object.__setattr__(self, "n_base_relators", len(self.relators))

    @cached_property
    def gen_index(self) -> dict:
        return {e: g for g, e in enumerate(self.generators)}

    @property
    def n_generators(self) -> int:
        return len(self.generators)

    @cached_property
    def invariant(self) -> "AbelianInvariant":
        return abelianize(self)

    def letter(self, u: int, v: int) -> int:
        """Letter for the directed step u -> v (0 for tree edges)."""
        if u < v:
            g = self.gen_index.get((u, v))
            return 0 if g is None else g + 1
        g = self.gen_index.get((v, u))
        return 0 if g is None else -(g + 1)

    def tree_path(self, v: int) -> list:
        """Vertex list of the tree path from the base to `v`."""
        if v not in self.component:
            raise ValueError(f"vertex {v} is outside the basepoint component")
        path = [v]
        while path[-1] != self.base:
            path.append(self.parent[path[-1]])
        path.reverse()
        return path

    def generator_loop(self, g: int) -> list:
        """Vertex loop at the base realizing generator `g`."""
        u, v = self.generators[g]
        return self.tree_path(u) + self.tree_path(v)[::-1]

    def with_relators(self, extra: Sequence[Word]) -> "Presentation":
        return replace(self, relators=self.relators + tuple(Word(w) for w in extra),
                       n_base_relators=self.n_base_relators)

    def to_json(self) -> dict:
        return {
            "base": self.base,
            "generators": [list(e) for e in self.generators],
            "relators": [list(w) for w in self.relators],
            "tree": [list(e) for e in sorted(self.tree)],
            "ignored_vertices": self.complex.n - len(self.component),
        }


def edge_path_group(K: SimplicialComplex2) -> Presentation:
    """Spanning-tree presentation of the edge-path group at the basepoint."""
    return _edge_path_group(K)


@lru_cache(maxsize=512)
def _edge_path_group(K: SimplicialComplex2) -> Presentation:
    base = K.basepoint
    parent = [-1] * K.n
    seen = {base}
    tree = set()
    queue = deque([base])
    nbrs = K.sorted_neighbors
    while queue:
        u = queue.popleft()
        for w in nbrs[u]:
            if w not in seen:
                seen.add(w)
                parent[w] = u
                tree.add((u, w) if u < w else (w, u))
                queue.append(w)
    comp = frozenset(seen)
    if len(comp) < K.n:
        log.warning("complex has %d vertices outside the basepoint component; ignored",
                    K.n - len(comp))
    gens = tuple(sorted(e for e in K.edges if e[0] in comp and e not in tree))
    index = {e: g for g, e in enumerate(gens)}

    def letter(u, v):
        if u < v:
            g = index.get((u, v))
            return 0 if g is None else g + 1
        g = index.get((v, u))
        return 0 if g is None else -(g + 1)

    relators = []
    for i, j, k in sorted(t for t in K.triangles if t[0] in comp):
        relators.append(Word(x for x in (letter(i, j), letter(j, k), letter(k, i)) if x))
    return Presentation(K, base, frozenset(tree), tuple(parent), gens,
                        tuple(relators), comp)


def presentation_at(K: SimplicialComplex2, base: int) -> Presentation:
    return edge_path_group(K.with_basepoint(base))


def chain_to_word(chain, p: Presentation) -> Word:
    """Word of a loop at the presentation's base, read edge by edge."""
    vs = tuple(getattr(chain, "vertices", chain))
    if not vs or vs[0] != p.base or vs[-1] != p.base:
        raise NotALoop(f"chain {vs[:1]}..{vs[-1:]} is not a loop at {p.base}")
    return Word(_letters(vs, p))


def path_to_word(vertices, p: Presentation) -> Word:
    """Word of a path from the base, closed up along the tree."""
    vs = tuple(vertices)
    if vs[0] != p.base:
        raise NotALoop("path does not start at the base")
    closing = p.tree_path(vs[-1])[::-1]
    return Word(_letters(vs + tuple(closing[1:]), p))


def _letters(vs, p):
    K = p.complex
    for i in range(len(vs) - 1):
        u, v = vs[i], vs[i + 1]
        if u == v:
            continue
        if not K.has_edge(u, v):
            raise StepNotEdge(i)
        x = p.letter(u, v)
        if x:
            yield x


# integer linear algebra

def _pivot(A, t, m, n):
    best = None
    for i in range(t, m):
        row = A[i]
        for j in range(t, n):
            a = row[j]
            if a:
                key = (abs(a), i, j)
                if best is None or key < best:
                    best = key
    return best


def smith_normal_form(A, *, track=True):
    """Smith normal form of an integer matrix given as a list of rows.

    Returns ``(diag, U, V, Vinv)`` with ``U @ A @ V`` diagonal, the
    diagonal entries positive and successively dividing.  Pivots are chosen
    by smallest absolute value, then lowest row, then lowest column.
    Python integers never overflow, so no promotion step is needed.
    """
    A = [list(map(int, row)) for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if track else None
    Vi = [[int(i == j) for j in range(n)] for i in range(n)] if track else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if track:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if track:
            for row in V:
                row[i], row[j] = row[j], row[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        if q:
            rs, rd = A[src], A[dst]
            for j in range(n):
                if rs[j]:
                    rd[j] += q * rs[j]
            if track:
                us, ud = U[src], U[dst]
                for j in range(m):
                    if us[j]:
                        ud[j] += q * us[j]

    def add_col(dst, src, q):  # col_dst += q * col_src
        if q:
            for row in A:
                if row[src]:
                    row[dst] += q * row[src]
            if track:
                for row in V:
                    if row[src]:
                        row[dst] += q * row[src]
                vs, vd = Vi[src], Vi[dst]
                for j in range(n):
                    if vd[j]:
                        vs[j] -= q * vd[j]

    diag = []
    t = 0
    while t < min(m, n):
        p = _pivot(A, t, m, n)
        if p is None:
            break
        while True:
            _, i, j = p
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            a = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // a))
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // a))
                    dirty = dirty or A[t][j] != 0
            if dirty:
                p = _pivot_cross(A, t, m, n)
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % a:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
            p = _pivot_cross(A, t, m, n)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if track:
                U[t] = [-x for x in U[t]]
        diag.append(A[t][t])
        t += 1
    return diag, U, V, Vi


def _pivot_cross(A, t, m, n):
    """Smallest nonzero entry in row t or column t (from t on)."""
    best = None
    for j in range(t, n):
        if A[t][j]:
            key = (abs(A[t][j]), t, j)
            if best is None or key < best:
                best = key
    for i in range(t + 1, m):
        if A[i][t]:
            key = (abs(A[i][t]), i, t)
            if best is None or key < best:
                best = key
    return best


def in_integer_span(v, rows, moduli=()) -> bool:
    """Is `v` an integer combination of `rows`?

    `moduli` lists (coordinate, d) pairs whose coordinate is only defined
    modulo d (torsion coordinates).
    """
    n = len(v)
    gens = [list(r) for r in rows]
    for c, d in moduli:
        e = [0] * n
        e[c] = d
        gens.append(e)
    if not any(any(r) for r in gens):
        return not any(v)
    diag, U, V, Vi = smith_normal_form(gens)
    y = [sum(v[i] * V[i][j] for i in range(n)) for j in range(n)]
    for j in range(n):
        if j < len(diag):
            if y[j] % diag[j]:
                return False
        elif y[j]:
            return False
    return True


@dataclass(frozen=True, eq=False)
class AbelianInvariant:
    """First homology of a presentation: Z^rank + sum of Z/torsion.

    ``projection[g]`` is the H1 coordinate vector of generator g (free
    coordinates first, then one coordinate per torsion factor);
    ``lifts[k]`` is a generator-exponent vector whose class is basis
    vector k.
    """

    rank: int
    torsion: tuple
    projection: tuple
    lifts: tuple = field(repr=False)

    @property
    def dim(self) -> int:
        return self.rank + len(self.torsion)

    def reduce(self, coords) -> tuple:
        c = list(coords)
        for t, d in enumerate(self.torsion):
            c[self.rank + t] %= d
        return tuple(c)

    def classify(self, exponents) -> tuple:
        out = [0] * self.dim
        for g, e in enumerate(exponents):
            if e:
                for k, x in enumerate(self.projection[g]):
                    if x:
                        out[k] += e * x
        return self.reduce(out)

    def moduli(self):
        return [(self.rank + t, d) for t, d in enumerate(self.torsion)]

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


def relator_matrix(p: Presentation) -> list:
    g = p.n_generators
    return [w.exponents(g) for w in p.relators]


def abelianize(p: Presentation) -> AbelianInvariant:
    """Smith normal form of the relator exponent matrix.

    Unit entries are eliminated first with sparse substitutions (each one
    is a unimodular row/column operation); what remains goes through the
    dense Smith normal form.
    """
    g = p.n_generators
    elim = {}       # eliminated generator -> sparse expression in live generators
    order = []
    residual = []

    def substitute(row):
        for c in [c for c in row if c in elim]:
            coef = row.pop(c)
            for j, a in elim[c].items():
                s = row.get(j, 0) + coef * a
                if s:
                    row[j] = s
                else:
                    row.pop(j, None)
        return row

    for w in p.relators:
        row = {}
        for x in w:
            k = abs(x) - 1
            s = row.get(k, 0) + (1 if x > 0 else -1)
            if s:
                row[k] = s
            else:
                row.pop(k)
        row = substitute(row)
        if not row:
            continue
        units = [c for c, a in row.items() if a in (1, -1)]
        if not units:
            residual.append(row)
            continue
        c = min(units)
        s = row.pop(c)
        expr = {j: -s * a for j, a in row.items()}
        for d in order:
            e = elim[d]
            if c in e:
                coef = e.pop(c)
                for j, a in expr.items():
                    t = e.get(j, 0) + coef * a
                    if t:
                        e[j] = t
                    else:
                        e.pop(j, None)
        for r in residual:
            if c in r:
                coef = r.pop(c)
                for j, a in expr.items():
                    t = r.get(j, 0) + coef * a
                    if t:
                        r[j] = t
                    else:
                        r.pop(j, None)
        elim[c] = expr
        order.append(c)

    live = [k for k in range(g) if k not in elim]
    pos = {k: i for i, k in enumerate(live)}
    L = len(live)
    dense = [[0] * L for _ in residual]
    for r, row in zip(dense, residual):
        for k, a in row.items():
            r[pos[k]] = a
    dense = [r for r in dense if any(r)]
    if dense and L:
        diag, _, V, Vi = smith_normal_form(dense)
    else:
        diag = []
        V = [[int(i == j) for j in range(L)] for i in range(L)]
        Vi = [row[:] for row in V]
    r = len(diag)
    torsion_idx = [i for i in range(r) if diag[i] > 1]
    cols = list(range(r, L)) + torsion_idx
    torsion = tuple(diag[i] for i in torsion_idx)
    rank = L - r

    proj = [None] * g
    for k in live:
        proj[k] = tuple(V[pos[k]][c] for c in cols)
    for c in reversed(order):
        vec = [0] * len(cols)
        for j, a in elim[c].items():
            for t, x in enumerate(proj[j]):
                vec[t] += a * x
        proj[c] = tuple(vec)
    lifts = []
    for c in cols:
        lift = [0] * g
        for k in live:
            lift[k] = Vi[c][pos[k]]
        lifts.append(tuple(lift))
    inv = AbelianInvariant(rank, torsion, tuple(proj), tuple(lifts))
    # reduce projections of torsion coordinates
    proj = tuple(tuple(inv.reduce(v)) if torsion else v for v in proj)
    return AbelianInvariant(rank, torsion, proj, tuple(lifts))


def word_class(w, inv: AbelianInvariant) -> tuple:
    """H1 coordinates of a word."""
    return inv.classify(Word(w).exponents(len(inv.projection)))


@dataclass(frozen=True, eq=False)
class GroupMap:
    source: Presentation
    target: Presentation
    images: tuple

    def apply(self, w) -> Word:
        out = []
        for x in w:
            img = self.images[abs(x) - 1]
            out.extend(img if x > 0 else ~img)
        return Word(out)

    def compose(self, after: "GroupMap") -> "GroupMap":
        return GroupMap(self.source, after.target,
                        tuple(after.apply(w) for w in self.images))

    def abelian_matrix(self) -> list:
        """Integer matrix (target dim x source dim) on H1 coordinates."""
        return abelian_matrix(self.images, self.source.invariant, self.target.invariant)


def abelian_matrix(images, src: AbelianInvariant, tgt: AbelianInvariant) -> list:
    img_classes = [word_class(w, tgt) for w in images]
    cols = []
    for lift in src.lifts:
        v = [0] * tgt.dim
        for gidx, e in enumerate(lift):
            if e:
                for k, x in enumerate(img_classes[gidx]):
                    v[k] += e * x
        cols.append(tgt.reduce(v))
    return [[cols[j][i] for j in range(src.dim)] for i in range(tgt.dim)]


def induced_hom(f: SimplicialMap, p_src: Presentation, p_tgt: Presentation,
                *, check: bool = True) -> GroupMap:
    """Homomorphism on edge-path groups induced by a pointed simplicial map."""
    if f.domain != p_src.complex or f.codomain != p_tgt.complex:
        raise ValueError("map does not match the presentations' complexes")
    if f(p_src.base) != p_tgt.base:
        raise NotBasepointPreserving(f"{p_src.base} -> {f(p_src.base)} != {p_tgt.base}")
    images = []
    for g in range(p_src.n_generators):
        loop = f.map_chain(p_src.generator_loop(g))
        images.append(chain_to_word(loop, p_tgt))
    gm = GroupMap(p_src, p_tgt, tuple(images))
    if check:
        inv = p_tgt.invariant
        zero = (0,) * inv.dim
        for r in p_src.relators:
            if word_class(gm.apply(r), inv) != zero:
                raise RelatorImageNontrivial(f"relator {list(r)} maps to a nonzero class")
    return gm


def identity_hom(p: Presentation) -> GroupMap:
    return GroupMap(p, p, tuple(Word([g + 1]) for g in range(p.n_generators)))


def matmul(A, B) -> list:
    if not A or not B:
        rows = len(A)
        cols = len(B[0]) if B else 0
        return [[0] * cols for _ in range(rows)]
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
            for i in range(len(A))]


def reduce_matrix(M, inv: AbelianInvariant) -> list:
    """Reduce torsion rows of a target-side matrix modulo their orders."""
    if not M:
        return M
    cols = list(zip(*M)) if M[0] else []
    red = [inv.reduce(c) for c in cols]
    return [[red[j][i] for j in range(len(red))] for i in range(len(M))]
