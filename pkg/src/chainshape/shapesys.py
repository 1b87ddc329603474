"""Cross-scale structure: towers, Rips/nerve maps, Spanier quotients, lassos.

The finest scale of a tower stands in for the space itself: its Rips
complex plays the role of the ambient space whose loops are compared with
coarser scales (bonding maps) and with small-loop subgroups (Spanier
quotients).  All group-level verdicts that certify a *difference* are
abelian; they cannot see classes that differ by a commutator.
"""

from __future__ import annotations

import os
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Sequence

from .chains import (
    DEFAULT_BUDGET,
    Chain,
    HomotopyVerdict,
    Move,
    No,
    Unknown,
    Yes,
    _apply,
    chain_homotopic,
    concat,
    concat_all,
    invert_moves,
    inverse,
    ladder_moves,
    replay,
)
from .complexes import (
    SimplicialComplex2,
    SimplicialMap,
    build_nerve_2skeleton,
    build_rips_2skeleton,
    extend_vertex_map,
)
from .errors import (
    BasepointMismatch,
    EndpointMismatch,
    IllegalMove,
    MovesDoNotNullhomotope,
    NonMonotoneScales,
    NotRefinement,
    RefinementMissing,
)
from .grouppres import (
    AbelianInvariant,
    GroupMap,
    Presentation,
    Word,
    abelian_matrix,
    chain_to_word,
    edge_path_group,
    in_integer_span,
    induced_hom,
    matmul,
    presentation_at,
    reduce_matrix,
    word_class,
)
from .metric_cover import (
    Cover,
    FiniteMetricSpace,
    RefinementWitness,
    build_ball_cover,
    exact_radius,
    refines,
    star_cover,
)

SCHEMA = "chainshape.shape_report/1"


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("CHAINSHAPE_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class ScaleLevel:
    scale: Fraction
    cover: Cover
    rips: SimplicialComplex2
    star_nerve: SimplicialComplex2

    @cached_property
    def presentation(self) -> Presentation:
        return edge_path_group(self.rips)

    @property
    def invariant(self) -> AbelianInvariant:
        return self.presentation.invariant


@dataclass(frozen=True, eq=False)
class ScaleTower:
    """Levels ordered coarse to fine; bonding[i] maps level i+1 into level i."""

    space: FiniteMetricSpace
    scales: tuple
    levels: tuple
    bonding: tuple

    def __len__(self):
        return len(self.levels)

    @property
    def finest(self) -> ScaleLevel:
        return self.levels[-1]

    def bonding_matrix(self, i: int) -> list:
        """H1 matrix of the bonding map from level i+1 to level i."""
        return self.bonding[i].abelian_matrix()

    def composite_matrix(self, fine: int, coarse: int) -> list:
        """H1 matrix of the composite bonding map from level `fine` to `coarse`."""
        if coarse > fine:
            raise ValueError("coarse index must not exceed fine index")
        dim = self.levels[fine].invariant.dim
        M = [[int(i == j) for j in range(dim)] for i in range(dim)]
        for k in range(fine - 1, coarse - 1, -1):
            M = reduce_matrix(matmul(self.bonding_matrix(k), M), self.levels[k].invariant)
        return M


def _build_level(space, eps):
    cover = build_ball_cover(space, eps)
    rips = build_rips_2skeleton(space, cover)
    star_nerve = build_nerve_2skeleton(star_cover(cover))
    level = ScaleLevel(cover.scale, cover, rips, star_nerve)
    level.presentation.invariant
    return level


def build_tower(space: FiniteMetricSpace, scales: Sequence, *, workers: int | None = None
                ) -> ScaleTower:
    """Ball covers, Rips and star-nerve complexes, and bonding maps per scale."""
    exact = [exact_radius(s) for s in scales]
    if not exact:
        raise NonMonotoneScales("no scales given")
    if any(s <= 0 for s in exact):
        raise NonMonotoneScales("scales must be positive")
    if any(a <= b for a, b in zip(exact, exact[1:])):
        raise NonMonotoneScales(f"scales must strictly decrease: {[str(s) for s in exact]}")
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(exact) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            levels = tuple(ex.map(lambda e: _build_level(space, e), exact))
    else:
        levels = tuple(_build_level(space, e) for e in exact)
    bonding = []
    for i in range(len(levels) - 1):
        coarse, fine = levels[i], levels[i + 1]
        f = extend_vertex_map(fine.rips, coarse.rips, range(space.n))
        bonding.append(induced_hom(f, fine.presentation, coarse.presentation))
    return ScaleTower(space, tuple(exact), levels, tuple(bonding))


# Rips <-> nerve correspondence

def rips_to_nerve(space: FiniteMetricSpace | None, cover: Cover) -> SimplicialMap:
    """R(X, U) -> N(St U): a point goes to the star of its lowest containing element."""
    R = build_rips_2skeleton(space, cover)
    N = build_nerve_2skeleton(star_cover(cover))
    vm = []
    for x in range(cover.n_points):
        if x == cover.basepoint:
            vm.append(cover.basepoint_element)
        else:
            vm.append(min(k for k, e in enumerate(cover.elements) if x in e))
    return extend_vertex_map(R, N, vm)


def nerve_to_rips(cover: Cover, space: FiniteMetricSpace | None = None) -> SimplicialMap:
    """N(U) -> R(X, St U): an element goes to its lowest point."""
    N = build_nerve_2skeleton(cover)
    R = build_rips_2skeleton(space, star_cover(cover))
    vm = []
    for k, e in enumerate(cover.elements):
        if k == cover.basepoint_element:
            vm.append(cover.basepoint)
        else:
            vm.append(min(e))
    return extend_vertex_map(N, R, vm)


@dataclass
class DiagramReport:
    rips_verdicts: list = field(default_factory=list)
    nerve_verdicts: list = field(default_factory=list)
    rips_matrix_equal: bool = True
    nerve_matrix_equal: bool = True

    @property
    def verdicts(self) -> list:
        return self.rips_verdicts + self.nerve_verdicts

    @property
    def commutes(self) -> bool:
        return (all(v.yes for v in self.verdicts) and self.rips_matrix_equal
                and self.nerve_matrix_equal)

    def counts(self) -> Counter:
        return Counter(v.status for v in self.verdicts)

    def to_json(self) -> dict:
        return {
            "rips_generators": [v.status for v in self.rips_verdicts],
            "nerve_generators": [v.status for v in self.nerve_verdicts],
            "rips_matrix_equal": self.rips_matrix_equal,
            "nerve_matrix_equal": self.nerve_matrix_equal,
            "commutes": self.commutes,
        }


def _compare_loops(x, y, K, budget) -> HomotopyVerdict:
    try:
        moves = ladder_moves(x, y, K)
    except IllegalMove:
        return chain_homotopic(Chain(x, K), Chain(y, K), budget)
    return Yes(moves, note="ladder")


def check_diagram_commutes(space: FiniteMetricSpace | None, cover: Cover,
                           budget: int = DEFAULT_BUDGET) -> DiagramReport:
    """Check both triangles relating U, St U and St St U.

    Every generator loop is pushed both ways round the triangle and the two
    images are compared by an explicit ladder homotopy (each rung lies in
    one element of St St U), falling back to search.  The H1 matrices of
    the two routes are compared exactly as well.
    """
    s1 = star_cover(cover)
    s2 = star_cover(s1)
    rep = DiagramReport()

    # R(X,U) -> N(St U) -> R(X, St St U)  versus  inclusion R(X,U) -> R(X,St St U)
    f1 = rips_to_nerve(space, cover)
    g1 = nerve_to_rips(s1, space)
    R_u, R_s2 = f1.domain, g1.codomain
    inc = extend_vertex_map(R_u, R_s2, range(R_u.n))
    p_u, p_s2 = edge_path_group(R_u), edge_path_group(R_s2)
    for g in range(p_u.n_generators):
        x = tuple(p_u.generator_loop(g))
        y = g1.map_chain(f1.map_chain(x))
        rep.rips_verdicts.append(_compare_loops(x, y, R_s2, budget))
    p_n1 = edge_path_group(f1.codomain)
    via = matmul(induced_hom(g1, p_n1, p_s2).abelian_matrix(),
                 induced_hom(f1, p_u, p_n1).abelian_matrix())
    direct = induced_hom(inc, p_u, p_s2).abelian_matrix()
    rep.rips_matrix_equal = reduce_matrix(via, p_s2.invariant) == direct

    # N(U) -> R(X, St U) -> N(St St U)  versus  index map N(U) -> N(St St U)
    f2 = nerve_to_rips(cover, space)
    g2 = rips_to_nerve(space, s1)
    N_u, N_s2 = f2.domain, g2.codomain
    bond = extend_vertex_map(N_u, N_s2, range(N_u.n))
    q_u, q_s2 = edge_path_group(N_u), edge_path_group(N_s2)
    for g in range(q_u.n_generators):
        x = tuple(q_u.generator_loop(g))
        y = g2.map_chain(f2.map_chain(x))
        rep.nerve_verdicts.append(_compare_loops(x, y, N_s2, budget))
    q_r1 = edge_path_group(f2.codomain)
    via = matmul(induced_hom(g2, q_r1, q_s2).abelian_matrix(),
                 induced_hom(f2, q_u, q_r1).abelian_matrix())
    direct = induced_hom(bond, q_u, q_s2).abelian_matrix()
    rep.nerve_matrix_equal = reduce_matrix(via, q_s2.invariant) == direct
    return rep


# Spanier subgroups

def _bfs_tree(K: SimplicialComplex2, verts: frozenset, root: int) -> dict:
    parent = {root: None}
    queue = deque([root])
    nbrs = K.sorted_neighbors
    while queue:
        u = queue.popleft()
        for w in nbrs[u]:
            if w in verts and w not in parent:
                parent[w] = u
                queue.append(w)
    return parent


def _path_to_root(parent, v):
    path = [v]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path


def small_loop_generators(p: Presentation, verts) -> list:
    """Based loops generating the image of the loops inside `verts`.

    For each component of the induced subcomplex: a BFS tree from the
    ambient base (when present) or the lowest vertex, and one loop per
    non-tree edge, conjugated back to the base along the ambient tree.
    """
    K = p.complex
    verts = frozenset(verts) & p.component
    loops = []
    left = set(verts)
    while left:
        root = p.base if p.base in left else min(left)
        parent = _bfs_tree(K, verts, root)
        comp = frozenset(parent)
        left -= comp
        tree = {(min(u, w), max(u, w)) for u, w in parent.items() if w is not None}
        to_root = p.tree_path(root)
        for u, v in sorted(e for e in K.edges if e[0] in comp and e[1] in comp):
            if (u, v) in tree:
                continue
            up = _path_to_root(parent, u)[::-1]
            down = _path_to_root(parent, v)
            loops.append(tuple(to_root[:-1]) + tuple(up) + tuple(down) + tuple(to_root[::-1][1:]))
    return loops


def spanier_quotient(fine: Presentation, coarse: Cover) -> Presentation:
    """Fine presentation with every coarse-small loop killed.

    One relator per generating loop of each induced subcomplex
    R(X, U_fine)|U for U in the coarse cover, read at the fine scale.
    """
    if coarse.n_points != fine.complex.n:
        raise ValueError("cover and presentation are over different spaces")
    seen = set(fine.relators)
    extra = []
    for e in coarse.elements:
        for loop in small_loop_generators(fine, e):
            w = chain_to_word(loop, fine)
            if w and w not in seen and ~w not in seen:
                seen.add(w)
                extra.append(w)
    return fine.with_relators(extra)


def _substitute(w, g, sub, inv_sub):
    out = []
    for x in w:
        if abs(x) == g:
            out.extend(sub if x > 0 else inv_sub)
        else:
            out.append(x)
    return Word(out)


def tietze_trivial(w: Word, relators: Sequence[Word], budget: int = 200_000) -> bool:
    """Try to rewrite `w` to the empty word by eliminating generators.

    Repeatedly picks the shortest relator in which some generator occurs
    exactly once, solves for that generator and substitutes it everywhere.
    Returns True only on an actual reduction to the empty word.
    """
    w = Word(w)
    rels = []
    seen = set()
    for r in relators:
        r = Word(r).cyclically_reduced()
        if r and r not in seen:
            seen.add(r)
            rels.append(r)
    work = 0
    while w and rels:
        best = None
        for idx, r in enumerate(rels):
            if best is not None and len(r) >= best[0]:
                continue
            counts = Counter(abs(x) for x in r)
            singles = [g for g, c in counts.items() if c == 1]
            if singles:
                best = (len(r), idx, min(singles))
                if len(r) == 1:
                    break
        if best is None:
            return False
        _, idx, g = best
        r = rels.pop(idx)
        pos = next(i for i, x in enumerate(r) if abs(x) == g)
        a, b = Word(r[:pos]), Word(r[pos + 1:])
        sub = (~a) * (~b) if r[pos] > 0 else b * a
        inv_sub = ~sub
        w = _substitute(w, g, sub, inv_sub)
        new = []
        for s in rels:
            if any(abs(x) == g for x in s):
                s = _substitute(s, g, sub, inv_sub).cyclically_reduced()
            work += len(s)
            if s and s not in seen:
                seen.add(s)
                new.append(s)
            elif s:
                new.append(s)
        rels = new
        work += len(w)
        if work > budget:
            return not w
    return not w


def word_to_loop(w, p: Presentation) -> tuple:
    """A vertex loop at the base whose word is `w`."""
    out = [p.base]
    for x in w:
        loop = p.generator_loop(abs(x) - 1)
        if x < 0:
            loop = loop[::-1]
        out.extend(loop[1:])
    return tuple(out)


def spanier_membership(w, q: Presentation, budget: int = DEFAULT_BUDGET) -> HomotopyVerdict:
    """Is the class of `w` trivial modulo the Spanier relators of `q`?

    No comes only from a nonzero H1 class; Yes from a rewriting to the empty
    word, or from a nullhomotopy of the corresponding loop at the fine scale.
    """
    w = Word(w)
    if not w:
        return Yes(note="empty word")
    inv = q.invariant
    cls = word_class(w, inv)
    zero = (0,) * inv.dim
    if cls != zero:
        return No((cls, zero))
    if tietze_trivial(w, q.relators):
        return Yes(note="rewriting")
    K = q.complex
    loop = Chain(word_to_loop(w, q), K)
    v = chain_homotopic(loop, Chain((q.base,), K), budget, check_abelian=False)
    if v.yes:
        return Yes(v.moves, note="fine nullhomotopy")
    return Unknown(v.expanded)


# neighbour predicates

def _nbhd_loops(p: Presentation, nbhd, x) -> list:
    """Generator loops at x of the subcomplex induced on nbhd."""
    K = p.complex
    verts = frozenset(nbhd)
    parent = _bfs_tree(K, verts, x)
    comp = frozenset(parent)
    tree = {(min(u, w), max(u, w)) for u, w in parent.items() if w is not None}
    loops = []
    for u, v in sorted(e for e in K.edges if e[0] in comp and e[1] in comp):
        if (u, v) not in tree:
            loops.append(tuple(_path_to_root(parent, u)[::-1]) + tuple(_path_to_root(parent, v)))
    return loops


def whisker_neighbor(alpha: Chain, beta: Chain, nbhd, budget: int = DEFAULT_BUDGET
                     ) -> HomotopyVerdict:
    """Is alpha^-1 beta homotopic, endpoints fixed, to a chain inside nbhd?"""
    if alpha.start != beta.start or alpha.end != beta.end:
        raise EndpointMismatch("alpha and beta must share both endpoints")
    x = alpha.end
    nbhd = frozenset(nbhd)
    if x not in nbhd:
        raise ValueError("the neighbourhood must contain the common endpoint")
    gamma = concat(inverse(alpha), beta)
    K = gamma.complex
    p = presentation_at(K, x)
    inv = p.invariant
    cls = word_class(chain_to_word(gamma, p), inv)
    zero = (0,) * inv.dim
    loops = _nbhd_loops(p, nbhd, x)
    spans = [word_class(chain_to_word(l, p), inv) for l in loops]
    if not in_integer_span(cls, spans, inv.moduli()):
        return No((cls, zero), note="class outside the neighbourhood's image")
    candidates = [(x,)] if cls == zero else []
    for l, c in zip(loops, spans):
        if c == cls:
            candidates.append(l)
        if inv.reduce([-t for t in c]) == cls:
            candidates.append(l[::-1])
    expanded = 0
    for cand in candidates:
        v = chain_homotopic(gamma, Chain(cand, K), budget, check_abelian=False)
        if v.yes:
            return v
        expanded += v.expanded
    return Unknown(expanded, note="no candidate chain in the neighbourhood confirmed")


def lasso_neighbor(alpha: Chain, beta: Chain, coarse: Cover, nbhd,
                   budget: int = DEFAULT_BUDGET) -> HomotopyVerdict:
    """Is alpha^-1 beta a coarse-small lasso product followed by a chain in nbhd?"""
    if alpha.start != beta.start or alpha.end != beta.end:
        raise EndpointMismatch("alpha and beta must share both endpoints")
    x = alpha.end
    nbhd = frozenset(nbhd)
    if x not in nbhd:
        raise ValueError("the neighbourhood must contain the common endpoint")
    K = alpha.complex
    p = presentation_at(K, alpha.start)
    q = spanier_quotient(p, coarse)
    inv = q.invariant
    ab = concat(beta, inverse(alpha))
    cls = word_class(chain_to_word(ab, p), inv)
    px = presentation_at(K, x)
    loops = _nbhd_loops(px, nbhd, x)
    conj = [tuple(alpha.vertices) + l[1:] + tuple(alpha.vertices[::-1])[1:] for l in loops]
    spans = [word_class(chain_to_word(c, p), inv) for c in conj]
    if not in_integer_span(cls, spans, inv.moduli()):
        return No((cls, (0,) * inv.dim), note="class outside the small-loop quotient image")
    expanded = 0
    for l in [(x,)] + loops + [l[::-1] for l in loops]:
        c = Chain(l, K)
        w = chain_to_word(concat_all([beta, inverse(c), inverse(alpha)]), p)
        v = spanier_membership(w, q, budget)
        if v.yes:
            return Yes(note=f"via neighbourhood loop {list(l)}")
        expanded += v.expanded
    return Unknown(expanded)


# lasso factorization

@dataclass(frozen=True)
class Lasso:
    conjugator: Chain
    loop: Chain
    fine_element: int
    coarse_element: int

    def chain(self) -> Chain:
        return concat_all([self.conjugator, self.loop, inverse(self.conjugator)])

    def to_json(self) -> dict:
        return {"conjugator": self.conjugator.to_json(), "loop": self.loop.to_json(),
                "fine_element": self.fine_element, "coarse_element": self.coarse_element}


@dataclass
class Factorization:
    lassos: list
    alpha: Chain
    verification: HomotopyVerdict
    total: Chain

    def __iter__(self):
        return iter((self.lassos, self.alpha))

    def to_json(self) -> dict:
        return {"lassos": [l.to_json() for l in self.lassos],
                "alpha": self.alpha.to_json(),
                "verification": self.verification.to_json()}


def _contract_lasso_product(total: tuple, lassos, K) -> list:
    """Moves taking a product of lassos (ending at the base) to the base."""
    c = total
    moves = []

    def do(m):
        nonlocal c
        c = _apply(c, m, K)
        moves.append(m)

    for lasso in lassos:
        k = len(lasso.conjugator) - 1
        m = len(lasso.loop) - 1
        for _ in range(m - 1):
            do(Move("del", k + 1, c[k + 1]))
        do(Move("del", k + 1, c[k + 1]))
        for j in range(k, 0, -1):
            do(Move("del", j, c[j]))
            do(Move("del", j, c[j]))
    while len(c) > 1 and c[1] == c[0]:
        do(Move("del", 1, c[1]))
    return moves


def lasso_factorization(beta: Chain, moves: Sequence[Move], fine: Cover, coarse: Cover,
                        witness: RefinementWitness | None = None) -> Factorization:
    """Split a nullhomotopic fine loop into coarse-small lassos.

    Every vertex addition or deletion of the nullhomotopy contributes one
    lasso: the prefix of the current chain up to the move, followed by the
    small triangle loop the move sweeps across.  `witness` sends each
    element of St(fine) into a coarse element.
    """
    K = beta.complex
    if witness is None:
        try:
            witness = refines(star_cover(fine), coarse)
        except (NotRefinement, BasepointMismatch) as exc:
            raise RefinementMissing(str(exc)) from exc
    if len(witness) != len(fine):
        raise RefinementMissing("witness does not match the fine cover")
    x0 = beta.start
    if not beta.is_loop():
        raise MovesDoNotNullhomotope("beta is not a loop")
    cur = beta.vertices
    lassos = []
    for m in moves:
        try:
            nxt = _apply(cur, m, K)
        except IllegalMove as exc:
            raise MovesDoNotNullhomotope(str(exc)) from exc
        p, n = m.pos, len(cur)
        loop = None
        if m.op == "add" and 0 < p < n:
            loop = (cur[p - 1], cur[p], m.v, cur[p - 1])
        elif m.op == "del" and 0 < p < n - 1:
            loop = (cur[p - 1], cur[p], cur[p + 1], cur[p - 1])
        if loop is not None and len(set(loop)) > 1:
            verts = set(loop)
            k = next(i for i, e in enumerate(fine.elements) if verts <= e)
            loop_chain = Chain(loop, K).collapsed()
            lassos.append(Lasso(Chain(cur[:p], K), loop_chain, k, witness[k]))
        cur = nxt
    if cur != (x0,):
        raise MovesDoNotNullhomotope(f"moves end at {cur}, not at the constant chain")
    alpha = Chain((x0,), K)
    total = concat_all([l.chain() for l in lassos] + [alpha])
    try:
        to_base = _contract_lasso_product(total.vertices, lassos, K)
        witness_moves = list(moves) + invert_moves(to_base)
        ok = replay(beta, witness_moves).vertices == total.vertices
        verdict = Yes(witness_moves, note="explicit") if ok else None
    except IllegalMove:
        verdict = None
    if verdict is None:
        verdict = chain_homotopic(beta, total)
    return Factorization(lassos, alpha, verdict, total)


def random_nullhomotopic_loop(K: SimplicialComplex2, rng, n_moves: int = 6):
    """A loop at the base grown by random legal additions, with its nullhomotopy."""
    c = (K.basepoint,)
    grow = []
    nbrs = K.sorted_neighbors
    apexes = K.apexes
    for _ in range(n_moves):
        options = []
        for i in range(len(c)):
            for y in nbrs[c[i]]:
                options.append((Move("add", i + 1, c[i]), Move("add", i + 1, y)))
        for i in range(len(c) - 1):
            l, r = c[i], c[i + 1]
            if l != r:
                for v in apexes.get((min(l, r), max(l, r)), ()):
                    options.append((Move("add", i + 1, v),))
        if not options:
            break
        for m in options[rng.randrange(len(options))]:
            c = _apply(c, m, K)
            grow.append(m)
    return Chain(c, K), invert_moves(grow)


# reports

def _rank_q(rows) -> int:
    M = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(M[0]) if M else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][col]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][col]:
                f = M[i][col] / M[rank][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def is_injective(M, src: AbelianInvariant, tgt: AbelianInvariant) -> bool:
    """Does the H1 matrix M (target x source coordinates) have trivial kernel?"""
    r = src.rank
    if r:
        free_rows = [row[:r] for row in M[:tgt.rank]]
        if _rank_q(free_rows) < r:
            return False
    if src.torsion:
        total = 1
        for d in src.torsion:
            total *= d
        if total > 10**5:
            raise ValueError("torsion too large to enumerate")
        for b in product(*(range(d) for d in src.torsion)):
            if not any(b):
                continue
            img = [sum(M[i][r + j] * b[j] for j in range(len(b))) for i in range(tgt.dim)]
            if not any(tgt.reduce(img)):
                return False
    return True


@dataclass
class ShapeReport:
    data: dict

    @property
    def shape_injective(self) -> bool:
        return self.data["flags"]["shape_injective"]

    @property
    def lasso_hausdorff(self) -> bool:
        return self.data["flags"]["lasso_hausdorff"]

    @property
    def flags_agree(self) -> bool:
        return self.shape_injective == self.lasso_hausdorff

    def to_json(self) -> dict:
        return self.data


def lift_word(lift) -> Word:
    letters = []
    for g, e in enumerate(lift):
        letters.extend([g + 1 if e > 0 else -(g + 1)] * abs(e))
    return Word(letters)


def filtration_report(space: FiniteMetricSpace, scales: Sequence, *, diagrams: bool = False,
                      spanier: bool = True, budget: int = DEFAULT_BUDGET,
                      tower: ScaleTower | None = None) -> ShapeReport:
    """Invariants, bonding matrices and the two injectivity surrogates.

    A finest-scale class is shape-trivial when it dies at every coarser
    scale and lasso-trivial when it lies in every coarser Spanier subgroup.
    For nested ball covers both families are monotone, so each reduces to
    the next-to-finest scale.
    """
    tower = tower or build_tower(space, scales)
    levels = tower.levels
    fine = tower.finest
    finv = fine.invariant
    data = {
        "schema": SCHEMA,
        "precision": str(space.precision),
        "n_points": space.n,
        "basepoint": space.basepoint,
        "scales": [str(s) for s in tower.scales],
        "levels": [],
        "bonding": [],
        "survival": [],
        "spanier": [],
        "notes": ["Group verdicts that separate classes are abelian; classes differing "
                  "by a commutator are not distinguished."],
    }
    for lv in levels:
        p = lv.presentation
        data["levels"].append({
            "scale": str(lv.scale),
            "vertices": lv.rips.n, "edges": len(lv.rips.edges),
            "triangles": len(lv.rips.triangles),
            "generators": p.n_generators, "relators": len(p.relators),
            "ignored_vertices": lv.rips.n - len(p.component),
            "star_nerve": {"vertices": lv.star_nerve.n, "edges": len(lv.star_nerve.edges),
                           "triangles": len(lv.star_nerve.triangles)},
            "h1": lv.invariant.to_json(),
        })
    for i in range(len(levels) - 1):
        data["bonding"].append({"from": str(levels[i + 1].scale), "to": str(levels[i].scale),
                                "matrix": tower.bonding_matrix(i)})
    f = len(levels) - 1
    composites = {i: tower.composite_matrix(f, i) for i in range(f)}
    for k in range(finv.dim):
        data["survival"].append({
            "class": k,
            "images": {str(levels[i].scale): [row[k] for row in composites[i]] for i in range(f)},
            "survives_all": all(any(row[k] for row in composites[i]) for i in range(f)),
        })
    shape_inj = True if f == 0 else is_injective(composites[f - 1], finv, levels[f - 1].invariant)
    lasso_h = True
    if spanier:
        for i in range(f):
            q = spanier_quotient(fine.presentation, levels[i].cover)
            qinv = q.invariant
            ident = [Word([g + 1]) for g in range(fine.presentation.n_generators)]
            M = abelian_matrix(ident, finv, qinv)
            verdicts = [spanier_membership(lift_word(l), q, budget).status for l in finv.lifts]
            inj = is_injective(M, finv, qinv)
            data["spanier"].append({
                "scale": str(levels[i].scale),
                "extra_relators": len(q.relators) - q.n_base_relators,
                "quotient_h1": qinv.to_json(),
                "class_killed": verdicts,
                "injective": inj,
            })
            if i == f - 1:
                lasso_h = inj
    data["flags"] = {"shape_injective": shape_inj, "lasso_hausdorff": lasso_h,
                     "agree": shape_inj == lasso_h}
    if diagrams:
        data["diagrams"] = [{"scale": str(lv.scale),
                             **check_diagram_commutes(space, lv.cover, budget).to_json()}
                            for lv in levels]
    return ShapeReport(data)


def tower_to_dot(tower: ScaleTower, name: str = "tower") -> str:
    """Digraph with one cluster per scale and an arrow per bonding map."""
    lines = [f'digraph "{name}" {{', "  rankdir=LR;"]
    for i, lv in enumerate(tower.levels):
        inv = lv.invariant
        label = f"H1 rank {inv.rank}" + (f" torsion {list(inv.torsion)}" if inv.torsion else "")
        lines.append(f"  subgraph cluster_{i} {{")
        lines.append(f'    label="scale {lv.scale}";')
        lines.append(f'    s{i} [label="{label}\\nV={lv.rips.n} E={len(lv.rips.edges)} '
                     f'T={len(lv.rips.triangles)}"];')
        lines.append("  }")
    for i in range(len(tower.levels) - 1):
        M = tower.bonding_matrix(i)
        lines.append(f'  s{i + 1} -> s{i} [label="{M}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
