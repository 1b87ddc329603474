import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from chainshape.complexes import (
    SimplicialComplex2,
    SimplicialMap,
    build_rips_2skeleton,
    extend_vertex_map,
)
from chainshape.errors import (
    GeneratorOutOfRange,
    NotALoop,
    NotBasepointPreserving,
    RelatorImageNontrivial,
    StepNotEdge,
)
from chainshape.fixtures import COMPLEXES, fixture_space, rp2_complex, torus_complex
from chainshape.grouppres import (
    Word,
    abelianize,
    chain_to_word,
    edge_path_group,
    identity_hom,
    in_integer_span,
    induced_hom,
    path_to_word,
    presentation_at,
    smith_normal_form,
    word_class,
)
from chainshape.metric_cover import build_ball_cover
from oracle import h1_of


def test_words_reduce_freely():
    w = Word([1, 2, -2, -1, 3])
    assert list(w) == [3]
    assert ~Word([1, 2]) == Word([-2, -1])
    assert Word([1]) * Word([-1]) == Word()
    assert Word([1, 2]) ** -2 == Word([-2, -1, -2, -1])
    assert Word([2, 1, -2]).cyclically_reduced() == Word([1])
    assert Word([1, -2, 1]).exponents(2) == [2, -1]
    with pytest.raises(GeneratorOutOfRange):
        Word([3]).exponents(2)
    with pytest.raises(ValueError):
        Word([0])


def test_textbook_smith_form():
    diag, U, V, _ = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert diag == [2, 6, 12]


def _check_snf(A):
    diag, U, V, Vi = smith_normal_form(A)
    m, n = len(A), len(A[0])
    D = [[sum(U[i][k] * sum(A[k][l] * V[l][j] for l in range(n)) for k in range(m))
          for j in range(n)] for i in range(m)]
    for i in range(m):
        for j in range(n):
            assert D[i][j] == (diag[i] if i == j and i < len(diag) else 0)
    for a, b in zip(diag, diag[1:]):
        assert b % a == 0
    assert all(d > 0 for d in diag)
    I = [[sum(V[i][k] * Vi[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    assert I == [[int(i == j) for j in range(n)] for i in range(n)]
    return diag


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5).flatmap(lambda m: st.lists(
    st.lists(st.integers(-6, 6), min_size=4, max_size=4), min_size=m, max_size=m)))
def test_smith_form_against_sympy(A):
    diag = _check_snf(A)
    ref = [abs(int(x)) for x in invariant_factors(Matrix(A), domain=ZZ) if x != 0]
    assert diag == ref


def test_catalog_complexes_match_oracle():
    for name, make in COMPLEXES.items():
        K = make()
        inv = edge_path_group(K).invariant
        assert (inv.rank, inv.torsion) == h1_of(K), name
    assert edge_path_group(rp2_complex()).invariant.torsion == (2,)
    assert edge_path_group(torus_complex()).invariant.rank == 2


def test_circle_presentation_shape():
    X = fixture_space("circle")
    K = build_rips_2skeleton(X, build_ball_cover(X, 0.6))
    p = edge_path_group(K)
    assert p.n_generators == 13 and len(p.relators) == 12
    cycle = tuple(range(12)) + (0,)
    assert word_class(chain_to_word(cycle, p), p.invariant) in ((1,), (-1,))
    for g in range(p.n_generators):
        loop = p.generator_loop(g)
        assert chain_to_word(loop, p) == Word([g + 1])


def test_words_need_loops_on_edges():
    X = fixture_space("circle")
    K = build_rips_2skeleton(X, build_ball_cover(X, 0.6))
    p = edge_path_group(K)
    with pytest.raises(NotALoop):
        chain_to_word((0, 1), p)
    with pytest.raises(StepNotEdge) as err:
        chain_to_word((0, 1, 5, 0), p)
    assert err.value.args
    assert path_to_word(p.tree_path(5), p) == Word()


def test_rebased_presentation_has_the_same_homology():
    K = torus_complex()
    for b in range(K.n):
        p = presentation_at(K, b)
        assert p.base == b and p.invariant.rank == 2


def test_integer_span_respects_torsion():
    assert in_integer_span((2, 0), [(1, 0)])
    assert not in_integer_span((1, 1), [(1, 0)])
    assert in_integer_span((0, 3), [(1, 0)], moduli=[(1, 3)])
    assert in_integer_span((0, 0), [])
    assert not in_integer_span((1,), [(2,)])


def test_induced_hom_of_bonding_kills_the_circle():
    X = fixture_space("circle")
    fine = build_rips_2skeleton(X, build_ball_cover(X, 0.6))
    coarse = build_rips_2skeleton(X, build_ball_cover(X, 2.0))
    f = extend_vertex_map(fine, coarse, range(12))
    h = induced_hom(f, edge_path_group(fine), edge_path_group(coarse))
    assert h.abelian_matrix() == []
    ident = identity_hom(edge_path_group(fine))
    assert ident.abelian_matrix() == [[1]]
    assert ident.compose(ident).images == ident.images


def test_induced_hom_checks_basepoints_and_relators():
    K = torus_complex()
    p = edge_path_group(K)
    shifted = SimplicialMap(K, K, tuple((v + 3) % 7 for v in range(7)))
    with pytest.raises(NotBasepointPreserving):
        induced_hom(shifted, p, p)
    hollow = SimplicialComplex2.from_simplices(3, [(0, 1), (1, 2), (0, 2)])
    filled = SimplicialComplex2.from_simplices(3, (), [(0, 1, 2)])
    squash = SimplicialMap(filled, hollow, (0, 1, 2))
    with pytest.raises(RelatorImageNontrivial):
        induced_hom(squash, edge_path_group(filled), edge_path_group(hollow))


def _random_complex(rng, n):
    verts = range(n)
    edges = [e for e in combinations(verts, 2) if rng.random() < 0.5]
    es = set(edges)
    tris = [t for t in combinations(verts, 3)
            if {(t[0], t[1]), (t[1], t[2]), (t[0], t[2])} <= es and rng.random() < 0.5]
    return SimplicialComplex2.from_simplices(n, edges, tris)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 9))
def test_random_complexes_match_oracle(seed, n):
    K = _random_complex(random.Random(seed), n)
    inv = edge_path_group(K).invariant
    assert (inv.rank, inv.torsion) == h1_of(K)
    assert abelianize(edge_path_group(K)).dim == inv.dim
