import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainshape.complexes import (
    SimplicialComplex2,
    build_nerve_2skeleton,
    build_rips_2skeleton,
    extend_vertex_map,
    identity_map,
    to_dot,
)
from chainshape.errors import BasepointNotPreserved, InvalidComplex, NotSimplicial
from chainshape.fixtures import fixture_space, triangle_space
from chainshape.metric_cover import Cover, build_ball_cover, build_space
from oracle import rips_simplices


@pytest.fixture(scope="module")
def c12():
    X = fixture_space("circle")
    return X, build_ball_cover(X, 0.6)


def test_triangle_space_gives_a_filled_triangle():
    T = triangle_space()
    K = build_rips_2skeleton(T, build_ball_cover(T, 1))
    assert (K.n, len(K.edges), len(K.triangles)) == (3, 3, 1)
    assert K.euler_characteristic() == 1


def test_circle_counts(c12):
    X, cover = c12
    K = build_rips_2skeleton(X, cover)
    assert (len(K.edges), len(K.triangles)) == (24, 12)
    assert K.euler_characteristic() == 0
    N = build_nerve_2skeleton(cover)
    assert N.n == 12 and N.basepoint == cover.basepoint_element


def test_saturated_nerve_is_a_full_simplex():
    X = fixture_space("circle")
    N = build_nerve_2skeleton(build_ball_cover(X, 2.0))
    assert len(N.edges) == 66 and len(N.triangles) == 220


def test_triangles_need_their_edges():
    with pytest.raises(InvalidComplex):
        SimplicialComplex2((0, 1, 2), frozenset({(0, 1)}), frozenset({(0, 1, 2)}))
    K = SimplicialComplex2.from_simplices(3, (), [(2, 0, 1)])
    assert K.edges == {(0, 1), (1, 2), (0, 2)}
    with pytest.raises(InvalidComplex):
        SimplicialComplex2.from_simplices(2, [(0, 1)], basepoint=5)


def test_simplex_queries():
    K = SimplicialComplex2.from_simplices(4, [(2, 3)], [(0, 1, 2)])
    assert K.spans_simplex(0, 1, 2) and K.spans_simplex(1, 1, 0) and K.spans_simplex(3)
    assert not K.spans_simplex(1, 2, 3)
    assert K.apexes[(0, 1)] == (2,)
    assert K.component(3) == {0, 1, 2, 3}
    assert K.induced({0, 1, 3}).edges == {(0, 1)}
    assert K.with_basepoint(2).basepoint == 2 and K.with_basepoint(0) is K


def test_components_and_subcomplex():
    K = SimplicialComplex2.from_simplices(5, [(0, 1), (2, 3)])
    assert K.components() == [{0, 1}, {2, 3}, {4}]
    L = SimplicialComplex2.from_simplices(5, [(0, 1)])
    assert L.is_subcomplex_of(K) and not K.is_subcomplex_of(L)


def test_json_round_trip(c12):
    X, cover = c12
    K = build_rips_2skeleton(X, cover)
    assert SimplicialComplex2.from_json(K.to_json()) == K


def test_vertex_maps_are_checked():
    K = SimplicialComplex2.from_simplices(3, [(0, 1), (1, 2), (0, 2)])
    P = SimplicialComplex2.from_simplices(2, [(0, 1)])
    f = extend_vertex_map(K, P, [0, 1, 1])
    assert f.map_chain((0, 1, 2, 0)) == (0, 1, 1, 0)
    with pytest.raises(BasepointNotPreserved):
        extend_vertex_map(K, P, [1, 0, 0])
    E = SimplicialComplex2.from_simplices(3, [(0, 1), (1, 2)])
    with pytest.raises(NotSimplicial) as err:
        extend_vertex_map(K, E, [0, 1, 2])
    assert err.value.simplex == (0, 2)
    with pytest.raises(NotSimplicial):
        extend_vertex_map(SimplicialComplex2.from_simplices(3, (), [(0, 1, 2)]), K, [0, 1, 2])
    g = identity_map(K)
    assert f.compose(identity_map(P)).vertex_map == f.vertex_map == g.compose(f).vertex_map


def test_dot_output(c12):
    T = triangle_space()
    dot = to_dot(build_rips_2skeleton(T, build_ball_cover(T, 1)), "T3")
    assert dot.count(" -- ") == 3 and "doublecircle" in dot
    X, cover = c12
    dot = to_dot(build_rips_2skeleton(X, cover))
    assert dot.count(" -- ") == 24 and dot.count("label=") == 12
    assert dot == to_dot(build_rips_2skeleton(X, cover))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=10),
       st.integers(1, 4))
def test_rips_and_nerve_match_definitions(pts, r):
    X = build_space(pts)
    cover = build_ball_cover(X, r)
    K = build_rips_2skeleton(X, cover)
    edges, tris = rips_simplices(cover.elements)
    assert K.edges == edges and K.triangles == tris
    N = build_nerve_2skeleton(cover)
    els = cover.elements
    for i in range(len(els)):
        for j in range(i + 1, len(els)):
            assert ((i, j) in N.edges) == bool(els[i] & els[j])
    for t in list(N.triangles)[:50]:
        assert els[t[0]] & els[t[1]] & els[t[2]]


def test_nerve_of_a_hand_cover():
    c = Cover((frozenset({0, 1}), frozenset({1, 2}), frozenset({2, 0})), 0, 3)
    N = build_nerve_2skeleton(c)
    assert len(N.edges) == 3 and not N.triangles
