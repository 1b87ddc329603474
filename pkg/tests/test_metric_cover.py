import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainshape.errors import (
    BadBasepoint,
    BasepointMismatch,
    InvalidCover,
    NonPositiveRadius,
    NonSymmetric,
    NotRefinement,
    NotStarRefinement,
    TriangleInequalityViolation,
)
from chainshape.fixtures import fixture_space, triangle_space
from chainshape.metric_cover import (
    Cover,
    build_ball_cover,
    build_space,
    check_triangle_inequality,
    exact_radius,
    is_refinement,
    is_star_refinement,
    refines,
    star_cover,
    star_of_element,
    star_of_point,
    star_refines,
    to_exact,
)
from oracle import balls, element_star, point_star


def test_floats_snap_to_the_precision_grid():
    assert to_exact(0.1) == Fraction(1, 10)
    assert to_exact(1 / 3) == Fraction(333333333, 10**9)
    assert to_exact("1/3") == Fraction(1, 3)
    assert to_exact(7) == 7


def test_float_radius_reads_its_decimal_text():
    assert exact_radius(0.6) == Fraction(3, 5)
    assert exact_radius("2.0") == 2


def test_circle_chord_matches_closed_form():
    C = fixture_space("circle")
    assert C.n == 12
    assert C.dist(0, 1) == pytest.approx(2 * math.sin(math.pi / 12), abs=1e-8)
    assert C.exact_dist(0, 0) == 0


def test_matrix_space_is_validated():
    with pytest.raises(NonSymmetric):
        build_space(matrix=[[0, 1], [2, 0]])
    with pytest.raises(NonSymmetric):
        build_space(matrix=[[1, 1], [1, 0]])
    with pytest.raises(TriangleInequalityViolation) as err:
        build_space(matrix=[[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert len(err.value.triple) == 3
    with pytest.raises(BadBasepoint):
        build_space(matrix=[[0]], basepoint=1)
    with pytest.raises(ValueError):
        build_space([(0, 0), (1,)])


def test_coordinate_metrics():
    pts = [(0, 0), (3, 4)]
    assert build_space(pts).exact_dist(0, 1) == 5
    assert build_space(pts, metric="l1").exact_dist(0, 1) == 7
    assert build_space(pts, metric="chebyshev").exact_dist(0, 1) == 4
    check_triangle_inequality(build_space(pts, metric="l1"))


def test_ball_cover_on_circle():
    C = fixture_space("circle")
    cover = build_ball_cover(C, 0.6)
    assert all(len(e) == 3 for e in cover.elements)
    assert cover.elements[0] == {11, 0, 1}
    assert cover.basepoint_element == 0
    sat = build_ball_cover(C, 2.0)
    # snapped coordinates put some antipodal pairs a hair beyond distance 2
    assert sat.elements[0] == frozenset(range(12))
    assert any(len(e) == 11 for e in sat.elements)
    with pytest.raises(NonPositiveRadius):
        build_ball_cover(C, 0)


def test_cover_validation():
    with pytest.raises(InvalidCover):
        Cover((frozenset({0}),), 0, 2)
    with pytest.raises(InvalidCover):
        Cover((frozenset({1}), frozenset({0})), 0, 2)


def test_stars_on_circle():
    cover = build_ball_cover(fixture_space("circle"), 0.6)
    assert star_of_element(cover, 0) == {9, 10, 11, 0, 1, 2, 3}
    assert star_of_point(cover, 0) == {10, 11, 0, 1, 2}
    sc = star_cover(cover)
    assert len(sc) == 12 and sc.basepoint_element == 0


def test_refinement_witness_pairs_basepoints_first():
    C = fixture_space("circle")
    fine, coarse = build_ball_cover(C, 0.6), build_ball_cover(C, 2)
    w = refines(fine, coarse)
    assert w[0] == 0 and set(w.assignment) == {0}
    assert not is_refinement(coarse, fine)
    with pytest.raises(BasepointMismatch):
        refines(coarse, fine)
    with pytest.raises(NotRefinement):
        refines(coarse, fine, respect_basepoint=False)


def test_basepoint_element_must_nest():
    fine = Cover((frozenset({0, 1}), frozenset({1, 2})), 0, 3)
    coarse = Cover((frozenset({0, 1, 2}), frozenset({0, 1})), 1, 3)
    with pytest.raises(BasepointMismatch):
        refines(Cover((frozenset({0, 1, 2}),), 0, 3), coarse)
    assert refines(fine, coarse).assignment == (1, 0)


def test_star_refinement_fails_at_equal_radius():
    C = fixture_space("circle")
    c = build_ball_cover(C, 0.6)
    assert not is_star_refinement(c, c)
    with pytest.raises(NotStarRefinement):
        star_refines(c, c)
    assert is_star_refinement(c, build_ball_cover(C, 1.2))


def test_cover_json_round_trip():
    c = build_ball_cover(triangle_space(), 1)
    again = Cover.from_json(c.to_json())
    assert again == c and again.scale == 1


spaces = st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=1, max_size=12)


@settings(max_examples=60, deadline=None)
@given(spaces, st.integers(1, 6))
def test_stars_and_covers_agree_with_definitions(pts, r):
    X = build_space(pts)
    cover = build_ball_cover(X, r)
    assert list(cover.elements) == balls(X.sqdist, r * r)
    for x in range(X.n):
        assert star_of_point(cover, x) == point_star(cover.elements, x)
    for u, e in enumerate(cover.elements):
        assert star_of_element(cover, u) == element_star(cover.elements, e)


@settings(max_examples=60, deadline=None)
@given(spaces, st.fractions(Fraction(1, 4), 6))
def test_doubling_radii_star_refine(pts, r):
    X = build_space(pts)
    w, u = build_ball_cover(X, r), build_ball_cover(X, 2 * r)
    witness = star_refines(w, u)
    for x in range(X.n):
        assert star_of_point(w, x) <= u.elements[witness[x]]
    assert is_refinement(star_cover(w), build_ball_cover(X, 3 * r))
