import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainshape.chains import (
    Chain,
    Move,
    VertexAdd,
    VertexDelete,
    _apply,
    apply_move,
    canonical_reduce,
    chain_homotopic,
    concat,
    constant_chain,
    discretize_path,
    interleaved_chain,
    inverse,
    invert_moves,
    ladder_moves,
    replay,
)
from chainshape.complexes import SimplicialComplex2, build_rips_2skeleton
from chainshape.errors import (
    EndpointMismatch,
    IllegalMove,
    InvalidStep,
    LebesgueViolation,
    LengthMismatch,
    ScaleMismatch,
)
from chainshape.fixtures import fixture_space
from chainshape.metric_cover import build_ball_cover


@pytest.fixture(scope="module")
def c12():
    X = fixture_space("circle")
    cover = build_ball_cover(X, 0.6)
    return cover, build_rips_2skeleton(X, cover)


def test_chain_steps_must_be_edges(c12):
    _, K = c12
    Chain((0, 1, 1, 2), K)
    with pytest.raises(InvalidStep) as err:
        Chain((0, 1, 4), K)
    assert err.value.args


def test_concat_and_inverse(c12):
    _, K = c12
    a, b = Chain((0, 1), K), Chain((1, 2), K)
    assert concat(a, b).vertices == (0, 1, 2)
    assert inverse(concat(a, b)).vertices == (2, 1, 0)
    with pytest.raises(EndpointMismatch):
        concat(b, a)
    other = SimplicialComplex2.from_simplices(12, [(0, 1), (1, 2)])
    with pytest.raises(ScaleMismatch):
        concat(a, Chain((1, 2), other))


def test_move_rules(c12):
    _, K = c12
    c = Chain((0, 1, 2), K)
    assert apply_move(c, VertexDelete(1, 1)).vertices == (0, 2)
    assert apply_move(c, VertexAdd(0, 0)).vertices == (0, 0, 1, 2)
    with pytest.raises(IllegalMove):
        apply_move(c, VertexAdd(0, 5))
    with pytest.raises(IllegalMove):
        apply_move(c, VertexDelete(0))
    with pytest.raises(IllegalMove):
        apply_move(Chain((0, 2, 4), K), VertexDelete(1))
    with pytest.raises(IllegalMove):
        apply_move(c, VertexAdd(1, 6))
    with pytest.raises(IllegalMove):
        apply_move(c, VertexDelete(1, 2))
    m = Move("add", 2, 11)
    assert Move.from_json(m.to_json()) == m
    assert m.inverse().inverse() == m


def test_circle_cycle_is_not_null(c12):
    _, K = c12
    cycle = Chain(tuple(range(12)) + (0,), K)
    v = chain_homotopic(cycle, constant_chain(0, K))
    assert v.no and v.certificate[0] != v.certificate[1]
    assert v.to_json()["verdict"] == "no"


def test_backtracks_are_null(c12):
    _, K = c12
    a = Chain((0, 1, 2, 3, 2, 1, 0), K)
    v = chain_homotopic(a, constant_chain(0, K))
    assert v.yes
    assert replay(a, v.moves).vertices == (0,)


def test_search_finds_the_other_way_round_a_filled_square():
    K = SimplicialComplex2.from_simplices(4, (), [(0, 1, 2), (0, 2, 3)])
    a, b = Chain((1, 0, 3), K), Chain((1, 2, 3), K)
    v = chain_homotopic(a, b)
    assert v.yes and replay(a, v.moves).vertices == b.vertices
    assert chain_homotopic(a, a).moves == ()


def test_budget_exhaustion_gives_unknown(c12):
    _, K = c12
    a = Chain((0, 1, 2, 3, 4), K)
    b = Chain((0, 11, 10, 9, 8, 7, 6, 5, 4), K)
    v = chain_homotopic(a, b, budget=3, check_abelian=False)
    assert v.unknown and v.expanded > 3


def test_canonical_reduction_strips_spurs(c12):
    _, K = c12
    red, moves = canonical_reduce((0, 0, 1, 2, 1, 0), K)
    assert red == (0,)
    assert replay(Chain((0, 0, 1, 2, 1, 0), K), moves).vertices == red


def test_ladder_between_parallel_chains():
    square = SimplicialComplex2.from_simplices(4, [(0, 1), (1, 2), (0, 3), (2, 3)])
    with pytest.raises(IllegalMove):
        ladder_moves((0, 1, 2), (0, 3, 2), square)
    strip = SimplicialComplex2.from_simplices(6, (), [(0, 1, 3), (1, 3, 4), (1, 2, 4), (2, 4, 5)])
    moves = ladder_moves((0, 1, 2, 5), (0, 3, 4, 5), strip)
    assert replay(Chain((0, 1, 2, 5), strip), moves).vertices == (0, 3, 4, 5)
    full = SimplicialComplex2.from_simplices(4, (), [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])
    moves = ladder_moves((0, 1, 3), (0, 2, 3), full)
    assert replay(Chain((0, 1, 3), full), moves).vertices == (0, 2, 3)
    with pytest.raises(LengthMismatch):
        ladder_moves((0, 1), (0, 2, 1), full)


def test_discretize_path_checks_lebesgue(c12):
    cover, K = c12
    assert discretize_path([0, 0, 1, 1, 2], cover, K).vertices == (0, 1, 2)
    with pytest.raises(LebesgueViolation) as err:
        discretize_path([0, 1, 4], cover, K)
    assert err.value.args
    assert discretize_path([3], cover).vertices == (3,)


def test_interleaving(c12):
    _, K = c12
    a, b = Chain((0, 1, 2), K), Chain((0, 0, 2), K)
    assert interleaved_chain(a, b).vertices == (0, 1, 0, 2)
    assert interleaved_chain(a, a).vertices == (0, 1, 2)
    with pytest.raises(LengthMismatch):
        interleaved_chain(a, Chain((0, 1), K))
    with pytest.raises(EndpointMismatch):
        interleaved_chain(a, Chain((1, 2, 3), K))


def _random_moves(K, rng, n):
    c = (K.basepoint,)
    moves = []
    for _ in range(n):
        options = []
        for i in range(len(c) + 1):
            for v in range(K.n):
                try:
                    _apply(c, Move("add", i, v), K)
                    options.append(Move("add", i, v))
                except IllegalMove:
                    pass
        for i in range(len(c)):
            try:
                _apply(c, Move("del", i, c[i]), K)
                options.append(Move("del", i, c[i]))
            except IllegalMove:
                pass
        m = rng.choice(options)
        c = _apply(c, m, K)
        moves.append(m)
    return moves


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 12))
def test_moves_are_invertible_and_preserve_class(seed, n):
    X = fixture_space("circle")
    K = build_rips_2skeleton(X, build_ball_cover(X, 0.6))
    rng = random.Random(seed)
    moves = _random_moves(K, rng, n)
    start = Chain((0,), K)
    end = replay(start, moves)
    assert replay(end, invert_moves(moves)).vertices == (0,)
    v = chain_homotopic(end, start)
    assert v.yes
    assert replay(end, v.moves).vertices == (0,)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-1, 1), min_size=1, max_size=14))
def test_retraced_walks_on_the_circle_are_null(steps):
    X = fixture_space("circle")
    K = build_rips_2skeleton(X, build_ball_cover(X, 0.6))
    pos, vs = 0, [0]
    for s in steps:
        pos += s
        vs.append(pos % 12)
    back = list(range(pos, 0, -1)) if pos > 0 else list(range(pos, 0))
    for p in back[1:] + [0]:
        vs.append(p % 12)
    a = Chain(tuple(vs), K)
    v = chain_homotopic(a, Chain((0,), K))
    assert v.yes


@pytest.mark.parametrize("k", [1, 2, -1])
def test_repeated_cycles_carry_their_winding(c12, k):
    _, K = c12
    turn = tuple(range(12)) if k > 0 else tuple(range(12, 0, -1))
    vs = tuple(v % 12 for v in turn * abs(k)) + (0,)
    v = chain_homotopic(Chain(vs, K), constant_chain(0, K))
    assert v.no
    assert abs(v.certificate[0][0]) == abs(k)
