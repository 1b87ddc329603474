"""Deterministic fixture catalog: point clouds, metric matrices and complexes."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import SimplicialComplex2
from .errors import BadParams, UnknownFixture
from .metric_cover import DEFAULT_PRECISION, FiniteMetricSpace, build_space, to_exact


@dataclass(frozen=True)
class FixtureSpec:
    name: str
    params: dict = field(default_factory=dict)
    seed: int = 0


def _int_param(params, key, default, lo, hi):
    v = params.get(key, default)
    try:
        v = int(v)
    except (TypeError, ValueError):
        raise BadParams(f"{key} must be an integer, got {v!r}") from None
    if not lo <= v <= hi:
        raise BadParams(f"{key}={v} outside [{lo}, {hi}]")
    return v


def _num_param(params, key, default, lo, hi):
    v = params.get(key, default)
    try:
        v = Fraction(str(v))
    except (ValueError, ZeroDivisionError):
        raise BadParams(f"{key} must be a number, got {v!r}") from None
    if not lo <= v <= hi:
        raise BadParams(f"{key}={v} outside [{lo}, {hi}]")
    return v


def _snap(x, precision):
    return to_exact(float(x), precision)


def _ring(n, r, precision, phase=0.0, jitter=0.0, rng=None):
    pts = []
    for k in range(n):
        t = 2 * math.pi * k / n + phase
        if jitter:
            t += rng.uniform(-jitter, jitter) * 2 * math.pi / n
        pts.append((_snap(r * math.cos(t), precision), _snap(r * math.sin(t), precision)))
    return pts


def circle(params, seed, precision):
    n = _int_param(params, "n", 12, 3, 2000)
    r = _num_param(params, "r", 1, Fraction(1, 10**6), 10**6)
    jitter = float(_num_param(params, "jitter", 0, 0, Fraction(1, 2)))
    rng = random.Random(seed)
    return _ring(n, float(r), precision, jitter=jitter, rng=rng), 0


def line(params, seed, precision):
    n = _int_param(params, "n", 12, 1, 10**5)
    step = _num_param(params, "step", 1, Fraction(1, 10**6), 10**6)
    return [(step * k, Fraction(0)) for k in range(n)], 0


def annulus(params, seed, precision):
    """Outer ring first (basepoint on it), inner ring aligned with every other outer point."""
    n_out = _int_param(params, "n_outer", 16, 3, 2000)
    n_in = _int_param(params, "n_inner", 8, 3, 2000)
    r_out = float(_num_param(params, "r_outer", 2, Fraction(1, 10**6), 10**6))
    r_in = float(_num_param(params, "r_inner", 1, Fraction(1, 10**6), 10**6))
    if r_in >= r_out:
        raise BadParams("r_inner must be below r_outer")
    return _ring(n_out, r_out, precision) + _ring(n_in, r_in, precision), 0


def arch(params, seed, precision):
    """Integer grid with one interior point removed; basepoint at the corner.

    At radius 1 the four neighbours of the missing point bound an unfilled
    diamond; from radius sqrt(2) on a single ball contains that diamond.
    """
    w = _int_param(params, "width", 5, 3, 200)
    h = _int_param(params, "height", 4, 3, 200)
    hx = _int_param(params, "hole_x", 2, 1, w - 2)
    hy = _int_param(params, "hole_y", 1, 1, h - 2)
    pts = [(Fraction(x), Fraction(y)) for y in range(h) for x in range(w) if (x, y) != (hx, hy)]
    return pts, 0


def rotated_sine(params, seed, precision):
    """sin(1/x) arc plus its limit segment, spun about the vertical axis."""
    n_curve = _int_param(params, "n_curve", 8, 2, 500)
    n_limit = _int_param(params, "n_limit", 3, 2, 100)
    n_angles = _int_param(params, "n_angles", 6, 1, 100)
    profile = [(0.0, -1 + 2 * k / (n_limit - 1)) for k in range(n_limit)]
    for k in range(n_curve):
        x = 1 / (math.pi * (1 + k / 2))
        profile.append((x, math.sin(1 / x)))
    pts = []
    seen = set()
    for a in range(n_angles):
        t = 2 * math.pi * a / n_angles
        for x, y in profile:
            p = (_snap(x * math.cos(t), precision), _snap(x * math.sin(t), precision),
                 _snap(y, precision))
            if p not in seen:
                seen.add(p)
                pts.append(p)
    return pts, 0


def random_cloud(params, seed, precision):
    n = _int_param(params, "n", 10, 1, 10**4)
    dim = _int_param(params, "dim", 2, 1, 10)
    span = _int_param(params, "span", 10, 1, 10**6)
    rng = random.Random(seed)
    return [tuple(Fraction(rng.randint(0, span)) for _ in range(dim)) for _ in range(n)], 0


GENERATORS = {
    "circle": circle,
    "line": line,
    "annulus": annulus,
    "ann": annulus,
    "arch": arch,
    "rotated_sine": rotated_sine,
    "random": random_cloud,
}


def gen_points(spec: FixtureSpec, precision=DEFAULT_PRECISION):
    """(coordinates, basepoint) for a fixture spec."""
    try:
        gen = GENERATORS[spec.name]
    except KeyError:
        raise UnknownFixture(f"unknown fixture {spec.name!r}; known: {sorted(GENERATORS)}") from None
    return gen(dict(spec.params), spec.seed, Fraction(precision))


def gen_space(spec: FixtureSpec, precision=DEFAULT_PRECISION) -> FiniteMetricSpace:
    coords, base = gen_points(spec, precision)
    return build_space(coords, basepoint=base, precision=precision)


def fixture_space(name: str, seed: int = 0, **params) -> FiniteMetricSpace:
    return gen_space(FixtureSpec(name, params, seed))


def triangle_space() -> FiniteMetricSpace:
    """Three points at mutual distance 1."""
    return build_space(matrix=[[0, 1, 1], [1, 0, 1], [1, 1, 0]])


def random_space(rng: random.Random, n_max: int = 10, dim: int = 2, span: int = 6
                 ) -> FiniteMetricSpace:
    n = rng.randint(1, n_max)
    coords = [tuple(rng.randint(0, span) for _ in range(dim)) for _ in range(n)]
    return build_space(coords, basepoint=rng.randrange(n))


# default scale towers: coarse to fine
DEFAULT_SCALES = {
    "circle": ("2", "0.6"),
    "line": ("3", "1"),
    "annulus": ("1.4", "1.3", "1.2"),
    "arch": ("3", "2", "1"),
    "rotated_sine": ("2", "1"),
    "triangle": ("2", "1"),
}

SHIPPED = ("circle", "line", "annulus", "arch", "rotated_sine", "triangle")


def shipped_fixture(name: str) -> tuple:
    """(space, default scales) for a shipped fixture."""
    space = triangle_space() if name == "triangle" else fixture_space(name)
    return space, tuple(Fraction(s) for s in DEFAULT_SCALES[name])


# complexes given directly

def rp2_complex() -> SimplicialComplex2:
    """Six-vertex triangulation of the real projective plane."""
    tris = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
            (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]
    return SimplicialComplex2.from_simplices(6, (), tris)


def torus_complex() -> SimplicialComplex2:
    """Seven-vertex triangulation of the torus."""
    tris = []
    for i in range(7):
        tris.append((i, (i + 1) % 7, (i + 3) % 7))
        tris.append((i, (i + 2) % 7, (i + 3) % 7))
    return SimplicialComplex2.from_simplices(7, (), tris)


def sphere_complex() -> SimplicialComplex2:
    """Boundary of a tetrahedron."""
    return SimplicialComplex2.from_simplices(4, (), [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


def wedge_complex(k: int = 3) -> SimplicialComplex2:
    """k hollow triangles sharing vertex 0."""
    edges = []
    for j in range(k):
        a, b = 1 + 2 * j, 2 + 2 * j
        edges += [(0, a), (a, b), (0, b)]
    return SimplicialComplex2.from_simplices(1 + 2 * k, edges)


COMPLEXES = {
    "rp2": rp2_complex,
    "torus": torus_complex,
    "sphere": sphere_complex,
    "wedge3": wedge_complex,
}
