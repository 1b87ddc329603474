"""Finite metric spaces, closed-ball covers, stars and refinements.

Distances are kept exactly.  Every space stores *squared* distances as
``Fraction`` values, so Euclidean inputs with rational coordinates stay
exact (no square roots are ever taken for a decision) and ball membership
``d(c, x) <= eps`` is tested as ``d(c, x)**2 <= eps**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import (
    BadBasepoint,
    BasepointMismatch,
    IndexOutOfRange,
    InvalidCover,
    NonPositiveRadius,
    NonSymmetric,
    NotRefinement,
    NotStarRefinement,
    TriangleInequalityViolation,
)

DEFAULT_PRECISION = Fraction(1, 10**9)

METRICS = ("euclidean", "l1", "linf")
_METRIC_ALIASES = {"manhattan": "l1", "chebyshev": "linf", "l2": "euclidean"}


def to_exact(value, precision=DEFAULT_PRECISION) -> Fraction:
    """Convert a number (or numeric string) to a Fraction.

    Integers, Fractions and strings such as ``"0.6"`` or ``"1/3"`` are taken
    literally; floats are snapped to the nearest multiple of `precision`.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        precision = Fraction(precision)
        return round(Fraction(value) / precision) * precision
    return Fraction(value)


def exact_radius(eps) -> Fraction:
    """Radii given as floats are read through their shortest decimal repr."""
    if isinstance(eps, float):
        return Fraction(repr(eps))
    return to_exact(eps)


def _sqrt_le_sum(a: Fraction, b: Fraction, c: Fraction) -> bool:
    """Exact test of sqrt(a) <= sqrt(b) + sqrt(c) for nonnegative a, b, c."""
    t = a - b - c
    if t <= 0:
        return True
    return t * t <= 4 * b * c


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Points with exact pairwise squared distances and a basepoint index."""

    points: tuple
    sqdist: tuple
    basepoint: int = 0
    precision: Fraction = DEFAULT_PRECISION
    coords: tuple | None = None
    metric: str = "matrix"

    def __len__(self):
        return len(self.points)

    @property
    def n(self) -> int:
        return len(self.points)

    def dist(self, i: int, j: int) -> float:
        return math.sqrt(self.sqdist[i][j])

    def exact_dist(self, i: int, j: int) -> Fraction | None:
        """Exact distance when it is rational, else None."""
        d2 = self.sqdist[i][j]
        num, den = math.isqrt(d2.numerator), math.isqrt(d2.denominator)
        if num * num == d2.numerator and den * den == d2.denominator:
            return Fraction(num, den)
        return None

    def within(self, i: int, j: int, eps) -> bool:
        eps = exact_radius(eps)
        return self.sqdist[i][j] <= eps * eps

    def diameter_squared(self) -> Fraction:
        return max((d for row in self.sqdist for d in row), default=Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return (self.sqdist == other.sqdist and self.basepoint == other.basepoint
                and self.points == other.points)

    def __hash__(self):
        return hash((self.points, self.basepoint, len(self.sqdist)))


def _check_basepoint(basepoint, n):
    if not isinstance(basepoint, int) or not 0 <= basepoint < n:
        raise BadBasepoint(f"basepoint {basepoint!r} not in range 0..{n - 1}")


def build_space(coords=None, *, matrix=None, metric: str = "euclidean",
                basepoint: int = 0, precision=DEFAULT_PRECISION,
                labels: Sequence | None = None,
                check_triangle: bool = True) -> FiniteMetricSpace:
    """Build a validated finite metric space.

    Pass either `coords` (one coordinate tuple per point, compared with
    `metric`) or `matrix` (an explicit square distance matrix).  Floats are
    snapped to multiples of `precision`.  Matrices are checked for a zero
    diagonal, symmetry and the triangle inequality, all in exact arithmetic.
    """
    precision = Fraction(precision)
    if (coords is None) == (matrix is None):
        raise ValueError("give exactly one of coords or matrix")
    if coords is not None:
        metric = _METRIC_ALIASES.get(metric, metric)
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}")
        pts = tuple(tuple(to_exact(x, precision) for x in row) for row in coords)
        n = len(pts)
        if n == 0:
            raise ValueError("empty point set")
        dims = {len(p) for p in pts}
        if len(dims) != 1:
            raise ValueError("points have differing dimensions")
        _check_basepoint(basepoint, n)
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i, j in combinations(range(n), 2):
            diffs = [a - b for a, b in zip(pts[i], pts[j])]
            if metric == "euclidean":
                d2 = sum(d * d for d in diffs)
            elif metric == "l1":
                d2 = sum(abs(d) for d in diffs) ** 2
            else:
                d2 = max((abs(d) for d in diffs), default=Fraction(0)) ** 2
            rows[i][j] = rows[j][i] = d2
        sq = tuple(tuple(r) for r in rows)
        # coordinate metrics satisfy the triangle inequality by construction
        return FiniteMetricSpace(tuple(labels) if labels else tuple(range(n)), sq,
                                 basepoint, precision, pts, metric)

    d = [[to_exact(x, precision) for x in row] for row in matrix]
    n = len(d)
    if n == 0:
        raise ValueError("empty distance matrix")
    if any(len(row) != n for row in d):
        raise ValueError("distance matrix is not square")
    _check_basepoint(basepoint, n)
    for i in range(n):
        if d[i][i] != 0:
            raise NonSymmetric(f"dist({i},{i}) = {d[i][i]} is not zero")
        for j in range(i + 1, n):
            if d[i][j] != d[j][i]:
                raise NonSymmetric(f"dist({i},{j}) != dist({j},{i})")
            if d[i][j] < 0:
                raise ValueError(f"negative distance at ({i},{j})")
    if check_triangle:
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if d[i][k] > d[i][j] + d[j][k]:
                        raise TriangleInequalityViolation(i, j, k)
    sq = tuple(tuple(x * x for x in row) for row in d)
    return FiniteMetricSpace(tuple(labels) if labels else tuple(range(n)), sq,
                             basepoint, precision, None, "matrix")


def check_triangle_inequality(space: FiniteMetricSpace) -> None:
    """Exhaustive exact check on the stored squared distances."""
    sq = space.sqdist
    n = space.n
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if not _sqrt_le_sum(sq[i][k], sq[i][j], sq[j][k]):
                    raise TriangleInequalityViolation(i, j, k)


@dataclass(frozen=True)
class Cover:
    """An indexed family of point subsets with a distinguished element."""

    elements: tuple
    basepoint_element: int
    n_points: int
    basepoint: int = 0
    scale: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        elems = tuple(frozenset(e) for e in self.elements)
        object.__setattr__(self, "elements", elems)
        if not elems:
            raise InvalidCover("cover has no elements")
        for k, e in enumerate(elems):
            if not e:
                raise InvalidCover(f"element {k} is empty")
            if min(e) < 0 or max(e) >= self.n_points:
                raise InvalidCover(f"element {k} has out-of-range points")
        covered = frozenset().union(*elems)
        if len(covered) != self.n_points:
            missing = sorted(set(range(self.n_points)) - covered)
            raise InvalidCover(f"points {missing} are not covered")
        if not 0 <= self.basepoint_element < len(elems):
            raise InvalidCover("basepoint element index out of range")
        if self.basepoint not in elems[self.basepoint_element]:
            raise InvalidCover("basepoint element does not contain the basepoint")

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, k) -> frozenset:
        return self.elements[k]

    def elements_containing(self, x: int) -> list[int]:
        return [k for k, e in enumerate(self.elements) if x in e]

    def shares_element(self, points: Iterable[int]) -> bool:
        pts = set(points)
        return any(pts <= e for e in self.elements)

    def to_json(self) -> dict:
        return {
            "elements": [sorted(e) for e in self.elements],
            "basepoint_element": self.basepoint_element,
            "scale": None if self.scale is None else str(self.scale),
        }

    @classmethod
    def from_json(cls, data: dict, n_points: int | None = None,
                  basepoint: int | None = None) -> "Cover":
        elements = [frozenset(e) for e in data["elements"]]
        if n_points is None:
            n_points = 1 + max(max(e) for e in elements)
        k = data["basepoint_element"]
        if basepoint is None:
            basepoint = min(elements[k])
        scale = data.get("scale")
        return cls(tuple(elements), k, n_points, basepoint,
                   None if scale is None else Fraction(str(scale)))


def build_ball_cover(space: FiniteMetricSpace, eps) -> Cover:
    """One closed ball per sample point; the basepoint's ball is distinguished."""
    eps = exact_radius(eps)
    if eps <= 0:
        raise NonPositiveRadius(f"radius must be positive, got {eps}")
    e2 = eps * eps
    sq = space.sqdist
    elements = tuple(frozenset(x for x in range(space.n) if sq[c][x] <= e2)
                     for c in range(space.n))
    return Cover(elements, space.basepoint, space.n, space.basepoint, eps)


def star_of_element(cover: Cover, u: int) -> frozenset:
    """Union of all cover elements meeting element `u`."""
    if not 0 <= u < len(cover):
        raise IndexOutOfRange(f"element index {u} out of range")
    target = cover.elements[u]
    out = set()
    for e in cover.elements:
        if not target.isdisjoint(e):
            out |= e
    return frozenset(out)


def star_of_point(cover: Cover, x: int) -> frozenset:
    """Union of all cover elements containing the point `x`."""
    out = set()
    for e in cover.elements:
        if x in e:
            out |= e
    return frozenset(out)


def star_cover(cover: Cover) -> Cover:
    """The cover of stars of elements, index-aligned with the input."""
    stars = tuple(star_of_element(cover, u) for u in range(len(cover)))
    return Cover(stars, cover.basepoint_element, cover.n_points, cover.basepoint,
                 None)


@dataclass(frozen=True)
class RefinementWitness:
    """assignment[k] is the coarse element containing fine element k."""

    assignment: tuple

    def __getitem__(self, k):
        return self.assignment[k]

    def __len__(self):
        return len(self.assignment)

    def compose(self, other: "RefinementWitness") -> "RefinementWitness":
        """self: A -> B, other: B -> C; returns A -> C."""
        return RefinementWitness(tuple(other.assignment[j] for j in self.assignment))


def _same_space(fine: Cover, coarse: Cover):
    if fine.n_points != coarse.n_points or fine.basepoint != coarse.basepoint:
        raise ValueError("covers are over different spaces")


def refines(fine: Cover, coarse: Cover, *, respect_basepoint: bool = True
            ) -> RefinementWitness:
    """Witness that every fine element lies in some coarse element.

    The fine basepoint element is paired with the coarse basepoint element
    first; every other element goes to the lowest-index container.
    """
    _same_space(fine, coarse)
    assignment = []
    for k, e in enumerate(fine.elements):
        if respect_basepoint and k == fine.basepoint_element:
            if not e <= coarse.elements[coarse.basepoint_element]:
                raise BasepointMismatch(
                    "fine basepoint element is not inside the coarse basepoint element")
            assignment.append(coarse.basepoint_element)
            continue
        for j, c in enumerate(coarse.elements):
            if e <= c:
                assignment.append(j)
                break
        else:
            raise NotRefinement(k)
    return RefinementWitness(tuple(assignment))


def is_refinement(fine: Cover, coarse: Cover, **kw) -> bool:
    try:
        refines(fine, coarse, **kw)
    except (NotRefinement, BasepointMismatch):
        return False
    return True


def star_refines(fine: Cover, coarse: Cover) -> RefinementWitness:
    """Witness mapping each point x to a coarse element containing St(x, fine)."""
    _same_space(fine, coarse)
    assignment = []
    for x in range(fine.n_points):
        st = star_of_point(fine, x)
        for j, c in enumerate(coarse.elements):
            if st <= c:
                assignment.append(j)
                break
        else:
            raise NotStarRefinement(x)
    return RefinementWitness(tuple(assignment))


def is_star_refinement(fine: Cover, coarse: Cover) -> bool:
    try:
        star_refines(fine, coarse)
    except NotStarRefinement:
        return False
    return True
