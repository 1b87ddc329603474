"""2-skeletons of Rips complexes and nerves, and simplicial maps between them."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Mapping, Sequence

from .errors import BasepointNotPreserved, InvalidComplex, NotSimplicial
from .metric_cover import Cover, FiniteMetricSpace


def _edge(i, j):
    return (i, j) if i < j else (j, i)


def _tri(i, j, k):
    return tuple(sorted((i, j, k)))


@dataclass(frozen=True, eq=False)
class SimplicialComplex2:
    """Vertices, edges and triangles of a simplicial complex.

    Edges are sorted index pairs and triangles sorted index triples.
    Equality compares the combinatorial data; the hash is cached because
    complexes are used as cache keys all over the package.
    """

    vertices: tuple
    edges: frozenset
    triangles: frozenset
    basepoint: int = 0

    def __post_init__(self):
        n = len(self.vertices)
        if not 0 <= self.basepoint < n:
            raise InvalidComplex("basepoint out of range")
        for i, j in self.edges:
            if not (0 <= i < j < n):
                raise InvalidComplex(f"bad edge {(i, j)}")
        for t in self.triangles:
            i, j, k = t
            if not (0 <= i < j < k < n):
                raise InvalidComplex(f"bad triangle {t}")
            if (i, j) not in self.edges or (j, k) not in self.edges or (i, k) not in self.edges:
                raise InvalidComplex(f"triangle {t} is missing a boundary edge")

    @classmethod
    def from_simplices(cls, vertices, edges=(), triangles=(), basepoint=0):
        """Build from (possibly unsorted) simplices, closing triangles downward."""
        es = {_edge(i, j) for i, j in edges}
        ts = set()
        for t in triangles:
            i, j, k = _tri(*t)
            ts.add((i, j, k))
            es.update({(i, j), (j, k), (i, k)})
        if isinstance(vertices, int):
            vertices = range(vertices)
        return cls(tuple(vertices), frozenset(es), frozenset(ts), basepoint)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def _key(self):
        return (self.vertices, self.edges, self.triangles, self.basepoint)

    @cached_property
    def _hash(self):
        return hash((len(self.vertices), len(self.edges), len(self.triangles),
                     self.basepoint, frozenset(self.edges), frozenset(self.triangles)))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, SimplicialComplex2):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return (f"SimplicialComplex2(V={self.n}, E={len(self.edges)}, "
                f"T={len(self.triangles)}, base={self.basepoint})")

    @cached_property
    def adjacency(self) -> tuple:
        adj = [set() for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def sorted_neighbors(self) -> tuple:
        return tuple(tuple(sorted(a)) for a in self.adjacency)

    @cached_property
    def apexes(self) -> dict:
        """edge -> sorted third vertices of the triangles on that edge."""
        out = defaultdict(list)
        for i, j, k in self.triangles:
            out[(i, j)].append(k)
            out[(i, k)].append(j)
            out[(j, k)].append(i)
        return {e: tuple(sorted(v)) for e, v in out.items()}

    def has_edge(self, i, j) -> bool:
        return i == j or _edge(i, j) in self.edges

    def spans_simplex(self, *vs) -> bool:
        """True when the distinct vertices among `vs` form a simplex."""
        s = set(vs)
        if len(s) == 1:
            return True
        if len(s) == 2:
            return _edge(*s) in self.edges
        if len(s) == 3:
            return _tri(*s) in self.triangles
        return False

    def euler_characteristic(self) -> int:
        return self.n - len(self.edges) + len(self.triangles)

    def with_basepoint(self, b: int) -> "SimplicialComplex2":
        if b == self.basepoint:
            return self
        return _rebased(self, b)

    def component(self, v: int | None = None) -> frozenset:
        """Vertices in the connected component of `v` (default: basepoint)."""
        start = self.basepoint if v is None else v
        seen = {start}
        stack = [start]
        adj = self.adjacency
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return frozenset(seen)

    def components(self) -> list:
        left = set(range(self.n))
        out = []
        while left:
            c = self.component(min(left))
            out.append(c)
            left -= c
        return out

    def induced(self, verts) -> "SimplicialComplex2":
        """Full subcomplex on `verts`, keeping the original vertex indexing."""
        vs = frozenset(verts)
        edges = frozenset(e for e in self.edges if e[0] in vs and e[1] in vs)
        tris = frozenset(t for t in self.triangles if t[0] in vs and t[1] in vs and t[2] in vs)
        base = self.basepoint if self.basepoint in vs else min(vs)
        return SimplicialComplex2(self.vertices, edges, tris, base)

    def is_subcomplex_of(self, other: "SimplicialComplex2") -> bool:
        return (self.n == other.n and self.edges <= other.edges
                and self.triangles <= other.triangles)

    def to_json(self) -> dict:
        return {
            "vertices": [_jsonable(v) for v in self.vertices],
            "edges": [list(e) for e in sorted(self.edges)],
            "triangles": [list(t) for t in sorted(self.triangles)],
            "basepoint": self.basepoint,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SimplicialComplex2":
        return cls.from_simplices(data["vertices"], data.get("edges", ()),
                                  data.get("triangles", ()), data.get("basepoint", 0))


def _jsonable(v):
    if isinstance(v, (int, str)):
        return v
    return str(v)


@lru_cache(maxsize=256)
def _rebased(K: SimplicialComplex2, b: int) -> SimplicialComplex2:
    return SimplicialComplex2(K.vertices, K.edges, K.triangles, b)


def _complex_from_elements(n_vertices, elements, basepoint, labels):
    edges, tris = set(), set()
    for e in set(elements):
        pts = sorted(e)
        if len(pts) >= 2:
            edges.update(combinations(pts, 2))
        if len(pts) >= 3:
            tris.update(combinations(pts, 3))
    return SimplicialComplex2(tuple(labels), frozenset(edges), frozenset(tris), basepoint)


def build_rips_2skeleton(space: FiniteMetricSpace | None, cover: Cover) -> SimplicialComplex2:
    """Rips complex of the cover, truncated at dimension two.

    A pair (triple) of points is a simplex when some single cover element
    contains it.  Enumeration runs over deduplicated cover elements.
    """
    return _rips_cached(cover, space.points if space is not None else None)


@lru_cache(maxsize=256)
def _rips_cached(cover: Cover, labels):
    if labels is None:
        labels = tuple(range(cover.n_points))
    return _complex_from_elements(cover.n_points, cover.elements, cover.basepoint, labels)


def build_nerve_2skeleton(cover: Cover) -> SimplicialComplex2:
    """Nerve of the cover, truncated at dimension two.

    Vertices are element indices; intersections are found pointwise, so the
    work is proportional to the number of (point, element) incidences.
    """
    return _nerve_cached(cover)


@lru_cache(maxsize=256)
def _nerve_cached(cover: Cover):
    containing = defaultdict(list)
    for k, e in enumerate(cover.elements):
        for x in e:
            containing[x].append(k)
    edges, tris = set(), set()
    for ks in containing.values():
        if len(ks) >= 2:
            edges.update(combinations(ks, 2))
        if len(ks) >= 3:
            tris.update(combinations(ks, 3))
    return SimplicialComplex2(tuple(range(len(cover))), frozenset(edges),
                              frozenset(tris), cover.basepoint_element)


@dataclass(frozen=True, eq=False)
class SimplicialMap:
    domain: SimplicialComplex2
    codomain: SimplicialComplex2
    vertex_map: tuple

    def __call__(self, v: int) -> int:
        return self.vertex_map[v]

    def map_chain(self, vertices: Sequence[int]) -> tuple:
        return tuple(self.vertex_map[v] for v in vertices)

    def compose(self, after: "SimplicialMap") -> "SimplicialMap":
        """`after` applied after `self`."""
        return SimplicialMap(self.domain, after.codomain,
                             tuple(after.vertex_map[v] for v in self.vertex_map))


def extend_vertex_map(domain: SimplicialComplex2, codomain: SimplicialComplex2,
                      vertex_map) -> SimplicialMap:
    """Validate that a vertex assignment extends to a pointed simplicial map."""
    if isinstance(vertex_map, Mapping):
        vm = tuple(vertex_map[v] for v in range(domain.n))
    else:
        vm = tuple(vertex_map)
    if len(vm) != domain.n:
        raise ValueError("vertex map is not total on the domain")
    for v in vm:
        if not 0 <= v < codomain.n:
            raise ValueError(f"vertex image {v} out of range")
    if vm[domain.basepoint] != codomain.basepoint:
        raise BasepointNotPreserved(
            f"basepoint {domain.basepoint} maps to {vm[domain.basepoint]}, "
            f"not {codomain.basepoint}")
    for i, j in sorted(domain.edges):
        if not codomain.spans_simplex(vm[i], vm[j]):
            raise NotSimplicial((i, j))
    for t in sorted(domain.triangles):
        if not codomain.spans_simplex(*(vm[v] for v in t)):
            raise NotSimplicial(t)
    return SimplicialMap(domain, codomain, vm)


def identity_map(K: SimplicialComplex2) -> SimplicialMap:
    return SimplicialMap(K, K, tuple(range(K.n)))


def to_dot(K: SimplicialComplex2, name: str = "K", *, labels=True) -> str:
    """DOT text for the 1-skeleton, in sorted order."""
    lines = [f"graph {_dot_id(name)} {{"]
    for v in range(K.n):
        attrs = f' [label="{K.vertices[v]}"' if labels else " ["
        if v == K.basepoint:
            attrs += (", " if labels else "") + "shape=doublecircle"
        lines.append(f"  {v}{attrs}];")
    for i, j in sorted(K.edges):
        lines.append(f"  {i} -- {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_id(name: str) -> str:
    return '"' + str(name).replace('"', r'\"') + '"'
