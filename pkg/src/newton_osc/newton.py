"""Newton polyhedra ``N(S) = conv(U alpha + R_+^d)`` in exact rational arithmetic.

Facets are stored as ``(n, 1)`` meaning ``{a : a . n >= 1}``. Every facet of
an upward-closed polyhedron generated by points with positive entries has
``n >= 0`` and a positive level, so normalizing the level to 1 is canonical.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ._rational import dot, fmt, nullspace, rank, solve, to_fraction
from .phase import MAX_DIM, Phase

Vec = tuple[Fraction, ...]


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class BoundaryPoint:
    coords: Vec
    tight_facets: tuple[int, ...]
    codim: int

    def as_floats(self) -> list[float]:
        return [float(c) for c in self.coords]


@dataclass(frozen=True)
class Face:
    vertices: tuple[tuple[int, ...], ...]
    rays: tuple[int, ...]  # coordinate directions in the recession cone of the face
    dim: int

    @property
    def compact(self) -> bool:
        return not self.rays


def _unit(d: int, i: int) -> Vec:
    return tuple(Fraction(int(j == i)) for j in range(d))


def _facet_candidates(points: list[Vec], d: int):
    """Yield normalized normals of hyperplanes through d generator elements."""
    rays = [_unit(d, i) for i in range(d)]
    elements = [("p", p) for p in points] + [("r", r) for r in rays]
    seen = set()
    for combo in itertools.combinations(range(len(elements)), d):
        if all(elements[i][0] == "r" for i in combo):
            continue
        rows = []
        for i in combo:
            kind, vec = elements[i]
            # unknown (n, h): points give n.p - h = 0, rays give n.e = 0
            rows.append(list(vec) + [Fraction(-1) if kind == "p" else Fraction(0)])
        ns = nullspace(rows, d + 1)
        if len(ns) != 1:
            continue
        sol = ns[0]
        n, h = sol[:d], sol[d]
        if h == 0:
            continue
        if h < 0:
            n = [-a for a in n]
            h = -h
        n = tuple(a / h for a in n)
        if any(a < 0 for a in n) or n in seen:
            continue
        if all(dot(n, p) >= 1 for p in points):
            seen.add(n)
            yield n


def _minimal_points(points: list[Vec]) -> list[Vec]:
    """Drop points that dominate another point coordinatewise (exact, cheap)."""
    uniq = sorted(set(points))
    keep = []
    for p in uniq:
        if not any(q != p and all(a <= b for a, b in zip(q, p)) for q in uniq):
            keep.append(p)
    return keep


@dataclass
class NewtonPolyhedron:
    dim: int
    vertices: list[tuple[int, ...]]
    facets: list[Vec]
    generators: list[tuple[int, ...]] = field(default_factory=list, repr=False)
    _faces: list[Face] | None = field(default=None, repr=False, compare=False)

    # -- queries ----------------------------------------------------------

    def levels(self, x) -> list[Fraction]:
        xq = tuple(to_fraction(a) for a in x)
        return [dot(n, xq) for n in self.facets]

    def contains(self, x) -> bool:
        return all(level >= 1 for level in self.levels(x))

    def tight_facets(self, x, rel_tol: float = 0.0) -> tuple[int, ...]:
        levels = self.levels(x)
        return tuple(i for i, lv in enumerate(levels) if abs(lv - 1) <= rel_tol)

    def codim_at(self, tight: Sequence[int]) -> int:
        return rank([list(self.facets[i]) for i in tight])

    def boundary_point(self, x, rel_tol: float = 1e-9) -> BoundaryPoint:
        """Classify ``x`` as a boundary point; raise if it is not on dN(S)."""
        xq = tuple(to_fraction(a) for a in x)
        levels = self.levels(xq)
        if any(lv < 1 - Fraction(rel_tol) for lv in levels):
            raise GeometryError(f"point {[float(a) for a in xq]} lies outside N(S)")
        tight = tuple(i for i, lv in enumerate(levels) if abs(lv - 1) <= Fraction(rel_tol))
        if not tight:
            raise GeometryError(f"point {[float(a) for a in xq]} lies in the interior of N(S)")
        return BoundaryPoint(xq, tight, self.codim_at(tight))

    def newton_distance(self, v) -> tuple[Fraction, BoundaryPoint]:
        """delta with delta*v on the boundary, plus the boundary point it hits."""
        vq = tuple(to_fraction(a) for a in v)
        if len(vq) != self.dim:
            raise GeometryError(f"direction has length {len(vq)}, expected {self.dim}")
        if any(a <= 0 for a in vq):
            raise GeometryError(f"direction must be strictly positive, got {[float(a) for a in vq]}")
        # upward closed: the ray enters N(S) through the last facet it crosses
        crossings = [1 / dot(n, vq) for n in self.facets]
        delta = max(crossings)
        tight = tuple(i for i, t in enumerate(crossings) if t == delta)
        point = tuple(delta * a for a in vq)
        return delta, BoundaryPoint(point, tight, self.codim_at(tight))

    # -- faces --------------------------------------------------------------

    def _facet_support(self, n: Vec):
        verts = frozenset(i for i, p in enumerate(self.vertices) if dot(n, p) == 1)
        rays = frozenset(j for j in range(self.dim) if n[j] == 0)
        return verts, rays

    def faces(self) -> list[Face]:
        """All nonempty faces (every face is an intersection of facets)."""
        if self._faces is not None:
            return self._faces
        facet_sets = {self._facet_support(n) for n in self.facets}
        found = set(facet_sets)
        frontier = set(facet_sets)
        while frontier:
            new = set()
            for verts, rays in frontier:
                for fv, fr in facet_sets:
                    cand = (verts & fv, rays & fr)
                    if cand[0] and cand not in found:
                        new.add(cand)
            found |= new
            frontier = new
        out = []
        for verts, rays in found:
            vs = [self.vertices[i] for i in sorted(verts)]
            v0 = vs[0]
            spans = [[a - b for a, b in zip(v, v0)] for v in vs[1:]]
            spans += [[int(j == r) for j in range(self.dim)] for r in sorted(rays)]
            out.append(Face(tuple(sorted(vs)), tuple(sorted(rays)), rank(spans)))
        out.sort(key=lambda f: (f.dim, f.vertices, f.rays))
        self._faces = out
        return out

    def compact_faces(self) -> list[tuple[tuple[tuple[int, ...], ...], int]]:
        return [(f.vertices, f.dim) for f in self.faces() if f.compact]

    def minimal_face(self, point: BoundaryPoint) -> Face:
        verts = frozenset(range(len(self.vertices)))
        rays = frozenset(range(self.dim))
        for i in point.tight_facets:
            fv, fr = self._facet_support(self.facets[i])
            verts &= fv
            rays &= fr
        vs = sorted(self.vertices[i] for i in verts)
        v0 = vs[0]
        spans = [[a - b for a, b in zip(v, v0)] for v in vs[1:]]
        spans += [[int(j == r) for j in range(self.dim)] for r in sorted(rays)]
        return Face(tuple(vs), tuple(sorted(rays)), rank(spans))

    def convex_decomposition(self, point) -> tuple[list[Vec], list[Fraction]]:
        """Write a boundary point as a positive convex combination of
        linearly independent boundary vectors.

        Compact minimal face: the lexicographically first smallest vertex
        subset (Caratheodory). Unbounded minimal face: the point itself.
        """
        if not isinstance(point, BoundaryPoint):
            point = self.boundary_point(point)
        face = self.minimal_face(point)
        x = list(point.coords)
        if face.compact:
            verts = sorted(face.vertices)
            for size in range(1, len(verts) + 1):
                for subset in itertools.combinations(verts, size):
                    cols = [[Fraction(a) for a in v] for v in subset]
                    a_rows = [[c[i] for c in cols] for i in range(self.dim)]
                    a_rows.append([Fraction(1)] * size)
                    theta = solve(a_rows, x + [Fraction(1)])
                    if theta is not None and all(t > 0 for t in theta):
                        return [tuple(Fraction(a) for a in v) for v in subset], theta
        return [tuple(x)], [Fraction(1)]

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "vertices": [list(v) for v in self.vertices],
            "facets": [{"normal": [fmt(a) for a in n], "level": "1"} for n in self.facets],
            "compact_faces": [
                {"vertices": [list(v) for v in vs], "dim": k} for vs, k in self.compact_faces()
            ],
        }


def build(points: Sequence[Sequence[int]]) -> NewtonPolyhedron:
    pts = [tuple(int(a) for a in p) for p in points]
    if not pts:
        raise GeometryError("cannot build a Newton polyhedron from an empty point list")
    d = len(pts[0])
    if not 1 <= d <= MAX_DIM:
        raise GeometryError(f"dimension {d} outside [1, {MAX_DIM}]")
    for p in pts:
        if len(p) != d:
            raise GeometryError(f"point {p} has length != {d}")
        if any(a < 1 for a in p):
            raise GeometryError(f"point {p} has a zero (or negative) component")
    gens = [tuple(Fraction(a) for a in p) for p in _minimal_points(pts)]
    facets = sorted(_facet_candidates(gens, d))
    poly = NewtonPolyhedron(d, [], facets, generators=sorted(set(pts)))
    vertices = []
    for p in gens:
        tight = [i for i, n in enumerate(facets) if dot(n, p) == 1]
        if poly.codim_at(tight) == d:
            vertices.append(tuple(int(a) for a in p))
    poly.vertices = sorted(vertices)
    return poly


def from_phase(phase: Phase) -> NewtonPolyhedron:
    phase.check_input_phase()
    return build(phase.indices)


def newton_distance(poly: NewtonPolyhedron, v) -> tuple[Fraction, BoundaryPoint]:
    return poly.newton_distance(v)


def compact_faces(poly: NewtonPolyhedron):
    return poly.compact_faces()


def convex_decomposition(poly: NewtonPolyhedron, point):
    return poly.convex_decomposition(point)
