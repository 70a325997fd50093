"""Points, lines and planes of PG(3,q) (and points of PG(2,q)).

Everything is kept in canonical form so that Python equality and hashing are
geometric equality:

* a point is a tuple of codes whose leftmost nonzero entry is 1;
* a line is the pair of rows of its 2x4 reduced row echelon basis;
* a plane is its dual coordinate vector, normalized like a point.

The plane at infinity is X3 = 0.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Sequence

from .gf import FieldSpec, nullspace, rank, row_reduce

Point = tuple[int, ...]
Line = tuple[Point, Point]
Plane = tuple[int, ...]

INFINITE = "infinite"
AFFINE = "affine"


class GeometryError(ValueError):
    """Degenerate input: equal points, collinear triples, singular matrices."""


def normalize(F: FieldSpec, v: Sequence[int]) -> Point:
    for x in v:
        if x:
            s = F.inv(x)
            return tuple(F.mul(s, y) for y in v)
    raise GeometryError("the zero vector is not a projective point")


def scale(F: FieldSpec, c: int, v: Sequence[int]) -> list[int]:
    return [F.mul(c, x) for x in v]


def combine(F: FieldSpec, a: int, u: Sequence[int], b: int, v: Sequence[int]) -> list[int]:
    return [F.add(F.mul(a, x), F.mul(b, y)) for x, y in zip(u, v)]


@lru_cache(maxsize=None)
def enumerate_points(F: FieldSpec, dim: int = 3) -> tuple[Point, ...]:
    """All points of PG(dim, q), ordered by position of the leading 1, then lexicographically."""
    pts = []
    n = dim + 1
    for lead in range(n):
        for rest in itertools.product(range(F.q), repeat=n - lead - 1):
            pts.append((0,) * lead + (1,) + rest)
    return tuple(pts)


@lru_cache(maxsize=None)
def point_index(F: FieldSpec, dim: int = 3) -> dict[Point, int]:
    return {P: i for i, P in enumerate(enumerate_points(F, dim))}


def _line_from_rows(F: FieldSpec, rows) -> Line:
    R, _ = row_reduce(F, rows)
    if len(R) != 2:
        raise GeometryError("rows do not span a line")
    return (tuple(R[0]), tuple(R[1]))


def line_through(F: FieldSpec, P: Sequence[int], Q: Sequence[int]) -> Line:
    R, _ = row_reduce(F, [P, Q])
    if len(R) != 2:
        raise GeometryError("line_through needs two distinct points")
    return (tuple(R[0]), tuple(R[1]))


def points_on(F: FieldSpec, line: Line) -> list[Point]:
    """The q+1 points of ``line``: r0 + t*r1 for each t, then r1."""
    r0, r1 = line
    pts = [tuple(F.add(x, F.mul(t, y)) for x, y in zip(r0, r1)) for t in range(F.q)]
    pts.append(tuple(r1))
    # r0 has its pivot left of r1's, so r0 + t r1 is already normalized
    return pts


@lru_cache(maxsize=1 << 16)
def point_set(F: FieldSpec, line: Line) -> frozenset[Point]:
    return frozenset(points_on(F, line))


def point_on_line(F: FieldSpec, P: Sequence[int], line: Line) -> bool:
    return normalize(F, P) in point_set(F, line)


def meet(F: FieldSpec, l1: Line, l2: Line) -> Point | None:
    """Common point of two distinct lines, or None if they are skew."""
    if l1 == l2:
        raise GeometryError("meet of a line with itself")
    u0, u1 = l1
    v0, v1 = l2
    # a u0 + b u1 = c v0 + d v1  <=>  columns [u0 u1 -v0 -v1] (a b c d)^T = 0
    cols = [u0, u1, [F.neg(x) for x in v0], [F.neg(x) for x in v1]]
    A = [[cols[j][i] for j in range(4)] for i in range(len(u0))]
    ns = nullspace(F, A, 4)
    if not ns:
        return None
    a, b = ns[0][0], ns[0][1]
    return normalize(F, combine(F, a, u0, b, u1))


def lines_meet(F: FieldSpec, l1: Line, l2: Line) -> bool:
    return not point_set(F, l1).isdisjoint(point_set(F, l2))


def plane_through(F: FieldSpec, P, Q, R) -> Plane:
    ns = nullspace(F, [P, Q, R], 4)
    if len(ns) != 1:
        raise GeometryError("plane_through needs three non-collinear points")
    return normalize(F, ns[0])


def plane_of_lines(F: FieldSpec, l1: Line, l2: Line) -> Plane:
    ns = nullspace(F, [*l1, *l2], 4)
    if len(ns) != 1:
        raise GeometryError("lines do not span a plane")
    return normalize(F, ns[0])


def plane_meet_plane(F: FieldSpec, a: Plane, b: Plane) -> Line:
    ns = nullspace(F, [a, b], 4)
    if len(ns) != 2:
        raise GeometryError("planes coincide")
    return _line_from_rows(F, ns)


def point_on_plane(F: FieldSpec, P, pi: Plane) -> bool:
    return F.dot(P, pi) == 0


def line_in_plane(F: FieldSpec, line: Line, pi: Plane) -> bool:
    return point_on_plane(F, line[0], pi) and point_on_plane(F, line[1], pi)


PLANE_AT_INFINITY: Plane = (0, 0, 0, 1)


def is_infinite(P: Sequence[int]) -> bool:
    return P[-1] == 0


def split_affine(F: FieldSpec, P: Sequence[int]) -> tuple[str, Point]:
    """Classify against X3 = 0; affine points come back scaled to X3 = 1."""
    if P[3] == 0:
        return INFINITE, tuple(P)
    s = F.inv(P[3])
    return AFFINE, tuple(F.mul(s, x) for x in P)


def line_in_infinity(line: Line) -> bool:
    return line[0][3] == 0 and line[1][3] == 0


def infinite_point(F: FieldSpec, line: Line) -> Point:
    """The point of ``line`` on X3 = 0 (the line itself must not lie there)."""
    r0, r1 = line
    if r0[3] == 0 and r1[3] == 0:
        raise GeometryError("line lies in the plane at infinity")
    if r1[3] == 0:
        return tuple(r1)
    return normalize(F, combine(F, r1[3], r0, F.neg(r0[3]), r1))


def affine_points(F: FieldSpec, line: Line) -> list[Point]:
    """The q affine points of a line not at infinity, scaled to X3 = 1."""
    return [split_affine(F, P)[1] for P in points_on(F, line) if P[3]]


def apply_collineation(F: FieldSpec, M: Sequence[Sequence[int]], P: Sequence[int]) -> Point:
    """Image of P under x -> M x, renormalized."""
    if rank(F, M) != len(M):
        raise GeometryError("collineation matrix is singular")
    return normalize(F, [F.dot(row, P) for row in M])


@lru_cache(maxsize=None)
def enumerate_lines(F: FieldSpec) -> tuple[Line, ...]:
    """All (q^2+1)(q^2+q+1) lines of PG(3,q), by pivot pair then free entries."""
    q = F.q
    lines = []
    for c0, c1 in itertools.combinations(range(4), 2):
        free0 = [c for c in range(c0 + 1, 4) if c != c1]
        free1 = list(range(c1 + 1, 4))
        for vals0 in itertools.product(range(q), repeat=len(free0)):
            r0 = [0] * 4
            r0[c0] = 1
            for c, v in zip(free0, vals0):
                r0[c] = v
            for vals1 in itertools.product(range(q), repeat=len(free1)):
                r1 = [0] * 4
                r1[c1] = 1
                for c, v in zip(free1, vals1):
                    r1[c] = v
                lines.append((tuple(r0), tuple(r1)))
    return tuple(lines)


@lru_cache(maxsize=None)
def line_index(F: FieldSpec) -> dict[Line, int]:
    return {l: i for i, l in enumerate(enumerate_lines(F))}


def lines_through_point(F: FieldSpec, P: Point) -> list[Line]:
    return [l for l in enumerate_lines(F) if point_on_line(F, P, l)]


def point_to_json(P: Sequence[int]) -> list[int]:
    return [int(x) for x in P]


def line_to_json(line: Line) -> list[list[int]]:
    return [point_to_json(line[0]), point_to_json(line[1])]


def line_from_json(F: FieldSpec, obj) -> Line:
    """Accepts any two spanning points and returns the canonical form."""
    return _line_from_rows(F, [list(obj[0]), list(obj[1])])
