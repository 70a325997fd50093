"""Quadratic forms over GF(q): conics at infinity and hyperbolic quadrics.

Forms are stored by their upper-triangular coefficients a_ij (i <= j), in
lexicographic (i, j) order, so that Q(x) = sum a_ij x_i x_j.  This works the
same way in characteristic 2, where a symmetric matrix would lose the
squared terms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import projective as pg
from .gf import FieldSpec, nullspace, rank
from .projective import GeometryError, Line, Point


class QuadricError(ValueError):
    pass


def monomials(dim: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(dim) for j in range(i, dim)]


def monomial_values(F: FieldSpec, x: Sequence[int]) -> list[int]:
    return [F.mul(x[i], x[j]) for i, j in monomials(len(x))]


@dataclass(frozen=True)
class QuadraticForm:
    field: FieldSpec
    dim: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.dim not in (3, 4):
            raise QuadricError("only ternary and quaternary forms are supported")
        if len(self.coeffs) != self.dim * (self.dim + 1) // 2:
            raise QuadricError("wrong number of coefficients")

    @classmethod
    def from_dict(cls, F: FieldSpec, dim: int, terms: dict[tuple[int, int], int]) -> "QuadraticForm":
        return cls(F, dim, tuple(terms.get(m, 0) % F.q for m in monomials(dim)))

    def __call__(self, x: Sequence[int]) -> int:
        F = self.field
        acc = 0
        for (i, j), a in zip(monomials(self.dim), self.coeffs):
            if a and x[i] and x[j]:
                acc = F.add(acc, F.mul(a, F.mul(x[i], x[j])))
        return acc

    evaluate = __call__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def normalized(self) -> "QuadraticForm":
        """Scalar multiple with leftmost nonzero coefficient 1."""
        if self.is_zero():
            return self
        return QuadraticForm(self.field, self.dim, pg.normalize(self.field, self.coeffs))

    def restrict_to_infinity(self) -> "QuadraticForm":
        """The ternary form obtained by setting X3 = 0."""
        if self.dim != 4:
            raise QuadricError("restriction needs a quaternary form")
        terms = dict(zip(monomials(4), self.coeffs))
        return QuadraticForm(self.field, 3, tuple(terms[m] for m in monomials(3)))

    def embed(self) -> "QuadraticForm":
        """A ternary form on X0..X2 viewed as a quaternary form (no X3 terms)."""
        if self.dim != 3:
            raise QuadricError("embedding needs a ternary form")
        terms = dict(zip(monomials(3), self.coeffs))
        return QuadraticForm.from_dict(self.field, 4, terms)

    def to_json(self) -> list[int]:
        return list(self.coeffs)

    def __str__(self):
        names = "X0 X1 X2 X3".split()[: self.dim]
        out = []
        for (i, j), a in zip(monomials(self.dim), self.coeffs):
            if a:
                term = f"{names[i]}^2" if i == j else f"{names[i]}{names[j]}"
                out.append(term if a == 1 else f"{a}*{term}")
        return " + ".join(out) or "0"


@lru_cache(maxsize=None)
def _point_array(F: FieldSpec, dim: int) -> np.ndarray:
    return np.array(pg.enumerate_points(F, dim), dtype=np.int64)


@lru_cache(maxsize=None)
def _line_incidence(F: FieldSpec) -> np.ndarray:
    """Row i holds the point indices of line i of the line table."""
    idx = pg.point_index(F)
    return np.array([[idx[P] for P in pg.points_on(F, l)] for l in pg.enumerate_lines(F)], dtype=np.int64)


@lru_cache(maxsize=None)
def _np_tables(F: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    return np.asarray(F.add_table, dtype=np.int64), np.asarray(F.mul_table, dtype=np.int64)


def zero_mask(form: QuadraticForm) -> np.ndarray:
    """Boolean mask over enumerate_points(field, dim-1) of the zeros of ``form``."""
    F = form.field
    pts = _point_array(F, form.dim - 1)
    if F.add_table is None:
        return np.array([form(P) == 0 for P in map(tuple, pts.tolist())], dtype=bool)
    add, mul = _np_tables(F)
    acc = np.zeros(len(pts), dtype=np.int64)
    for (i, j), a in zip(monomials(form.dim), form.coeffs):
        if a:
            acc = add[acc, mul[a, mul[pts[:, i], pts[:, j]]]]
    return acc == 0


def points_of(form: QuadraticForm) -> list[Point]:
    """Zero set in PG(dim-1, q), in point enumeration order."""
    pts = pg.enumerate_points(form.field, form.dim - 1)
    return [pts[i] for i in np.flatnonzero(zero_mask(form))]


def contains_line(form: QuadraticForm, line: Line) -> bool:
    # a binary quadratic form with three projective zeros vanishes identically
    F = form.field
    r0, r1 = line
    third = tuple(F.add(x, y) for x, y in zip(r0, r1))
    return form(r0) == 0 and form(r1) == 0 and form(third) == 0


def lines_on(form: QuadraticForm) -> list[Line]:
    if form.dim != 4:
        raise QuadricError("lines_on needs a quaternary form")
    F = form.field
    on = zero_mask(form)[_line_incidence(F)].all(axis=1)
    lines = pg.enumerate_lines(F)
    return [lines[i] for i in np.flatnonzero(on)]


def line_meets_count(form: QuadraticForm, line: Line) -> int:
    return sum(1 for P in pg.points_on(form.field, line) if form(P) == 0)


@dataclass(frozen=True)
class Conic:
    """A non-singular conic in the plane at infinity X3 = 0."""

    form: QuadraticForm

    def __post_init__(self):
        if self.form.dim != 3:
            raise QuadricError("a conic is a ternary form")
        q = self.form.field.q
        pts = points_of(self.form)
        if len(pts) != q + 1:
            raise QuadricError(f"conic has {len(pts)} points, expected {q + 1}")
        # q+1 zeros that are collinear means a repeated line
        if rank(self.form.field, pts) < 3:
            raise QuadricError("conic contains a line")

    @property
    def field(self) -> FieldSpec:
        return self.form.field

    @property
    def plane_points(self) -> list[Point]:
        return _conic_plane_points(self.form)

    @property
    def points(self) -> list[Point]:
        """Conic points P_0..P_q as points of PG(3,q) with X3 = 0."""
        return [P + (0,) for P in self.plane_points]

    def index_of(self, P: Sequence[int]) -> int:
        return self.points.index(tuple(P))

    def to_json(self) -> list[int]:
        return self.form.to_json()


@lru_cache(maxsize=None)
def _conic_plane_points(form: QuadraticForm) -> list[Point]:
    return points_of(form)


def standard_conic(F: FieldSpec) -> Conic:
    """X0 X1 + X2^2 = 0 in the plane X3 = 0."""
    return Conic(QuadraticForm.from_dict(F, 3, {(0, 1): 1, (2, 2): 1}))


def conic_from_json(F: FieldSpec, coeffs: Sequence[int]) -> Conic:
    return Conic(QuadraticForm(F, 3, tuple(int(c) for c in coeffs)))


@dataclass(frozen=True)
class HyperbolicQuadric:
    """A hyperbolic quadric with its two reguli ``R`` and ``Rp`` (R')."""

    form: QuadraticForm
    R: tuple[Line, ...]
    Rp: tuple[Line, ...]

    @property
    def field(self) -> FieldSpec:
        return self.form.field

    def swapped(self) -> "HyperbolicQuadric":
        return HyperbolicQuadric(self.form, self.Rp, self.R)

    def regulus(self, which: str) -> tuple[Line, ...]:
        return self.R if which == "R" else self.Rp

    def line_through(self, which: str, P: Point) -> Line:
        """The unique line of regulus ``which`` ("R" or "R'") through point P of the quadric."""
        F = self.field
        for l in self.regulus(which):
            if pg.point_on_line(F, P, l):
                return l
        raise QuadricError(f"{P} is not on the quadric")

    def contains(self, line: Line) -> bool:
        return contains_line(self.form, line)

    def which_regulus(self, line: Line) -> str | None:
        if line in self.R:
            return "R"
        if line in self.Rp:
            return "R'"
        return None

    def to_json(self) -> dict:
        return {"form": self.form.to_json(),
                "R": [pg.line_to_json(l) for l in self.R],
                "R'": [pg.line_to_json(l) for l in self.Rp]}


def partition_reguli(F: FieldSpec, lines: Sequence[Line]) -> tuple[list[Line], list[Line]]:
    """Split the 2(q+1) lines of a hyperbolic quadric into its two reguli.

    The part containing ``lines[0]`` is returned first.
    """
    lines = list(lines)
    if not lines:
        raise QuadricError("no lines to partition")
    first = lines[0]
    R = [first] + [l for l in lines[1:] if not pg.lines_meet(F, first, l)]
    Rp = [l for l in lines[1:] if pg.lines_meet(F, first, l)]
    if len(R) != len(Rp) or len(R) != F.q + 1:
        raise QuadricError("line set is not two reguli of size q+1")
    for a, b in itertools.combinations(R, 2):
        if pg.lines_meet(F, a, b):
            raise QuadricError("lines of one regulus meet")
    for a, b in itertools.combinations(Rp, 2):
        if pg.lines_meet(F, a, b):
            raise QuadricError("lines of one regulus meet")
    for a in R:
        for b in Rp:
            if not pg.lines_meet(F, a, b):
                raise QuadricError("lines of opposite reguli are skew")
    return R, Rp


def is_hyperbolic(form: QuadraticForm) -> bool:
    q = form.field.q
    return (form.dim == 4 and not form.is_zero()
            and int(zero_mask(form).sum()) == (q + 1) ** 2
            and len(lines_on(form)) == 2 * (q + 1))


@lru_cache(maxsize=4096)
def hyperbolic_quadric(form: QuadraticForm) -> HyperbolicQuadric:
    """Wrap a quaternary form after checking it is hyperbolic."""
    q = form.field.q
    if int(zero_mask(form).sum()) != (q + 1) ** 2:
        raise QuadricError("form does not have (q+1)^2 points")
    lines = lines_on(form)
    if len(lines) != 2 * (q + 1):
        raise QuadricError(f"form carries {len(lines)} lines, expected {2 * (q + 1)}")
    R, Rp = partition_reguli(form.field, lines)
    return HyperbolicQuadric(form, tuple(R), tuple(Rp))


def standard_hyperbolic(F: FieldSpec) -> QuadraticForm:
    """X0 X1 + X2 X3."""
    return QuadraticForm.from_dict(F, 4, {(0, 1): 1, (2, 3): 1})


def _conic_constraint_rows(conic: Conic) -> list[list[int]]:
    """Linear conditions on the 10 coefficients forcing the X3 = 0 part to be a multiple of the conic."""
    F = conic.field
    c = conic.form.coeffs
    k = next(i for i, x in enumerate(c) if x)
    idx4 = {m: i for i, m in enumerate(monomials(4))}
    cols = [idx4[m] for m in monomials(3)]
    rows = []
    for j in range(len(c)):
        if j == k:
            continue
        # c_k * a_j - c_j * a_k = 0
        row = [0] * 10
        row[cols[j]] = c[k]
        row[cols[k]] = F.add(row[cols[k]], F.neg(c[j]))
        rows.append(row)
    return rows


def quadrics_through(conic: Conic, lines: Sequence[Line]) -> list[list[int]]:
    """Nullspace basis of forms restricting to the conic at infinity and containing ``lines``."""
    F = conic.field
    rows = _conic_constraint_rows(conic)
    for P in conic.points:
        rows.append(monomial_values(F, P))
    for l in lines:
        pts = pg.points_on(F, l)[:3]
        for P in pts:
            rows.append(monomial_values(F, P))
    return nullspace(F, rows, 10)


def _check_line_for_conic(conic: Conic, m: Line) -> None:
    F = conic.field
    if pg.line_in_infinity(m):
        raise GeometryError("line lies in the plane at infinity")
    if pg.infinite_point(F, m) not in conic.points:
        raise GeometryError("line does not meet the conic")


@lru_cache(maxsize=None)
def unique_quadric_through(conic: Conic, m: Line, m2: Line) -> HyperbolicQuadric:
    """The hyperbolic quadric through ``conic`` and two disjoint lines meeting it.

    The regulus containing ``m`` is labelled R.
    """
    F = conic.field
    _check_line_for_conic(conic, m)
    _check_line_for_conic(conic, m2)
    if m == m2 or pg.lines_meet(F, m, m2):
        raise GeometryError("lines must be disjoint")
    basis = quadrics_through(conic, [m, m2])
    if len(basis) != 1:
        raise QuadricError(f"solution space has dimension {len(basis)}, expected 1")
    form = QuadraticForm(F, 4, tuple(basis[0])).normalized()
    Q = hyperbolic_quadric(form)
    return Q if m in Q.R else Q.swapped()


def hyperbolic_quadrics_through(conic: Conic, lines: Sequence[Line]) -> list[HyperbolicQuadric]:
    """Every hyperbolic quadric meeting infinity in ``conic`` and containing ``lines``.

    Walks the projective solution space; used when the lines are not two
    disjoint ones, where the quadric need not be unique.
    """
    F = conic.field
    basis = quadrics_through(conic, lines)
    out = []
    seen = set()
    for coeffs in itertools.product(range(F.q), repeat=len(basis)):
        if not any(coeffs):
            continue
        v = [0] * 10
        for c, b in zip(coeffs, basis):
            if c:
                v = [F.add(x, F.mul(c, y)) for x, y in zip(v, b)]
        form = QuadraticForm(F, 4, tuple(v)).normalized()
        if form in seen or form.is_zero():
            continue
        seen.add(form)
        if form.restrict_to_infinity().is_zero():
            continue
        if is_hyperbolic(form):
            out.append(hyperbolic_quadric(form))
    return out


def meets_infinity_in(Q: HyperbolicQuadric, conic: Conic) -> bool:
    at_inf = [P for P in points_of(Q.form) if P[3] == 0]
    return sorted(at_inf) == sorted(conic.points)


def frame_lines(F: FieldSpec) -> tuple[Line, Line]:
    """The two disjoint lines <(1,0,0,0),(0,0,0,1)> and <(0,1,0,0),(1,1,1,1)>."""
    m = pg.line_through(F, (1, 0, 0, 0), (0, 0, 0, 1))
    m2 = pg.line_through(F, (0, 1, 0, 0), (1, 1, 1, 1))
    return m, m2


@lru_cache(maxsize=None)
def standard_quadric(F: FieldSpec) -> HyperbolicQuadric:
    """X0 X1 + X2^2 - X1 X3 - X2 X3 through the standard conic."""
    return unique_quadric_through(standard_conic(F), *frame_lines(F))
