import itertools
import random

import pytest

from kakeya_conic import projective as pg
from kakeya_conic.gf import field_of_order, nullspace
from kakeya_conic.kakeya import candidate_lines
from kakeya_conic.projective import GeometryError
from kakeya_conic.quadrics import (Conic, QuadraticForm, QuadricError, contains_line, frame_lines,
                                   hyperbolic_quadric, hyperbolic_quadrics_through, is_hyperbolic, lines_on,
                                   meets_infinity_in, monomial_values, partition_reguli, points_of,
                                   quadrics_through, standard_conic, standard_hyperbolic, standard_quadric,
                                   unique_quadric_through)


def _disjoint_pairs(conic):
    F = conic.field
    n = F.q + 1
    for i, j in itertools.combinations(range(n), 2):
        for a in candidate_lines(conic, i):
            for b in candidate_lines(conic, j):
                if not pg.lines_meet(F, a, b):
                    yield a, b


def test_standard_conic_points():
    assert standard_conic(field_of_order(2)).plane_points == [(1, 0, 0), (1, 1, 1), (0, 1, 0)]
    for q in (3, 4, 5, 7, 8, 9):
        assert len(standard_conic(field_of_order(q)).points) == q + 1


def test_form_is_projective():
    F = field_of_order(5)
    f = QuadraticForm(F, 4, tuple(i % 5 for i in range(10)))
    for P in pg.enumerate_points(F)[::7]:
        for lam in range(1, 5):
            assert f([F.mul(lam, x) for x in P]) == F.mul(F.mul(lam, lam), f(P))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8])
def test_standard_hyperbolic(q):
    F = field_of_order(q)
    f = standard_hyperbolic(F)
    assert len(points_of(f)) == (q + 1) ** 2
    assert len(lines_on(f)) == 2 * (q + 1)
    assert is_hyperbolic(f)


def test_hyperbolic_examples():
    F = field_of_order(2)
    assert len(points_of(standard_hyperbolic(F))) == 9
    assert len(lines_on(standard_hyperbolic(F))) == 6
    assert len(lines_on(standard_hyperbolic(field_of_order(4)))) == 10
    zero = QuadraticForm(F, 4, (0,) * 10)
    assert len(points_of(zero)) == 15 and not is_hyperbolic(zero)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_elliptic_form_has_no_lines(q):
    # X0X1 + N(X2, X3) with N an irreducible binary form
    F = field_of_order(q)
    for a, b in itertools.product(range(q), repeat=2):
        # X2^2 + a X2X3 + b X3^2 irreducible iff no root t^2 + a t + b
        if all(F.add(F.add(F.mul(t, t), F.mul(a, t)), b) for t in range(q)):
            break
    f = QuadraticForm.from_dict(F, 4, {(0, 1): 1, (2, 2): 1, (2, 3): a, (3, 3): b})
    assert len(points_of(f)) == q * q + 1
    assert lines_on(f) == []


@pytest.mark.parametrize("q", [2, 3, 4])
def test_reguli(q):
    F = field_of_order(q)
    Q = hyperbolic_quadric(standard_hyperbolic(F))
    assert len(Q.R) == len(Q.Rp) == q + 1
    meets = {pg.meet(F, a, b) for a in Q.R for b in Q.Rp}
    assert None not in meets
    assert meets == set(points_of(Q.form))
    for a, b in itertools.combinations(Q.R, 2):
        assert pg.meet(F, a, b) is None
    lines = lines_on(Q.form)
    R1, _ = partition_reguli(F, lines)
    R2, Rp2 = partition_reguli(F, list(reversed(lines)))
    assert {frozenset(R1), frozenset(lines) - frozenset(R1)} == {frozenset(R2), frozenset(Rp2)}


def test_partition_rejects_bad_input():
    F = field_of_order(3)
    lines = pg.enumerate_lines(F)[:8]
    with pytest.raises(QuadricError):
        partition_reguli(F, lines)


def test_frame_example_all_fields():
    # X0X1 + X2^2 - X1X3 - X2X3
    for q in (2, 3, 4, 5, 7, 8, 9):
        F = field_of_order(q)
        m1 = F.neg(1)
        want = QuadraticForm.from_dict(F, 4, {(0, 1): 1, (2, 2): 1, (1, 3): m1, (2, 3): m1})
        Q = standard_quadric(F)
        assert Q.form == want.normalized()
        m, m2 = frame_lines(F)
        assert Q.which_regulus(m) == Q.which_regulus(m2) == "R"


def test_frame_example_over_gf3_coefficients():
    Q = standard_quadric(field_of_order(3))
    # monomial order 00 01 02 03 11 12 13 22 23 33
    assert Q.form.coeffs == (0, 1, 0, 0, 0, 0, 2, 1, 2, 0)


@pytest.mark.parametrize("q", [2, 3])
def test_uniqueness_against_brute_force(q):
    """Exactly one hyperbolic quadric meets X3 = 0 in the conic and contains both lines."""
    F = field_of_order(q)
    C = standard_conic(F)
    forms = []
    for c in itertools.product(range(q), repeat=10):
        f = QuadraticForm(F, 4, c)
        if f.is_zero() or f.normalized() != f:
            continue
        if sorted(P for P in points_of(f) if P[3] == 0) != sorted(C.points):
            continue
        if is_hyperbolic(f):
            forms.append(f)
    assert len(forms) == {2: 4, 3: 27}[q]
    n = 0
    for a, b in _disjoint_pairs(C):
        hits = [f for f in forms if contains_line(f, a) and contains_line(f, b)]
        assert hits == [unique_quadric_through(C, a, b).form]
        n += 1
    assert n == {2: 24, 3: 324}[q]


@pytest.mark.parametrize("q", [2, 3, 4])
def test_unique_quadric_properties(q):
    F = field_of_order(q)
    C = standard_conic(F)
    pairs = list(_disjoint_pairs(C))
    for a, b in random.Random(q).sample(pairs, min(40, len(pairs))):
        assert len(quadrics_through(C, [a, b])) == 1
        Q = unique_quadric_through(C, a, b)
        assert meets_infinity_in(Q, C)
        assert all(Q.form(P) == 0 for P in C.points)
        assert all(Q.form(P) == 0 for l in (a, b) for P in pg.points_on(F, l))
        # disjoint lines of a hyperbolic quadric lie in one regulus
        assert Q.which_regulus(a) == Q.which_regulus(b) == "R"
        for x in Q.R:
            for y in Q.Rp:
                assert pg.lines_meet(F, x, y)


def test_point_only_system_is_underdetermined_for_tiny_q():
    # vanishing on q+1 <= 4 conic points does not pin down the conic's equation
    for q, dim in ((2, 3), (3, 2), (4, 1), (5, 1)):
        F = field_of_order(q)
        C = standard_conic(F)
        m, m2 = frame_lines(F)
        rows = [monomial_values(F, P) for P in C.points]
        rows += [monomial_values(F, P) for l in (m, m2) for P in pg.points_on(F, l)[:3]]
        assert len(nullspace(F, rows, 10)) == dim


def test_unique_quadric_preconditions():
    F = field_of_order(3)
    C = standard_conic(F)
    a = candidate_lines(C, 0)[0]
    b = next(l for l in candidate_lines(C, 1) if pg.lines_meet(F, a, l))
    with pytest.raises(GeometryError):
        unique_quadric_through(C, a, b)
    at_inf = pg.line_through(F, C.points[0], C.points[1])
    with pytest.raises(GeometryError):
        unique_quadric_through(C, at_inf, candidate_lines(C, 2)[0])
    miss = pg.line_through(F, (0, 0, 1, 0), (0, 0, 0, 1))
    with pytest.raises(GeometryError):
        unique_quadric_through(C, miss, candidate_lines(C, 2)[0])


def test_meeting_lines_leave_a_pencil():
    F = field_of_order(2)
    C = standard_conic(F)
    a = candidate_lines(C, 0)[0]
    b = next(l for l in candidate_lines(C, 1) if pg.lines_meet(F, a, l))
    Qs = hyperbolic_quadrics_through(C, [a, b])
    assert len(Qs) >= 1
    for Q in Qs:
        assert Q.contains(a) and Q.contains(b) and meets_infinity_in(Q, C)


def test_conic_validation():
    F = field_of_order(3)
    with pytest.raises(QuadricError):
        Conic(QuadraticForm.from_dict(F, 3, {(0, 1): 1}))   # line pair
    with pytest.raises(QuadricError):
        Conic(QuadraticForm(F, 4, (0,) * 10))
