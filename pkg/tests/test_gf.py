import itertools
import pickle

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kakeya_conic import gf
from kakeya_conic.gf import FieldError, field_of_order, make_field, nullspace, rank, row_reduce

ORDERS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64]


# independent oracle: schoolbook polynomial arithmetic on coefficient lists

def _pmul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def _pmod(a, m, p):
    a = list(a)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, y in enumerate(m):
            a[shift + i] = (a[shift + i] - c * y) % p
        a.pop()
    return a


def _digits(code, p, n):
    return [(code // p ** i) % p for i in range(n)]


def _code(d, p):
    return sum(x * p ** i for i, x in enumerate(d))


def _reducible_monics(p, deg):
    """Products of two monic polynomials of positive degree."""
    out = set()
    for d in range(1, deg // 2 + 1):
        for a in itertools.product(range(p), repeat=d):
            for b in itertools.product(range(p), repeat=deg - d):
                out.add(tuple(_pmul(list(a) + [1], list(b) + [1], p)))
    return out


def test_small_fields():
    assert make_field(2, 1).q == 2
    F3 = make_field(3, 1)
    assert F3.q == 3 and F3.add(1, 2) == 0
    F4 = make_field(2, 2)
    assert F4.modulus == (1, 1, 1)
    assert F4.mul(2, 2) == 3


@pytest.mark.parametrize("p,deg", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (2, 5), (7, 2)])
def test_modulus_is_least_irreducible(p, deg):
    reducible = _reducible_monics(p, deg)
    # lexicographic over (c_{deg-1}, ..., c_0)
    for high_first in itertools.product(range(p), repeat=deg):
        low_first = tuple(reversed(high_first))
        poly = low_first + (1,)
        if poly not in reducible:
            break
    assert make_field(p, deg).modulus == poly


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25, 27])
def test_multiplication_matches_polynomial_oracle(q):
    F = field_of_order(q)
    p, n = F.p, F.deg
    for a in range(q):
        for b in range(q):
            want = _code(_pmod(_pmul(_digits(a, p, n), _digits(b, p, n), p), list(F.modulus), p), p)
            assert F.mul(a, b) == want
            assert F.add(a, b) == _code([(x + y) % p for x, y in zip(_digits(a, p, n), _digits(b, p, n))], p)


@pytest.mark.parametrize("q", ORDERS)
def test_field_axioms_exhaustive(q):
    F = field_of_order(q)
    E = range(q)
    for a in E:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
        for b in E:
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)
    if q <= 16:
        for a, b, c in itertools.product(E, repeat=3):
            assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
            assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
            assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


@pytest.mark.parametrize("q", ORDERS)
def test_multiplicative_group_is_cyclic(q):
    F = field_of_order(q)

    def order(a):
        k, x = 1, a
        while x != 1:
            x = F.mul(x, a)
            k += 1
        return k

    assert max(order(a) for a in range(1, q)) == q - 1


@pytest.mark.parametrize("q", ORDERS)
def test_frobenius_is_additive(q):
    F = field_of_order(q)
    p = F.p
    for a in range(q):
        for b in range(q):
            assert F.pow(F.add(a, b), p) == F.add(F.pow(a, p), F.pow(b, p))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(ORDERS), st.data())
def test_element_operators(q, data):
    F = field_of_order(q)
    a = F.element(data.draw(st.integers(0, q - 1)))
    b = F.element(data.draw(st.integers(0, q - 1)))
    assert (a + b) - b == a
    assert a * b == b * a
    assert -(-a) == a
    if int(b):
        assert (a / b) * b == a
        assert b ** (q - 1) == F.element(1)
    assert gf.add(a, b) == a + b and gf.mul(a, b) == a * b


def test_elements_listing():
    assert [int(e) for e in gf.elements(make_field(2))] == [0, 1]
    assert [int(e) for e in gf.elements(make_field(2, 2))] == [0, 1, 2, 3]
    assert len(gf.elements(make_field(5))) == 5


def test_errors():
    with pytest.raises(FieldError):
        make_field(4)
    with pytest.raises(FieldError):
        make_field(2, 0)
    with pytest.raises(FieldError):
        make_field(2, 17)
    with pytest.raises(FieldError):
        field_of_order(6)
    with pytest.raises(ZeroDivisionError):
        make_field(5).inv(0)
    with pytest.raises(ValueError):
        gf.add(make_field(3).element(1), make_field(5).element(1))


def test_immutable_and_picklable():
    F = field_of_order(9)
    with pytest.raises(AttributeError):
        F.p = 5
    G = pickle.loads(pickle.dumps(F))
    assert G == F and hash(G) == hash(F) and G.mul(5, 7) == F.mul(5, 7)
    assert gf.field_from_json(F.to_json()) == F


def test_large_field_without_tables():
    F = field_of_order(2 ** 10)
    assert F.add_table is None
    for a in (1, 2, 3, 500, 1023):
        assert F.mul(a, F.inv(a)) == 1


def test_linear_algebra():
    F = field_of_order(3)
    rows = [[1, 2, 0, 1], [2, 1, 0, 2], [0, 0, 1, 1]]
    R, piv = row_reduce(F, rows)
    assert rank(F, rows) == 2 and len(R) == 2 and piv == [0, 2]
    ns = nullspace(F, rows, 4)
    assert len(ns) == 2
    for v in ns:
        for r in rows:
            assert F.dot(r, v) == 0
