"""Arithmetic in GF(p^deg).

Elements are integer codes: the polynomial c_0 + c_1 x + ... + c_{deg-1} x^{deg-1}
over GF(p) is stored as c_0 + c_1 p + ... + c_{deg-1} p^{deg-1}.  The hot paths
(geometry, search) work on raw codes through ``FieldSpec`` methods; the small
``FieldElement`` wrapper gives operator syntax for interactive use.

Row reduction and nullspaces over the field also live here since every
geometric module needs them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

MAX_ORDER = 1 << 16
TABLE_ORDER = 256  # full add/mul tables up to this order, log tables beyond


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q`` as ``(p, deg)`` with ``q == p**deg``; raise if not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            break
    deg, r = 0, q
    while r % p == 0:
        r //= p
        deg += 1
    if r != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, deg


# --- polynomials over GF(p) as coefficient lists, constant term first ---

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _trim(list(a))
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1 .. deg/2."""
    deg = len(poly) - 1
    if deg < 1 or poly[-1] % p == 0:
        return False
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = list(low) + [1]
            if not _poly_mod(poly, divisor, p):
                return False
    return True


def least_irreducible(p: int, deg: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree ``deg``.

    Coefficients are compared from the x^(deg-1) term down to the constant.
    Returned constant term first.
    """
    for high_first in itertools.product(range(p), repeat=deg):
        poly = tuple(reversed(high_first)) + (1,)
        if is_irreducible(poly, p):
            return poly
    raise FieldError(f"no irreducible polynomial of degree {deg} over GF({p})")  # pragma: no cover


class FieldSpec:
    """The field GF(p^deg) with a fixed modulus; immutable after construction."""

    __slots__ = ("p", "deg", "modulus", "q", "_add", "_mul", "_neg", "_inv", "_exp", "_log")

    def __init__(self, p: int, deg: int, modulus: Sequence[int]):
        q = p ** deg
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != deg + 1 or modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree deg")
        if not is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is reducible over GF({p})")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "deg", deg)
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "q", q)
        self._build_tables()

    def __setattr__(self, name, value):
        raise AttributeError("FieldSpec is immutable")

    def __repr__(self):
        return f"FieldSpec(p={self.p}, deg={self.deg}, modulus={list(self.modulus)})"

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.deg, self.modulus) == (
            other.p, other.deg, other.modulus)

    def __hash__(self):
        return hash((self.p, self.deg, self.modulus))

    def __reduce__(self):
        return (FieldSpec, (self.p, self.deg, self.modulus))

    # --- code <-> digits ---

    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.deg):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def from_digits(self, digits: Iterable[int]) -> int:
        code, scale = 0, 1
        for d in digits:
            code += (d % self.p) * scale
            scale *= self.p
        return code

    def _slow_add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        return self.from_digits(x + y for x, y in zip(self.digits(a), self.digits(b)))

    def _slow_mul(self, a: int, b: int) -> int:
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.deg - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        return self.from_digits(_poly_mod(prod, self.modulus, self.p))

    def _build_tables(self):
        p, q = self.p, self.q
        set_ = object.__setattr__
        set_(self, "_neg", tuple(self.from_digits(-d for d in self.digits(a)) for a in range(q)))
        # find a generator of the multiplicative group
        order = q - 1
        factors = [r for r in range(2, order + 1) if order % r == 0 and is_prime(r)]
        gen = None
        for g in range(1, q):
            if all(self._slow_pow(g, order // r) != 1 for r in factors):
                gen = g
                break
        assert gen is not None
        exp = [1] * (2 * order)
        for i in range(1, 2 * order):
            exp[i] = self._slow_mul(exp[i - 1], gen)
        log = [0] * q
        for i in range(order):
            log[exp[i]] = i
        set_(self, "_exp", tuple(exp))
        set_(self, "_log", tuple(log))
        inv = [0] * q
        for a in range(1, q):
            inv[a] = exp[(order - log[a]) % order]
        set_(self, "_inv", tuple(inv))
        if q <= TABLE_ORDER:
            add = tuple(tuple(self._slow_add(a, b) for b in range(q)) for a in range(q))
            mul = tuple(
                tuple(0 if a == 0 or b == 0 else exp[log[a] + log[b]] for b in range(q))
                for a in range(q))
        else:
            add = mul = None
        set_(self, "_add", add)
        set_(self, "_mul", mul)

    def _slow_pow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._slow_mul(result, base)
            base = self._slow_mul(base, base)
            e >>= 1
        return result

    # --- arithmetic on codes ---

    def add(self, a: int, b: int) -> int:
        if self._add is not None:
            return self._add[a][b]
        return self._slow_add(a, b)

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if self._mul is not None:
            return self._mul[a][b]
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(%d)" % self.q)
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def elements(self) -> list[int]:
        return list(range(self.q))

    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        acc = 0
        for a, b in zip(u, v):
            if a and b:
                acc = self.add(acc, self.mul(a, b))
        return acc

    @property
    def add_table(self):
        return self._add

    @property
    def mul_table(self):
        return self._mul

    def element(self, code: int) -> "FieldElement":
        return FieldElement(self, code)

    def to_json(self) -> dict:
        return {"p": self.p, "deg": self.deg, "modulus": list(self.modulus)}


@lru_cache(maxsize=None)
def make_field(p: int, deg: int = 1) -> FieldSpec:
    """GF(p^deg) with the lexicographically least monic irreducible modulus."""
    if not isinstance(p, int) or not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if not isinstance(deg, int) or deg < 1:
        raise FieldError(f"degree must be a positive integer, got {deg}")
    if p ** deg > MAX_ORDER:
        raise FieldError(f"GF({p}^{deg}) exceeds the size cap {MAX_ORDER}")
    return FieldSpec(p, deg, least_irreducible(p, deg))


def field_of_order(q: int) -> FieldSpec:
    return make_field(*prime_power(q))


def field_from_json(obj: dict) -> FieldSpec:
    spec = FieldSpec(int(obj["p"]), int(obj["deg"]), obj["modulus"])
    return spec


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    code: int

    def __post_init__(self):
        if not 0 <= self.code < self.field.q:
            raise FieldError(f"code {self.code} out of range for GF({self.field.q})")

    def _other(self, b) -> int:
        if isinstance(b, FieldElement):
            if b.field != self.field:
                raise FieldError("elements of different fields")
            return b.code
        if isinstance(b, int):
            return b % self.field.p if self.field.deg == 1 else self.field.from_digits([b])
        return NotImplemented

    def __add__(self, b):
        c = self._other(b)
        return NotImplemented if c is NotImplemented else FieldElement(self.field, self.field.add(self.code, c))

    __radd__ = __add__

    def __sub__(self, b):
        c = self._other(b)
        return NotImplemented if c is NotImplemented else FieldElement(self.field, self.field.sub(self.code, c))

    def __rsub__(self, b):
        c = self._other(b)
        return NotImplemented if c is NotImplemented else FieldElement(self.field, self.field.sub(c, self.code))

    def __mul__(self, b):
        c = self._other(b)
        return NotImplemented if c is NotImplemented else FieldElement(self.field, self.field.mul(self.code, c))

    __rmul__ = __mul__

    def __truediv__(self, b):
        c = self._other(b)
        return NotImplemented if c is NotImplemented else FieldElement(self.field, self.field.div(self.code, c))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.code, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.code))

    def __bool__(self):
        return self.code != 0

    def __int__(self):
        return self.code

    def __repr__(self):
        return f"GF({self.field.q})({self.code})"


def _check_same(a: FieldElement, b: FieldElement):
    if a.field != b.field:
        raise FieldError("elements of different fields")


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same(a, b)
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same(a, b)
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def power(a: FieldElement, e: int) -> FieldElement:
    return a ** e


def elements(spec: FieldSpec) -> list[FieldElement]:
    return [FieldElement(spec, c) for c in range(spec.q)]


# --- linear algebra over the field ---

def row_reduce(F: FieldSpec, rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    A = [list(r) for r in rows]
    if not A:
        return [], []
    ncols = len(A[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(A)) if A[i][c]), None)
        if pivot is None:
            continue
        A[r], A[pivot] = A[pivot], A[r]
        s = F.inv(A[r][c])
        A[r] = [F.mul(s, x) for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank(F: FieldSpec, rows: Sequence[Sequence[int]]) -> int:
    return len(row_reduce(F, rows)[0])


def nullspace(F: FieldSpec, rows: Sequence[Sequence[int]], ncols: int | None = None) -> list[list[int]]:
    """Basis of {x : A x = 0}, one vector per free column, in column order."""
    if ncols is None:
        ncols = len(rows[0])
    R, pivots = row_reduce(F, rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(R, pivots):
            v[pc] = F.neg(row[f])
        basis.append(v)
    return basis
