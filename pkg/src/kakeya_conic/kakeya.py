"""Kakeya line sets of the conic at infinity, their point sets, and the two
constructions from a hyperbolic quadric through the conic.

A line set is stored as a tuple indexed by conic point: ``lines[i]`` is the
chosen affine line whose point at infinity is P_i, with P_0..P_q in point
enumeration order.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from . import projective as pg
from .cliques import build_gamma
from .gf import FieldSpec, field_from_json
from .projective import GeometryError, Line, Point
from .quadrics import (Conic, HyperbolicQuadric, conic_from_json, hyperbolic_quadrics_through,
                       meets_infinity_in, points_of, standard_conic, standard_quadric,
                       unique_quadric_through)

REGULUS_SPLIT = "RegulusSplit"
SECANT_VARIANT = "SecantVariant"
OTHER = "Other"

ON_R = "on-R-line"
ON_RP = "on-R'-line"
ON_BOTH = "on-both"
SECANT_DETAILS = (ON_R, ON_RP, ON_BOTH)


class KakeyaError(ValueError):
    pass


def gamma(q: int) -> int:
    """Size of the smallest Kakeya sets: floor((3q^2 + 2q) / 4)."""
    return (3 * q * q + 2 * q) // 4


def regulus_split_size(q: int, k: int) -> int:
    return k * q + (q + 1 - k) * (q - k)


def secant_variant_size(q: int, k: int) -> int:
    return k * q + (q - k) ** 2 + (q - 1)


def affine_code(F: FieldSpec, P: Sequence[int]) -> int:
    """Index x + q*y + q^2*z of an affine point (x, y, z, 1)."""
    _, A = pg.split_affine(F, P)
    q = F.q
    return A[0] + q * A[1] + q * q * A[2]


def coverage_mask(F: FieldSpec, line: Line) -> int:
    mask = 0
    for P in pg.points_on(F, line):
        if P[3]:
            mask |= 1 << affine_code(F, P)
    return mask


@lru_cache(maxsize=None)
def candidate_lines(conic: Conic, i: int) -> tuple[Line, ...]:
    """The q^2 affine lines with direction P_i, in line-table order."""
    F = conic.field
    P = conic.points[i]
    q = F.q
    found = set()
    for x, y, z in itertools.product(range(q), repeat=3):
        found.add(pg.line_through(F, P, (x, y, z, 1)))
    index = pg.line_index(F)
    return tuple(sorted(found, key=index.__getitem__))


@dataclass(frozen=True)
class KakeyaLineSet:
    conic: Conic
    lines: tuple[Line, ...]

    def __post_init__(self):
        F = self.conic.field
        pts = self.conic.points
        if len(self.lines) != len(pts):
            raise KakeyaError(f"need exactly {len(pts)} lines, got {len(self.lines)}")
        for i, l in enumerate(self.lines):
            if pg.line_in_infinity(l):
                raise KakeyaError(f"line {i} lies in the plane at infinity")
            if pg.infinite_point(F, l) != pts[i]:
                raise KakeyaError(f"line {i} does not pass through conic point {i}")

    @property
    def field(self) -> FieldSpec:
        return self.conic.field

    @property
    def q(self) -> int:
        return self.conic.field.q

    def to_json(self) -> dict:
        F = self.field
        return {"p": F.p, "deg": F.deg, "modulus": list(F.modulus),
                "conic": self.conic.to_json(),
                "lines": [pg.line_to_json(l) for l in self.lines]}

    def dumps(self) -> str:
        return json.dumps(self.to_json()) + "\n"

    @classmethod
    def from_json(cls, obj: dict) -> "KakeyaLineSet":
        F = field_from_json(obj)
        conic = conic_from_json(F, obj["conic"])
        return cls(conic, tuple(pg.line_from_json(F, l) for l in obj["lines"]))


def line_set(conic: Conic, lines: Sequence[Line]) -> KakeyaLineSet:
    return KakeyaLineSet(conic, tuple(lines))


def random_line_set(conic: Conic, rng: random.Random) -> KakeyaLineSet:
    n = len(conic.points)
    return KakeyaLineSet(conic, tuple(rng.choice(candidate_lines(conic, i)) for i in range(n)))


@dataclass(frozen=True)
class KakeyaSet:
    points: frozenset[Point]

    @property
    def size(self) -> int:
        return len(self.points)


def kakeya_points(L: KakeyaLineSet) -> KakeyaSet:
    F = L.field
    return KakeyaSet(frozenset(P for l in L.lines for P in pg.affine_points(F, l)))


def size_via_cliques(L: KakeyaLineSet) -> int:
    q = L.q
    return q * (q + 1) - build_gamma(L).c_value


# --- constructions ---

def _check_quadric(Q: HyperbolicQuadric, conic: Conic) -> None:
    if not meets_infinity_in(Q, conic):
        raise KakeyaError("quadric does not meet the plane at infinity in the conic")


def _resolve(F: FieldSpec, Q: HyperbolicQuadric | None, conic: Conic | None):
    conic = standard_conic(F) if conic is None else conic
    Q = standard_quadric(F) if Q is None else Q
    _check_quadric(Q, conic)
    return Q, conic


def realize(conic: Conic, Q: HyperbolicQuadric, assignment: Sequence[str],
            secant: Line | None = None) -> KakeyaLineSet:
    """Line set taking, at each conic point, the R line, the R' line or the secant ("m")."""
    lines = []
    for P, side in zip(conic.points, assignment):
        if side == "m":
            if secant is None:
                raise KakeyaError("assignment uses a secant but none was given")
            lines.append(secant)
        else:
            lines.append(Q.line_through(side, P))
    return KakeyaLineSet(conic, tuple(lines))


def construct_regulus_split(F: FieldSpec, k: int, Q: HyperbolicQuadric | None = None,
                            conic: Conic | None = None) -> KakeyaLineSet:
    """R lines through P_0..P_{k-1}, R' lines through P_k..P_q."""
    q = F.q
    if not 0 <= k <= q + 1:
        raise KakeyaError(f"k must lie in 0..{q + 1}")
    Q, conic = _resolve(F, Q, conic)
    return realize(conic, Q, ["R"] * k + ["R'"] * (q + 1 - k))


def _secant_detail(Q: HyperbolicQuadric, conic: Conic, assignment: Sequence[str],
                   m: Line) -> tuple[str | None, Point | None]:
    """Classify where the secant ``m`` meets the quadric a second time."""
    F = Q.field
    if pg.line_in_infinity(m) or Q.contains(m):
        return None, None
    on_q = [P for P in pg.points_on(F, m) if Q.form(P) == 0]
    if len(on_q) != 2:
        return None, None
    X = next(P for P in on_q if P[3])
    a = conic.index_of(pg.infinite_point(F, Q.line_through("R", X)))
    b = conic.index_of(pg.infinite_point(F, Q.line_through("R'", X)))
    on_r = assignment[a] == "R"
    on_rp = assignment[b] == "R'"
    if on_r and on_rp:
        return ON_BOTH, X
    if on_r:
        return ON_R, X
    if on_rp:
        return ON_RP, X
    return None, X


def _secant_assignment(q: int, k: int) -> list[str]:
    return ["R"] * k + ["R'"] * (q - k) + ["m"]


def enumerate_secant_choices(F: FieldSpec, k: int, Q: HyperbolicQuadric | None = None,
                             conic: Conic | None = None) -> dict[str, list[Line]]:
    """Admissible secants through P_q for the k-split, grouped by where they meet Q again.

    The second point is never a conic point: a line through two conic
    points lies at infinity.
    """
    q = F.q
    if not 0 <= k <= q:
        raise KakeyaError(f"k must lie in 0..{q}")
    Q, conic = _resolve(F, Q, conic)
    assignment = _secant_assignment(q, k)
    out: dict[str, list[Line]] = {d: [] for d in SECANT_DETAILS}
    for m in candidate_lines(conic, q):
        detail, _ = _secant_detail(Q, conic, assignment, m)
        if detail is not None:
            out[detail].append(m)
    return out


def secant_choices_flat(F: FieldSpec, k: int, Q: HyperbolicQuadric | None = None,
                        conic: Conic | None = None) -> list[tuple[Line, str]]:
    """All admissible secants in line-table order, with their detail."""
    grouped = enumerate_secant_choices(F, k, Q, conic)
    index = pg.line_index(F)
    flat = [(m, d) for d, ms in grouped.items() for m in ms]
    return sorted(flat, key=lambda t: index[t[0]])


def construct_secant_variant(F: FieldSpec, k: int, Q: HyperbolicQuadric | None = None,
                             m: Line | None = None, conic: Conic | None = None) -> KakeyaLineSet:
    """R lines through P_0..P_{k-1}, R' lines through P_k..P_{q-1}, the secant m through P_q.

    Without ``m`` the first admissible secant in line-table order is used.
    """
    q = F.q
    if not 0 <= k <= q:
        raise KakeyaError(f"k must lie in 0..{q}")
    Q, conic = _resolve(F, Q, conic)
    assignment = _secant_assignment(q, k)
    if m is None:
        flat = secant_choices_flat(F, k, Q, conic)
        if not flat:
            raise KakeyaError(f"no admissible secant for k={k}")
        m = flat[0][0]
    if pg.line_in_infinity(m):
        raise KakeyaError("secant lies in the plane at infinity")
    if pg.infinite_point(F, m) != conic.points[q]:
        raise KakeyaError("secant must pass through P_q")
    if Q.contains(m):
        raise KakeyaError("m is a line of the quadric, not a secant")
    detail, X = _secant_detail(Q, conic, assignment, m)
    if X is None:
        raise KakeyaError("m is tangent to the quadric")
    if detail is None:
        raise KakeyaError("second intersection of m lies on no chosen regulus line")
    return realize(conic, Q, assignment, m)


# --- recognition ---

@dataclass(frozen=True)
class ConstructionLabel:
    variant: str
    k: int | None = None
    quadric: HyperbolicQuadric | None = None
    secant_detail: str | None = None
    assignment: tuple[str, ...] | None = None   # per conic point: "R", "R'" or "m"
    secant: Line | None = None
    pair: tuple[int, int] | None = None          # indices of the lines that fixed the quadric
    note: str = ""

    def realize(self, conic: Conic) -> KakeyaLineSet:
        if self.variant == OTHER:
            raise KakeyaError("an unexplained line set has no witness")
        return realize(conic, self.quadric, self.assignment, self.secant)

    def to_json(self) -> dict:
        out = {"variant": self.variant, "k": self.k}
        if self.variant != OTHER:
            out["quadric"] = self.quadric.form.to_json()
            out["assignment"] = list(self.assignment)
            out["pair"] = list(self.pair)
        if self.variant == SECANT_VARIANT:
            out["secant_detail"] = self.secant_detail
            out["secant"] = pg.line_to_json(self.secant)
        if self.note:
            out["note"] = self.note
        return out


_SWAP = {"R": "R'", "R'": "R", "m": "m"}
_SWAP_DETAIL = {ON_R: ON_RP, ON_RP: ON_R, ON_BOTH: ON_BOTH, None: None}


def _label_against(L: KakeyaLineSet, Q: HyperbolicQuadric, pair: tuple[int, int]) -> ConstructionLabel | None:
    sides = [Q.which_regulus(l) for l in L.lines]
    off = [i for i, s in enumerate(sides) if s is None]
    if not off:
        variant, detail, secant = REGULUS_SPLIT, None, None
        assignment = tuple(sides)
    elif len(off) == 1:
        assignment = tuple("m" if s is None else s for s in sides)
        secant = L.lines[off[0]]
        detail, _ = _secant_detail(Q, L.conic, assignment, secant)
        if detail is None:
            return None
        variant = SECANT_VARIANT
    else:
        return None
    # orient so that R is the smaller side; the reguli can always be swapped
    if assignment.count("R") > assignment.count("R'"):
        Q = Q.swapped()
        assignment = tuple(_SWAP[s] for s in assignment)
        detail = _SWAP_DETAIL[detail]
    return ConstructionLabel(variant, assignment.count("R"), Q, detail, assignment, secant, pair)


def _is_cone(L: KakeyaLineSet) -> bool:
    G = build_gamma(L)
    return len(G.maximal_cliques) == 1 and len(G.maximal_cliques[0]) == G.n


def recognize(L: KakeyaLineSet) -> ConstructionLabel:
    """Identify ``L`` as a regulus split or secant variant of some quadric through the conic.

    Disjoint pairs of lines are tried first, in index order; each fixes a unique
    quadric.  If none works, pairs of meeting lines are tried against every
    hyperbolic quadric through the conic containing both.  A regulus split
    beats a secant variant; otherwise the first hit wins.
    """
    F, conic, lines = L.field, L.conic, L.lines
    pairs = list(itertools.combinations(range(len(lines)), 2))
    disjoint = [p for p in pairs if not pg.lines_meet(F, lines[p[0]], lines[p[1]])]
    meeting = [p for p in pairs if p not in disjoint]

    secant_label = None
    for i, j in disjoint:
        label = _label_against(L, unique_quadric_through(conic, lines[i], lines[j]), (i, j))
        if label is None:
            continue
        if label.variant == REGULUS_SPLIT:
            return label
        secant_label = secant_label or label
    if secant_label is None:
        for i, j in meeting:
            for Q in _pencil(conic, lines[i], lines[j]):
                label = _label_against(L, Q, (i, j))
                if label is None:
                    continue
                if label.variant == REGULUS_SPLIT:
                    return label
                secant_label = secant_label or label
    if secant_label is not None:
        return secant_label
    return ConstructionLabel(OTHER, note="cone" if _is_cone(L) else "")


@lru_cache(maxsize=None)
def _pencil(conic: Conic, a: Line, b: Line) -> tuple[HyperbolicQuadric, ...]:
    return tuple(hyperbolic_quadrics_through(conic, [a, b]))

