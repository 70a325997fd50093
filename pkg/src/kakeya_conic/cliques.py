"""Intersection graphs of line sets and the small-graph machinery around them.

Graphs are simple, on vertices 0..n-1, stored as one neighbour bitmask per
vertex.  An edge code packs the pairs (i, j), i < j, in lexicographic order
into an integer, bit 0 being (0, 1).

Besides the clique functional C(G) = sum_i k_i (i - 1) this module holds the
exhaustive oracles for the triangle-free extremal results the classification
relies on, and a small isomorph-free graph generator.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import projective as pg

MAX_CLIQUE_VERTICES = 16
MAX_CANON_VERTICES = 8
MAX_ORACLE_VERTICES = 7


class BudgetExceeded(RuntimeError):
    pass


@lru_cache(maxsize=None)
def pair_bits(n: int) -> tuple[tuple[int, ...], ...]:
    """``pair_bits(n)[i][j]`` is the code bit of pair {i, j}."""
    bits = [[0] * n for _ in range(n)]
    for b, (i, j) in enumerate(itertools.combinations(range(n), 2)):
        bits[i][j] = bits[j][i] = 1 << b
    return tuple(tuple(r) for r in bits)


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class CliqueGraph:
    def __init__(self, n: int, adj: Sequence[int]):
        self.n = n
        self.adj = tuple(adj)
        for v, a in enumerate(self.adj):
            if a >> v & 1:
                raise ValueError("loops are not allowed")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "CliqueGraph":
        adj = [0] * n
        for i, j in edges:
            if i == j:
                raise ValueError("loops are not allowed")
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return cls(n, adj)

    @classmethod
    def from_code(cls, n: int, code: int) -> "CliqueGraph":
        adj = [0] * n
        for b, (i, j) in enumerate(itertools.combinations(range(n), 2)):
            if code >> b & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
        return cls(n, adj)

    @property
    def code(self) -> int:
        bits = pair_bits(self.n)
        c = 0
        for i in range(self.n):
            for j in _bits(self.adj[i] >> (i + 1) << (i + 1)):
                c |= bits[i][j]
        return c

    def __eq__(self, other):
        return isinstance(other, CliqueGraph) and self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self):
        return f"CliqueGraph(n={self.n}, edges={self.edges})"

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.adj[i] >> j & 1)

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if self.adj[i] >> j & 1]

    @property
    def edge_count(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    @cached_property
    def maximal_cliques(self) -> list[frozenset[int]]:
        """Bron-Kerbosch with pivoting over bitmasks; isolated vertices are cliques of size 1."""
        if self.n > MAX_CLIQUE_VERTICES:
            raise BudgetExceeded(f"clique enumeration limited to {MAX_CLIQUE_VERTICES} vertices")
        adj = self.adj
        out: list[frozenset[int]] = []

        def expand(R: int, P: int, X: int):
            if not P and not X:
                out.append(frozenset(_bits(R)))
                return
            pivot = max(_bits(P | X), key=lambda u: (P & adj[u]).bit_count())
            for v in _bits(P & ~adj[pivot]):
                expand(R | 1 << v, P & adj[v], X & adj[v])
                P &= ~(1 << v)
                X |= 1 << v

        expand(0, (1 << self.n) - 1, 0)
        return sorted(out, key=lambda c: (-len(c), sorted(c)))

    @property
    def histogram(self) -> dict[int, int]:
        """k_i: number of maximal cliques with i vertices."""
        hist: dict[int, int] = {}
        for c in self.maximal_cliques:
            hist[len(c)] = hist.get(len(c), 0) + 1
        return dict(sorted(hist.items()))

    @property
    def c_value(self) -> int:
        return sum(len(c) - 1 for c in self.maximal_cliques)

    @property
    def edge_disjoint(self) -> bool:
        covered = sum(len(c) * (len(c) - 1) // 2 for c in self.maximal_cliques)
        # every edge lies in some maximal clique, so equality means no edge twice
        return covered == self.edge_count

    @property
    def triangle_free(self) -> bool:
        return all(not (self.adj[i] & self.adj[j]) for i, j in self.edges)

    def bipartitions(self) -> list[tuple[frozenset[int], frozenset[int]]]:
        """All proper 2-colourings as (part of vertex 0 side, other part)."""
        out = []
        for colours in itertools.product((0, 1), repeat=self.n - 1):
            col = (0,) + colours
            if all(col[i] != col[j] for i, j in self.edges):
                V0 = frozenset(v for v in range(self.n) if col[v] == 0)
                out.append((V0, frozenset(range(self.n)) - V0))
        return out

    @property
    def is_bipartite(self) -> bool:
        colour: dict[int, int] = {}
        for s in range(self.n):
            if s in colour:
                continue
            colour[s] = 0
            stack = [s]
            while stack:
                u = stack.pop()
                for w in _bits(self.adj[u]):
                    if w not in colour:
                        colour[w] = 1 - colour[u]
                        stack.append(w)
                    elif colour[w] == colour[u]:
                        return False
        return True

    def relabel(self, perm: Sequence[int]) -> "CliqueGraph":
        """Graph with vertex v renamed perm[v]."""
        return CliqueGraph.from_edges(self.n, [(perm[i], perm[j]) for i, j in self.edges])

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, obj: dict) -> "CliqueGraph":
        return cls.from_edges(int(obj["n"]), [tuple(e) for e in obj["edges"]])


def maximal_cliques(G: CliqueGraph) -> list[frozenset[int]]:
    return G.maximal_cliques


def edge_disjoint(G: CliqueGraph) -> bool:
    return G.edge_disjoint


def c_value(G: CliqueGraph) -> int:
    return G.c_value


def build_gamma(L) -> CliqueGraph:
    """Intersection graph of a Kakeya line set: vertex i is the line through P_i."""
    F = L.field
    lines = L.lines
    edges = [(i, j) for i, j in itertools.combinations(range(len(lines)), 2)
             if pg.lines_meet(F, lines[i], lines[j])]
    return CliqueGraph.from_edges(len(lines), edges)


# --- named graphs ---

def complete_graph(n: int) -> CliqueGraph:
    return CliqueGraph.from_edges(n, itertools.combinations(range(n), 2))


def complete_bipartite(a: int, b: int) -> CliqueGraph:
    return CliqueGraph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def cycle_graph(n: int) -> CliqueGraph:
    return CliqueGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> CliqueGraph:
    return CliqueGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def sporadic_graph(n: int, split: Sequence[int] | None = None) -> CliqueGraph:
    """The near-bipartite graph showing the clique-sum bound is sharp.

    Vertices: W1 = 0..a-1, W2 = a..2a-1, then x, y, z with a = (n-3)/2.
    ``split`` lists the members of W2 joined to y (indices 0..a-1 into W2);
    the rest of W2 is joined to z.  Default: all of W2 goes to y.
    """
    if n % 2 == 0 or n < 5:
        raise ValueError("sporadic graph needs odd n >= 5")
    a = (n - 3) // 2
    W1 = list(range(a))
    W2 = list(range(a, 2 * a))
    x, y, z = 2 * a, 2 * a + 1, 2 * a + 2
    to_y = set(range(a) if split is None else split)
    if not to_y <= set(range(a)):
        raise ValueError("split must index into W2")
    edges = [(u, w) for u in W1 for w in W2 + [x]]
    edges += [(y, W2[i]) for i in sorted(to_y)] + [(z, W2[i]) for i in range(a) if i not in to_y]
    edges += [(x, y), (x, z), (y, z)]
    return CliqueGraph.from_edges(n, edges)


def _g(n, edges):
    return CliqueGraph.from_edges(n, edges)


# Figures of the small-q census: f on 3, m on 4, d on 5 vertices.
NAMED_GRAPHS: dict[str, CliqueGraph] = {
    "f1": _g(3, []),
    "f2": _g(3, [(0, 1)]),
    "f3": _g(3, [(0, 1), (1, 2)]),
    "f4": _g(3, [(0, 1), (1, 2), (0, 2)]),
    "m1": cycle_graph(4),
    "m2": complete_graph(4),
    "m3": _g(4, [(0, 1), (1, 2), (0, 2), (1, 3)]),
    "m4": path_graph(4),
    "m5": _g(4, [(0, 1), (0, 2), (0, 3)]),
    "m6": _g(4, [(0, 1), (1, 2), (0, 2)]),
    "m7": _g(4, [(0, 1), (1, 2)]),
    "m8": _g(4, [(0, 1), (2, 3)]),
    "m9": _g(4, [(0, 1)]),
    "m10": _g(4, []),
    "d1": complete_bipartite(2, 3),
    "d2": _g(5, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4)]),
    "d3": _g(5, [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (3, 4)]),
    "d4": cycle_graph(5),
}


# --- canonical forms ---

def _vertex_invariant(G: CliqueGraph, v: int) -> tuple:
    return (G.degree(v), tuple(sorted(G.degree(w) for w in _bits(G.adj[v]))))


def _ordered_classes(G: CliqueGraph) -> list[list[int]]:
    inv = {v: _vertex_invariant(G, v) for v in range(G.n)}
    keys = sorted(set(inv.values()), reverse=True)
    return [[v for v in range(G.n) if inv[v] == k] for k in keys]


def _candidate_orders(G: CliqueGraph):
    """Vertex orders listing invariant classes in fixed sequence, each class permuted freely."""
    classes = _ordered_classes(G)
    for parts in itertools.product(*(itertools.permutations(c) for c in classes)):
        yield [v for part in parts for v in part]


def _code_in_order(G: CliqueGraph, order: Sequence[int]) -> int:
    n = G.n
    pos = [0] * n
    for k, v in enumerate(order):
        pos[v] = k
    bits = pair_bits(n)
    c = 0
    for i, j in G.edges:
        c |= bits[pos[i]][pos[j]]
    return c


@lru_cache(maxsize=1 << 16)
def _canonical_code(n: int, adj: tuple[int, ...]) -> int:
    G = CliqueGraph(n, adj)
    return min(_code_in_order(G, order) for order in _candidate_orders(G))


def canonical_form(G: CliqueGraph) -> int:
    """Isomorphism-invariant edge code.

    Minimum edge code over vertex orders that respect a degree-based vertex
    invariant; two graphs get the same value iff they are isomorphic.
    """
    if G.n > MAX_CANON_VERTICES:
        raise BudgetExceeded(f"canonical forms limited to {MAX_CANON_VERTICES} vertices")
    return _canonical_code(G.n, G.adj)


def canonical_hex(G: CliqueGraph) -> str:
    return f"{G.n}:{canonical_form(G):x}"


def isomorphic(G1: CliqueGraph, G2: CliqueGraph) -> bool:
    return G1.n == G2.n and G1.edge_count == G2.edge_count and canonical_form(G1) == canonical_form(G2)


def automorphism_count(G: CliqueGraph) -> int:
    target = G.code
    return sum(1 for order in _candidate_orders(G) if _code_in_order(G, order) == target)


@lru_cache(maxsize=None)
def _named_by_canon() -> dict[tuple[int, int], str]:
    return {(g.n, canonical_form(g)): name for name, g in NAMED_GRAPHS.items()}


def graph_name(G: CliqueGraph) -> str | None:
    """Figure name (f1..f4, m1..m10, d1..d4) of G, if it has one."""
    if G.n > MAX_CANON_VERTICES:
        return None
    return _named_by_canon().get((G.n, canonical_form(G)))


# --- isomorph-free enumeration ---

@lru_cache(maxsize=None)
def _all_classes(n: int) -> tuple[CliqueGraph, ...]:
    if n <= 1:
        return (CliqueGraph(n, [0] * n),)
    seen: dict[int, CliqueGraph] = {}
    for H in _all_classes(n - 1):
        for nbrs in range(1 << (n - 1)):
            adj = list(H.adj) + [nbrs]
            for v in _bits(nbrs):
                adj[v] |= 1 << (n - 1)
            G = CliqueGraph(n, adj)
            c = canonical_form(G)
            if c not in seen:
                seen[c] = CliqueGraph.from_code(n, c)
    return tuple(seen[c] for c in sorted(seen, key=lambda c: (c.bit_count(), c)))


def enumerate_graphs(n: int, filter: str = "all") -> list[CliqueGraph]:
    """One representative per isomorphism class on n vertices.

    ``filter`` is "all" or "edge-disjoint" (maximal cliques pairwise edge-disjoint).
    Representatives are the canonical graphs, ordered by edge count then code.
    """
    if n > MAX_ORACLE_VERTICES:
        raise BudgetExceeded(f"graph enumeration limited to {MAX_ORACLE_VERTICES} vertices")
    if filter not in ("all", "edge-disjoint"):
        raise ValueError(f"unknown filter {filter!r}")
    graphs = list(_all_classes(n))
    if filter == "edge-disjoint":
        graphs = [G for G in graphs if G.edge_disjoint]
    return graphs


def census_rows(graphs: Iterable[CliqueGraph]) -> list[dict]:
    return [{"canonical_form_hex": f"{canonical_form(G):x}",
             "edge_count": G.edge_count,
             "C_value": G.c_value,
             "edge_disjoint": G.edge_disjoint,
             "bipartite": G.is_bipartite} for G in graphs]


def census_csv(graphs: Iterable[CliqueGraph]) -> str:
    buf = io.StringIO()
    fields = ["canonical_form_hex", "edge_count", "C_value", "edge_disjoint", "bipartite"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for row in census_rows(graphs):
        w.writerow({k: (str(v).lower() if isinstance(v, bool) else v) for k, v in row.items()})
    return buf.getvalue()


def c_distribution(graphs: Iterable[CliqueGraph]) -> dict[int, int]:
    dist: dict[int, int] = {}
    for G in graphs:
        dist[G.c_value] = dist.get(G.c_value, 0) + 1
    return dict(sorted(dist.items()))


# --- exhaustive oracles over labelled graphs ---

def _check_budget(n: int):
    if n > MAX_ORACLE_VERTICES:
        raise BudgetExceeded(f"exhaustive oracles limited to n <= {MAX_ORACLE_VERTICES}")


def _labelled_scan(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Edge codes of all labelled graphs, their edge counts and a triangle-free mask."""
    m = n * (n - 1) // 2
    codes = np.arange(1 << m, dtype=np.uint32)
    counts = np.bitwise_count(codes).astype(np.int64)
    has_triangle = np.zeros(codes.shape, dtype=bool)
    bits = pair_bits(n)
    for a, b, c in itertools.combinations(range(n), 3):
        t = np.uint32(bits[a][b] | bits[a][c] | bits[b][c])
        has_triangle |= (codes & t) == t
    return codes, counts, ~has_triangle


def _is_balanced_complete_bipartite(G: CliqueGraph) -> bool:
    n = G.n
    return isomorphic(G, complete_bipartite((n + 1) // 2, n // 2))


@dataclass
class MantelReport:
    n: int
    graphs_scanned: int
    triangle_free: int
    max_edges: int
    bound: int
    extremal_count: int
    extremal_all_balanced_bipartite: bool

    @property
    def ok(self) -> bool:
        return self.max_edges == self.bound and self.extremal_all_balanced_bipartite


def mantel_oracle(n: int) -> MantelReport:
    """Scan every labelled graph on n vertices for the triangle-free edge maximum."""
    _check_budget(n)
    codes, counts, tf = _labelled_scan(n)
    best = int(counts[tf].max())
    extremal = codes[tf & (counts == best)]
    all_bip = all(_is_balanced_complete_bipartite(CliqueGraph.from_code(n, int(c))) for c in extremal)
    return MantelReport(n, int(codes.size), int(tf.sum()), best, n * n // 4,
                        int(extremal.size), all_bip)


@dataclass
class HansonToftReport:
    n: int
    graphs_scanned: int
    checked: dict[int, int]                  # l -> triangle-free graphs with floor(n^2/4) - l edges
    violations: list[dict]                   # non-bipartite graphs with l below the bound
    boundary_l: int
    boundary_witness: dict | None            # a non-bipartite example at l = floor(n/2) - 1, if any

    @property
    def ok(self) -> bool:
        return not self.violations


def hanson_toft_oracle(n: int) -> HansonToftReport:
    """Every triangle-free graph with floor(n^2/4) - l edges, l < floor(n/2) - 1, is bipartite."""
    _check_budget(n)
    codes, counts, tf = _labelled_scan(n)
    top = n * n // 4
    checked, violations = {}, []
    for l in range(max(0, n // 2 - 1)):
        sel = codes[tf & (counts == top - l)]
        checked[l] = int(sel.size)
        for c in sel:
            G = CliqueGraph.from_code(n, int(c))
            if not G.is_bipartite:
                violations.append({"l": l, **G.to_json()})
    boundary = n // 2 - 1
    witness = None
    if boundary >= 0:
        for c in codes[tf & (counts == top - boundary)]:
            G = CliqueGraph.from_code(n, int(c))
            if not G.is_bipartite:
                witness = G.to_json()
                break
    return HansonToftReport(n, int(codes.size), checked, violations, boundary, witness)


@dataclass
class BipartiteStructure:
    parts: tuple[frozenset[int], frozenset[int]]   # (V1, V2), |V1| >= |V2|
    delta: int
    removed_edges: list[tuple[int, int]]
    epsilon: int

    def rebuild(self, n: int) -> CliqueGraph:
        V1, V2 = self.parts
        removed = set(self.removed_edges)
        return CliqueGraph.from_edges(
            n, [(min(a, b), max(a, b)) for a in V1 for b in V2 if (min(a, b), max(a, b)) not in removed])

    def expected_removed(self, n: int) -> int:
        d = self.delta
        return self.epsilon - d * d if n % 2 == 0 else self.epsilon - d * d - d

    def delta_within_bound(self, n: int) -> bool:
        # delta <= sqrt(eps)  resp.  delta <= sqrt(eps + 1/4) - 1/2, in integers
        d = self.delta
        return d * d <= self.epsilon if n % 2 == 0 else d * d + d <= self.epsilon


def main_lemma_threshold(n: int) -> int:
    """C(G) must exceed this for the structure statement to apply."""
    return n * n // 4 - n // 2 + 1


def bipartite_structure(G: CliqueGraph) -> BipartiteStructure | None:
    """A decomposition as K_{V1,V2} minus cross edges meeting the delta bound, if one exists."""
    n = G.n
    eps = n * n // 4 - G.c_value
    best = None
    for A, B in G.bipartitions():
        V1, V2 = (A, B) if len(A) >= len(B) else (B, A)
        delta = len(V1) - (n + 1) // 2
        if delta < 0:
            continue
        removed = sorted((min(a, b), max(a, b)) for a in V1 for b in V2 if not G.adjacent(a, b))
        s = BipartiteStructure((V1, V2), delta, removed, eps)
        if len(removed) != s.expected_removed(n) or not s.delta_within_bound(n):
            continue
        if best is None or (delta, removed) < (best.delta, best.removed_edges):
            best = s
    return best


@dataclass
class MainLemmaReport:
    n: int
    classes_scanned: int
    labelled_graphs_covered: int
    threshold: int
    qualifying: int
    structures: list[dict] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)
    at_threshold_non_bipartite: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and self.labelled_graphs_covered == 2 ** (self.n * (self.n - 1) // 2)


def main_lemma_oracle(n: int) -> MainLemmaReport:
    """Check the bipartite-structure claim on every graph with edge-disjoint maximal cliques.

    Runs over isomorphism classes (every property involved is invariant); the
    orbit sizes n!/|Aut| are summed to confirm all labelled graphs are covered.
    """
    _check_budget(n)
    classes = enumerate_graphs(n)
    covered = sum(math.factorial(n) // automorphism_count(G) for G in classes)
    thr = main_lemma_threshold(n)
    rep = MainLemmaReport(n, len(classes), covered, thr, 0)
    for G in classes:
        if not G.edge_disjoint:
            continue
        C = G.c_value
        if C == thr and not G.is_bipartite:
            rep.at_threshold_non_bipartite.append(G.to_json())
        if C <= thr:
            continue
        rep.qualifying += 1
        s = bipartite_structure(G) if G.is_bipartite else None
        if s is None or s.rebuild(n) != G:
            rep.violations.append(G.to_json())
            continue
        rep.structures.append({
            **G.to_json(), "C": C, "V1": sorted(s.parts[0]), "V2": sorted(s.parts[1]),
            "delta": s.delta, "epsilon": s.epsilon, "removed": len(s.removed_edges)})
    return rep
