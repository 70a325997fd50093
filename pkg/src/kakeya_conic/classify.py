"""Exhaustive enumeration of Kakeya line sets for small q.

The search assigns one line per conic point, depth first in conic-point
order.  Candidate lines through each P_i are pre-indexed and carry a bitset
of the affine points they cover, so the inner loop is only bitwise OR,
AND and popcount.  Intersection graphs are accumulated as edge codes and
canonicalized once per distinct code at the end.
"""

from __future__ import annotations

import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from .cliques import BudgetExceeded, CliqueGraph, canonical_form, cycle_graph, graph_name, pair_bits
from .gf import FieldSpec
from .kakeya import (OTHER, REGULUS_SPLIT, SECANT_VARIANT, ON_BOTH, ON_R, ON_RP, KakeyaLineSet,
                     candidate_lines, construct_secant_variant, coverage_mask, kakeya_points, recognize,
                     regulus_split_size)
from .quadrics import Conic, standard_conic

MAX_FULL_Q = 4
MAX_PRUNED_Q = 5


def theorem_bound(q: int) -> int:
    """Sets strictly smaller than this are regulus splits (q odd / q even bounds)."""
    if q % 2:
        return 3 * (q * q - 1) // 4 + q
    return 3 * q * q // 4 + q - 1


def theorem_expression(q: int) -> str:
    return "3/4*(q^2-1)+q" if q % 2 else "3/4*q^2+q-1"


@dataclass(frozen=True)
class SearchConfig:
    field: FieldSpec
    size_threshold: int | None = None       # keep only sets with |K(L)| < threshold
    symmetry_reduction: bool = False
    worker_count: int = 1
    recognize_limit: int | None = None      # run recognition on sets of size <= this
    prune: bool = True                      # branch-and-bound against size_threshold
    allow_large: bool = False               # permit q = 5 without a threshold

    def __post_init__(self):
        q = self.field.q
        if self.size_threshold is not None and self.size_threshold > q * (q + 1) + 1:
            raise ValueError("threshold exceeds q(q+1)")
        if self.worker_count < 1:
            raise ValueError("worker_count must be positive")

    @property
    def recognition_cutoff(self) -> int:
        if self.recognize_limit is not None:
            return self.recognize_limit
        q = self.field.q
        return q * (q + 1) if q <= 2 else theorem_bound(q)


@dataclass
class ClassificationReport:
    q: int
    config: dict
    sets_enumerated: int
    size_counts: dict[int, int]
    type_counts: dict[tuple[int, int], int]           # (size, canonical code) -> count
    label_counts: dict[tuple, int]                    # (size, code, variant, k, detail, note) -> count
    unexplained: list[dict]
    nodes: int
    wall_time_ms: int | None = None
    _stored: list = field(default_factory=list, repr=False)

    @property
    def min_size(self) -> int | None:
        return min(self.size_counts) if self.size_counts else None

    def type_name(self, code: int) -> str:
        G = CliqueGraph.from_code(self.q + 1, code)
        return graph_name(G) or f"{self.q + 1}:{code:x}"

    def types_of_size(self, size: int) -> dict[str, int]:
        return {self.type_name(c): n for (s, c), n in sorted(self.type_counts.items()) if s == size}

    def labels_of_size(self, size: int) -> dict[tuple, int]:
        return {(self.type_name(c), *rest): n
                for (s, c, *rest), n in sorted(self.label_counts.items(), key=_label_sort) if s == size}

    def census(self) -> list[dict]:
        n = self.q + 1
        out = []
        for size in sorted(self.size_counts):
            types = []
            for (s, code), cnt in sorted(self.type_counts.items()):
                if s != size:
                    continue
                G = CliqueGraph.from_code(n, code)
                types.append({"type": self.type_name(code), "canonical_form_hex": f"{code:x}",
                              "C": G.c_value, "count": cnt})
            labels = [{"type": self.type_name(code), "variant": v, "k": k, "secant_detail": d,
                       "note": note, "count": cnt}
                      for (s, code, v, k, d, note), cnt in sorted(self.label_counts.items(), key=_label_sort)
                      if s == size]
            entry = {"size": size, "count": self.size_counts[size], "types": types}
            if labels:
                entry["labels"] = labels
            out.append(entry)
        return out

    def to_dict(self, include_timing: bool = False) -> dict:
        return {"q": self.q, "config": self.config, "sets_enumerated": self.sets_enumerated,
                "min_size": self.min_size, "census": self.census(),
                "unexplained": self.unexplained, "prune_nodes": self.nodes,
                "wall_time_ms": self.wall_time_ms if include_timing else None}


def _label_sort(item):
    key, _ = item
    return tuple("" if x is None else x for x in key)


@dataclass(frozen=True)
class SearchTables:
    conic: Conic
    lines: tuple[tuple, ...]   # lines[i][idx]: candidate idx through P_i
    cov: tuple[tuple[int, ...], ...]


@lru_cache(maxsize=None)
def search_tables(F: FieldSpec) -> SearchTables:
    conic = standard_conic(F)
    n = F.q + 1
    lines = tuple(candidate_lines(conic, i) for i in range(n))
    cov = tuple(tuple(coverage_mask(F, l) for l in lines[i]) for i in range(n))
    return SearchTables(conic, lines, cov)


def _min_future_gain(q: int) -> list[int]:
    """After d lines are placed, the remaining ones add at least this many new points."""
    n = q + 1
    return [sum(q - t for t in range(d, n)) for d in range(n + 1)]


def _search_chunk(F: FieldSpec, first: list[int], threshold: int | None, prune: bool, limit: int):
    """Enumerate every line set whose first line index is in ``first``."""
    q = F.q
    n = q + 1
    cov = search_tables(F).cov
    bits = pair_bits(n)
    gain = _min_future_gain(q)
    thr = threshold if threshold is not None else q * (q + 1) + 1
    cut = prune and threshold is not None
    counts: Counter = Counter()
    stored: list[tuple[int, tuple[int, ...]]] = []
    masks = [0] * n
    choice = [0] * n
    nodes = 0
    last = n - 1
    last_cov = cov[last]
    last_bits = [bits[j][last] for j in range(last)]

    def leaves(union: int, code: int):
        nonlocal nodes
        nodes += len(last_cov)
        prev = masks[:last]
        for idx, c in enumerate(last_cov):
            size = (union | c).bit_count()
            if size >= thr:
                continue
            a = code
            for j in range(last):
                if prev[j] & c:
                    a |= last_bits[j]
            counts[size, a] += 1
            if size <= limit:
                choice[last] = idx
                stored.append((size, tuple(choice)))

    def rec(d: int, union: int, code: int):
        nonlocal nodes
        if d == last:
            leaves(union, code)
            return
        for idx, c in enumerate(cov[d]):
            nodes += 1
            u = union | c
            if cut and u.bit_count() + gain[d + 1] >= thr:
                continue
            a = code
            for j in range(d):
                if masks[j] & c:
                    a |= bits[j][d]
            masks[d] = c
            choice[d] = idx
            rec(d + 1, u, a)

    for idx in first:
        nodes += 1
        c = cov[0][idx]
        if cut and c.bit_count() + gain[1] >= thr:
            continue
        masks[0] = c
        choice[0] = idx
        if n == 1:  # pragma: no cover - q >= 2 always
            continue
        rec(1, c, 0)
    return counts, stored, nodes


def enumerate_all(config: SearchConfig) -> ClassificationReport:
    F = config.field
    q = F.q
    if q > MAX_PRUNED_Q:
        raise BudgetExceeded(f"exhaustive search is limited to q <= {MAX_PRUNED_Q}")
    if q > MAX_FULL_Q and config.size_threshold is None and not config.allow_large:
        raise BudgetExceeded(f"q = {q} needs a size threshold (or allow_large)")
    if q > MAX_FULL_Q and not (config.prune and (config.size_threshold is not None)) and not config.allow_large:
        raise BudgetExceeded(f"q = {q} needs the prune")
    t0 = time.perf_counter()
    tables = search_tables(F)
    n = q + 1
    limit = config.recognition_cutoff
    # translations fix every direction and act transitively on the lines through P_0
    first = [0] if config.symmetry_reduction else list(range(len(tables.cov[0])))
    weight = q * q if config.symmetry_reduction else 1

    W = min(config.worker_count, len(first))
    chunks = [first[w::W] for w in range(W)]
    args = [(F, ch, config.size_threshold, config.prune, limit) for ch in chunks]
    if W == 1:
        results = [_search_chunk(*args[0])]
    else:
        with ProcessPoolExecutor(max_workers=W) as ex:
            results = list(ex.map(_search_chunk, *zip(*args)))

    raw: Counter = Counter()
    stored: list = []
    nodes = 0
    for counts, st, nd in results:
        raw.update(counts)
        stored.extend(st)
        nodes += nd
    stored.sort()

    canon_cache: dict[int, int] = {}

    def canon(code: int) -> int:
        if code not in canon_cache:
            canon_cache[code] = canonical_form(CliqueGraph.from_code(n, code))
        return canon_cache[code]

    size_counts: Counter = Counter()
    type_counts: Counter = Counter()
    for (size, code), cnt in raw.items():
        size_counts[size] += cnt * weight
        type_counts[size, canon(code)] += cnt * weight

    label_counts: Counter = Counter()
    unexplained = []
    bound = theorem_bound(q)
    for size, choice in stored:
        L = KakeyaLineSet(tables.conic, tuple(tables.lines[i][idx] for i, idx in enumerate(choice)))
        code = _gamma_code(tables, choice)
        label = recognize(L)
        label_counts[size, canon(code), label.variant, label.k, label.secant_detail, label.note] += weight
        if label.variant == OTHER and size < bound:
            unexplained.append(L.to_json())

    cfg = {"size_threshold": config.size_threshold, "symmetry_reduction": config.symmetry_reduction,
           "prune": config.prune, "recognize_limit": limit}
    return ClassificationReport(
        q=q, config=cfg, sets_enumerated=sum(size_counts.values()),
        size_counts=dict(sorted(size_counts.items())), type_counts=dict(sorted(type_counts.items())),
        label_counts=dict(sorted(label_counts.items(), key=_label_sort)), unexplained=unexplained,
        nodes=nodes, wall_time_ms=round((time.perf_counter() - t0) * 1000), _stored=stored)


def _gamma_code(tables: SearchTables, choice) -> int:
    n = len(choice)
    bits = pair_bits(n)
    masks = [tables.cov[i][idx] for i, idx in enumerate(choice)]
    code = 0
    for i in range(n):
        for j in range(i + 1, n):
            if masks[i] & masks[j]:
                code |= bits[i][j]
    return code


# --- certificates ---

def _base_certificate(report: ClassificationReport, include_timing: bool) -> dict:
    q = report.q
    return {"q": q, "theorem": theorem_expression(q), "threshold_value": theorem_bound(q),
            "sets_enumerated": report.sets_enumerated, "min_size": report.min_size}


def _finish(cert: dict, report: ClassificationReport, include_timing: bool) -> dict:
    cert["prune_nodes"] = report.nodes
    cert["wall_time_ms"] = report.wall_time_ms if include_timing else None
    return cert


def verify_theorem(F: FieldSpec, report: ClassificationReport | None = None,
                   include_timing: bool = False) -> dict:
    """Check that every set below the sharp bound is a regulus split."""
    q = F.q
    bound = theorem_bound(q)
    if report is None:
        report = enumerate_all(SearchConfig(F, size_threshold=bound, recognize_limit=bound - 1))
    cert = _base_certificate(report, include_timing)
    cert["statement"] = (f"every Kakeya line set with |K(L)| < {theorem_expression(q)} = {bound} "
                         f"is a regulus split")
    below = {s: c for s, c in report.size_counts.items() if s < bound}
    cert["level"] = "theorem" if below else "vacuous"
    per_k: Counter = Counter()
    counterexamples = []
    inconsistent = []
    for (size, code, variant, k, detail, note), cnt in report.label_counts.items():
        if size >= bound:
            continue
        if variant != REGULUS_SPLIT:
            counterexamples.append({"size": size, "type": report.type_name(code), "variant": variant,
                                    "count": cnt})
            continue
        per_k[k] += cnt
        if regulus_split_size(q, k) != size:
            inconsistent.append({"size": size, "k": k, "count": cnt})
    recognized = sum(c for (s, *_), c in report.label_counts.items() if s < bound)
    if recognized != sum(below.values()):
        counterexamples.append({"error": "not every set below the bound was recognized",
                                "recognized": recognized, "enumerated": sum(below.values())})
    counterexamples.extend({"line_set": L} for L in report.unexplained)
    cert["census"] = [e for e in report.census() if e["size"] < bound]
    cert["per_k"] = {str(k): per_k[k] for k in sorted(per_k)}
    # k is reported as the smaller side, so the even case k = q/2 + 1 shows up as q/2
    min_k = {(q + 1) // 2} if q % 2 else {q // 2, q // 2 + 1}
    observed = {k for (s, _, v, k, *_r) in report.label_counts
                if s == report.min_size and v == REGULUS_SPLIT and s < bound}
    cert["minimum_k_expected"] = sorted(min_k)
    cert["minimum_k_observed"] = sorted(observed)
    if not observed <= min_k:
        inconsistent.append({"size": report.min_size, "k": sorted(observed - min_k)})
    cert["k_size_inconsistencies"] = inconsistent
    if q >= 3:
        ks = (q - 1) // 2 if q % 2 else q // 2
        W = construct_secant_variant(F, ks)
        lab = recognize(W)
        cert["sharpness_witness"] = {"k": ks, "size": kakeya_points(W).size, "variant": lab.variant,
                                     "recognized_k": lab.k, "line_set": W.to_json()}
        if kakeya_points(W).size != bound or lab.variant != SECANT_VARIANT:
            counterexamples.append({"error": "sharpness witness failed", "size": kakeya_points(W).size})
    if inconsistent:
        counterexamples.append({"error": "k does not match size formula"})
    cert["counterexamples"] = counterexamples
    return _finish(cert, report, include_timing)


REMARK_EXPECTED = {
    2: {4: {"f3", "f4"}, 5: {"f2"}, 6: {"f1"}},
    3: {8: {"m1"}, 9: {"m2", "m3", "m4", "m5"}},
    4: {14: {"d1"}, 15: {"d2", "d3"}},
}

# type -> acceptable (variant, k, detail, note) descriptions
REMARK_LABELS = {
    2: {"f1": {(REGULUS_SPLIT, 0, None, "")}, "f2": {(SECANT_VARIANT, 0, ON_RP, "")},
        "f3": {(REGULUS_SPLIT, 1, None, "")}, "f4": {(SECANT_VARIANT, 1, ON_BOTH, "")}},
    3: {"m1": {(REGULUS_SPLIT, 2, None, "")}, "m2": {(OTHER, None, None, "cone")},
        "m3": {(SECANT_VARIANT, 1, ON_BOTH, "")}, "m4": {(SECANT_VARIANT, 1, ON_RP, "")},
        "m5": {(REGULUS_SPLIT, 1, None, "")}},
    4: {"d1": {(REGULUS_SPLIT, 2, None, "")},
        "d2": {(SECANT_VARIANT, 2, ON_R, ""), (SECANT_VARIANT, 2, ON_RP, "")},
        "d3": {(SECANT_VARIANT, 2, ON_BOTH, "")}},
}


def remark_limit(q: int) -> int:
    return max(REMARK_EXPECTED[q])


def verify_remark_census(F: FieldSpec, report: ClassificationReport | None = None,
                         include_timing: bool = False) -> dict:
    """Small-q classification: which graph types occur at each small size, and how they arise."""
    q = F.q
    if q not in REMARK_EXPECTED:
        raise ValueError("remark censuses exist for q = 2, 3, 4 only")
    limit = remark_limit(q)
    if report is None:
        report = enumerate_all(SearchConfig(F, size_threshold=limit + 1, recognize_limit=limit))
    cert = _base_certificate(report, include_timing)
    cert["level"] = "remark"
    mismatches = []
    for size, want in REMARK_EXPECTED[q].items():
        got = set(report.types_of_size(size))
        if got != want:
            mismatches.append({"size": size, "expected_types": sorted(want), "found_types": sorted(got)})
    recognized = Counter()
    for (size, code, variant, k, detail, note), cnt in report.label_counts.items():
        if size > limit:
            continue
        recognized[size] += cnt
        name = report.type_name(code)
        allowed = REMARK_LABELS[q].get(name)
        if allowed is None or (variant, k, detail, note) not in allowed:
            mismatches.append({"size": size, "type": name, "variant": variant, "k": k,
                               "secant_detail": detail, "note": note, "count": cnt})
    for size in REMARK_EXPECTED[q]:
        if recognized[size] != report.size_counts.get(size, 0):
            mismatches.append({"size": size, "error": "unrecognized sets",
                               "recognized": recognized[size], "enumerated": report.size_counts.get(size, 0)})
    if q == 2:
        cert["statement"] = "every Kakeya set for q=2 arises from one of the two constructions"
    else:
        cert["statement"] = f"Kakeya sets of size <= {limit} realize exactly the listed graph types"
    cert["census"] = [e for e in report.census() if e["size"] <= limit]
    cert["counterexamples"] = mismatches
    return _finish(cert, report, include_timing)


def verify_pentagon_excluded(F: FieldSpec, report: ClassificationReport | None = None,
                             include_timing: bool = False) -> dict:
    """No Kakeya line set has a 5-cycle as intersection graph."""
    q = F.q
    cert = {"q": q, "statement": "no Kakeya line set has intersection graph C5"}
    if q + 1 != 5:
        cert.update(level="vacuous", reason=f"C5 has 5 vertices, line sets have {q + 1}",
                    counterexamples=[])
        return cert
    if report is None or report.config["size_threshold"] is not None:
        report = enumerate_all(SearchConfig(F))
    c5 = canonical_form(cycle_graph(5))
    hits = sum(c for (s, code), c in report.type_counts.items() if code == c5)
    cert.update(level="remark", sets_enumerated=report.sets_enumerated,
                size_15_examined=report.size_counts.get(15, 0), c5_occurrences=hits)
    cert["counterexamples"] = [{"type": "d4", "count": hits}] if hits else []
    return _finish(cert, report, include_timing)
