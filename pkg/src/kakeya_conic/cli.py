"""Command-line front end.

Human-readable summaries go to stdout; machine output goes to --out only.
Exit codes: 0 success, 1 counterexample found, 2 usage or input error,
3 search budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import classify as cl
from . import cliques as cq
from .gf import FieldError, FieldSpec, field_of_order, make_field
from .kakeya import (KakeyaError, KakeyaLineSet, construct_regulus_split, construct_secant_variant,
                     kakeya_points, recognize, regulus_split_size, secant_choices_flat,
                     secant_variant_size)
from .quadrics import QuadricError

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
MAX_TABLE_Q = 256
ORACLE_SIZES = range(2, cq.MAX_ORACLE_VERTICES + 1)


class UsageError(Exception):
    pass


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")


def _field(args) -> FieldSpec:
    if args.p is not None:
        F = make_field(args.p, args.deg or 1)
        if args.q is not None and args.q != F.q:
            raise UsageError(f"--q {args.q} disagrees with --p {args.p} --deg {args.deg or 1}")
        return F
    if args.deg is not None:
        raise UsageError("--deg needs --p")
    if args.q is None:
        raise UsageError("give --q or --p/--deg")
    return field_of_order(args.q)


def cmd_construct(args) -> int:
    F = _field(args)
    if args.k is None or args.variant is None:
        raise UsageError("construct needs --k and --variant")
    q = F.q
    if args.variant == "regulus-split":
        if args.secant_index is not None:
            raise UsageError("--secant-index only applies to --variant secant")
        L = construct_regulus_split(F, args.k)
        predicted = regulus_split_size(q, args.k)
    else:
        if not 0 <= args.k <= q:
            raise UsageError(f"secant variant needs 0 <= k <= {q}")
        choices = secant_choices_flat(F, args.k)
        i = args.secant_index or 0
        if not 0 <= i < len(choices):
            raise UsageError(f"--secant-index must lie in [0, {len(choices)})")
        L = construct_secant_variant(F, args.k, m=choices[i][0])
        predicted = secant_variant_size(q, args.k)
    size = kakeya_points(L).size
    print(f"q={q} variant={args.variant} k={args.k} size={size} predicted={predicted}")
    _write(args.out, L.dumps())
    return EXIT_OK if size == predicted else EXIT_COUNTEREXAMPLE


def _config(F: FieldSpec, args) -> cl.SearchConfig:
    return cl.SearchConfig(F, size_threshold=args.threshold, symmetry_reduction=args.symmetry,
                           worker_count=args.workers, prune=not args.no_prune)


def cmd_classify(args) -> int:
    F = _field(args)
    report = cl.enumerate_all(_config(F, args))
    print(f"q={F.q} sets={report.sets_enumerated} min_size={report.min_size} nodes={report.nodes}")
    for size, count in report.size_counts.items():
        types = ", ".join(f"{t}:{c}" for t, c in report.types_of_size(size).items())
        print(f"  size {size}: {count}  [{types}]")
    if report.unexplained:
        print(f"  unexplained below the bound: {len(report.unexplained)}")
    _write(args.out, _dumps(report.to_dict(include_timing=args.record_timing)))
    return EXIT_COUNTEREXAMPLE if report.unexplained else EXIT_OK


def _oracles() -> dict:
    out = {}
    for n in ORACLE_SIZES:
        m, h, l = cq.mantel_oracle(n), cq.hanson_toft_oracle(n), cq.main_lemma_oracle(n)
        out[str(n)] = {
            "mantel": {"ok": m.ok, "max_edges": m.max_edges, "bound": m.bound,
                       "extremal_count": m.extremal_count},
            "hanson_toft": {"ok": h.ok, "checked": {str(k): v for k, v in h.checked.items()},
                            "violations": h.violations, "boundary_witness": h.boundary_witness},
            "main_lemma": {"ok": l.ok, "threshold": l.threshold, "qualifying": l.qualifying,
                           "violations": l.violations},
        }
    return out


def cmd_verify(args) -> int:
    F = _field(args)
    q = F.q
    timing = args.record_timing
    certs = {}
    if q <= cl.MAX_FULL_Q:
        report = cl.enumerate_all(cl.SearchConfig(F, worker_count=args.workers))
        certs["theorem"] = cl.verify_theorem(F, report, timing)
        certs["remark"] = cl.verify_remark_census(F, report, timing)
        certs["pentagon"] = cl.verify_pentagon_excluded(F, report, timing)
    else:
        bound = cl.theorem_bound(q)
        report = cl.enumerate_all(cl.SearchConfig(F, size_threshold=bound, symmetry_reduction=True,
                                                  worker_count=args.workers, recognize_limit=bound - 1))
        certs["theorem"] = cl.verify_theorem(F, report, timing)
    failures = sum(len(c["counterexamples"]) for c in certs.values())
    bundle = {"q": q, "certificates": certs}
    if args.all:
        bundle["oracles"] = _oracles()
        failures += sum(not r["ok"] for per_n in bundle["oracles"].values() for r in per_n.values())
    bundle["failures"] = failures

    th = certs["theorem"]
    per_k = " ".join(f"k={k}:{n}" for k, n in th["per_k"].items()) or "none"
    print(f"q={q} min_size={report.min_size} bound={th['threshold_value']} ({th['theorem']}) "
          f"level={th['level']} below-bound sets per k: {per_k}")
    for name, c in certs.items():
        print(f"  {name}: {c['level']}, counterexamples={len(c['counterexamples'])}")
    if args.all:
        print(f"  oracles n={ORACLE_SIZES.start}..{ORACLE_SIZES.stop - 1}: "
              f"{'ok' if all(r['ok'] for v in bundle['oracles'].values() for r in v.values()) else 'FAILED'}")
    _write(args.out, _dumps(bundle))
    return EXIT_COUNTEREXAMPLE if failures else EXIT_OK


def cmd_graphs(args) -> int:
    if args.n is None:
        raise UsageError("graphs needs --n")
    if not 1 <= args.n <= cq.MAX_CANON_VERTICES:
        raise UsageError(f"--n must lie in [1, {cq.MAX_CANON_VERTICES}]")
    graphs = cq.enumerate_graphs(args.n, args.filter)
    dist = cq.c_distribution(graphs)
    print(f"n={args.n} filter={args.filter} types={len(graphs)} C-distribution={dist}")
    _write(args.out, cq.census_csv(graphs))
    return EXIT_OK


def cmd_recognize(args) -> int:
    if not args.inp:
        raise UsageError("recognize needs --in")
    try:
        obj = json.loads(Path(args.inp).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read {args.inp}: {e}")
    L = KakeyaLineSet.from_json(obj)
    label = recognize(L)
    size = kakeya_points(L).size
    detail = f" detail={label.secant_detail}" if label.secant_detail else ""
    note = f" note={label.note}" if label.note else ""
    print(f"q={L.q} size={size} variant={label.variant} k={label.k}{detail}{note}")
    _write(args.out, _dumps({"size": size, **label.to_json()}))
    return EXIT_OK


def cmd_field_table(args) -> int:
    F = _field(args)
    if F.q > MAX_TABLE_Q:
        raise UsageError(f"tables are only written for q <= {MAX_TABLE_Q}")
    elems = range(F.q)
    table = {**F.to_json(), "q": F.q,
             "add": [[F.add(a, b) for b in elems] for a in elems],
             "mul": [[F.mul(a, b) for b in elems] for a in elems],
             "inv": [None] + [F.inv(a) for a in elems if a]}
    print(f"GF({F.q}) = GF({F.p})[x]/({_poly(F)})")
    _write(args.out, _dumps(table))
    return EXIT_OK


def _poly(F: FieldSpec) -> str:
    terms = []
    for e in range(len(F.modulus) - 1, -1, -1):
        c = F.modulus[e]
        if not c:
            continue
        mono = "" if e == 0 else ("x" if e == 1 else f"x^{e}")
        if not mono:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(terms)


COMMANDS = {"construct": cmd_construct, "classify": cmd_classify, "verify": cmd_verify,
            "graphs": cmd_graphs, "recognize": cmd_recognize, "field-table": cmd_field_table}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kakeya-conic",
                                 description="Kakeya sets in the linear representation of a conic.")
    sub = ap.add_subparsers(dest="command", required=True)

    def field_flags(p):
        p.add_argument("--q", type=int, help="field order (prime power)")
        p.add_argument("--p", type=int, help="field characteristic")
        p.add_argument("--deg", type=int, help="extension degree")

    def out_flag(p):
        p.add_argument("--out", help="write machine-readable output here")

    c = sub.add_parser("construct", help="build a line set from one of the two constructions")
    field_flags(c)
    c.add_argument("--k", type=int)
    c.add_argument("--variant", choices=["regulus-split", "secant"])
    c.add_argument("--secant-index", type=int)
    out_flag(c)

    for name, text in (("classify", "enumerate all line sets for small q"),
                       ("verify", "run the classification certificates")):
        s = sub.add_parser(name, help=text)
        field_flags(s)
        if name == "classify":
            s.add_argument("--threshold", type=int, help="keep only sets smaller than this")
            s.add_argument("--symmetry", action="store_true", help="fix the first line up to translation")
            s.add_argument("--no-prune", action="store_true")
        else:
            s.add_argument("--all", action="store_true", help="also run the graph oracles (n <= 7)")
        s.add_argument("--workers", type=int, default=1)
        s.add_argument("--record-timing", action="store_true", help="include wall time in the output")
        out_flag(s)

    g = sub.add_parser("graphs", help="census of small graphs up to isomorphism")
    g.add_argument("--n", type=int)
    g.add_argument("--filter", choices=["all", "edge-disjoint"], default="all")
    out_flag(g)

    r = sub.add_parser("recognize", help="label a line-set file")
    r.add_argument("--in", dest="inp")
    out_flag(r)

    t = sub.add_parser("field-table", help="addition and multiplication tables")
    field_flags(t)
    out_flag(t)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if getattr(args, "workers", 1) < 1:
        parser.print_usage(sys.stderr)
        print("error: --workers must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except cq.BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, FieldError, KakeyaError, QuadricError, ValueError) as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
