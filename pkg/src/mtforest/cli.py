"""Command-line front end.

Schemas (all JSON, each carrying a ``schema`` field):

  forest  mtforest.forest/1  {"schema", "d", "trees": [{"color": c, "children": [...]}, ...]}
  coding  mtforest.coding/1  {"schema", "d", "lengths": [n_1..n_d],
                              "increments": [[d-vector, ...] per type], "roots": [c_1, ...]}
  law     mtforest.law/1     {"schema", "d", "nu": [{"z_1,...,z_d": "p/q", ...} per type]}

Vectors on the command line are comma separated (``--r 1,0``); matrices use
semicolons between rows (``--a "0,1;0,0"``).  Exit status: 0 success,
1 verification mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import branching, coding, cyclic, enumeration, lagrange, verify
from .forest import ForestError, Signature, TypedForest


class UsageError(Exception):
    pass


def exact(q) -> dict:
    q = Fraction(q)
    return {"exact": f"{q.numerator}/{q.denominator}", "decimal": f"{float(q):.12g}"}


def vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer vector: {text!r}")


def matrix(text: str) -> tuple[tuple[int, ...], ...]:
    return tuple(vector(row) for row in text.split(";"))


def read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def emit(obj, out) -> None:
    out.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def emit_report(obj, out) -> None:
    out.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def config_echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


# -- subcommands ------------------------------------------------------------------

def cmd_encode(args, out) -> int:
    f = TypedForest.from_json(read_input(args.input), normalize=args.normalize)
    obj = coding.encode(f).to_json_obj()
    obj["roots"] = list(f.root_types())
    emit(obj, out)
    return 0


def cmd_decode(args, out) -> int:
    obj = json.loads(read_input(args.input))
    x = coding.CodingSequence.from_json_obj(obj)
    c = args.roots if args.roots is not None else obj.get("roots")
    if c is None:
        raise UsageError("decode needs the root type sequence (--roots or a 'roots' field)")
    out.write(coding.decode(x, tuple(c)).to_json() + "\n")
    return 0


def cmd_classify(args, out) -> int:
    law = verify.load_law(args.law)
    report = branching.classify(law, width=args.width).to_json_obj()
    report["config"] = config_echo(args)
    emit_report(report, out)
    return 0


def _square(a, d: int):
    if len(a) != d or any(len(row) != d for row in a):
        raise UsageError(f"--a must be a {d}x{d} matrix")
    return a


def cmd_progeny(args, out) -> int:
    law = verify.load_law(args.law)
    if len(args.r) != law.d or len(args.n) != law.d:
        raise UsageError("--r and --n must have one entry per type")
    if args.a is None:
        p = branching.marginal_progeny_law(law, args.r, args.n)
    else:
        p = branching.progeny_law(law, args.r, args.n, _square(args.a, law.d))
    report = {"config": config_echo(args), "probability": exact(p)}
    emit_report(report, out)
    return 0


def cmd_simulate(args, out) -> int:
    law = verify.load_law(args.law)
    r = [0] * law.d
    for t in args.roots:
        if not 1 <= t <= law.d:
            raise UsageError(f"root type {t} outside 1..{law.d}")
        r[t - 1] += 1
    events, truncated = branching.simulate_progeny(law, args.roots, args.seed, args.replicas,
                                                   cap=args.cap, workers=args.workers)
    rows = []
    for (n, a), cnt in sorted(events.items()):
        if sum(n) > args.max_total:
            continue
        row = {"n": list(n), "a": [list(v) for v in a], "count": cnt,
               "frequency": f"{cnt / args.replicas:.6f}"}
        if args.exact:
            row["probability"] = exact(branching.progeny_law(law, r, n, a))
        rows.append(row)
    emit_report({"config": config_echo(args), "truncated": truncated, "events": rows}, out)
    return 0


FORMULAS = ("plane", "labeled-indegree", "labeled-edge-types", "injective", "labeled-census",
            "unlabeled-census", "single-type-degrees")


def _census(obj) -> dict:
    return {(int(e["type"]) - 1, tuple(e["offspring"])): int(e["count"]) for e in obj}


def cmd_count(args, out) -> int:
    report: dict = {"config": config_echo(args)}
    if args.formula == "single-type-degrees":
        if args.degrees is None:
            raise UsageError("single-type-degrees needs --degrees")
        value = enumeration.count_single_type_by_degrees(args.degrees)
        report["count"] = value
        if args.oracle:
            report["oracle"] = enumeration.single_type_degree_counts(len(args.degrees)).get(tuple(args.degrees), 0)
    else:
        if args.sig is None:
            raise UsageError(f"{args.formula} needs --sig")
        s = json.loads(args.sig)
        sig = Signature(tuple(s["r"]), tuple(s["n"]), tuple(tuple(row) for row in s["a"]))
        extra = json.loads(args.extra) if args.extra else None
        if args.formula == "plane":
            value = enumeration.count_plane_forests(sig)
        elif args.formula == "labeled-indegree":
            if extra is None:
                raise UsageError("labeled-indegree needs --extra with c[i][j][k]")
            value = enumeration.count_labeled_by_indegree(sig, extra)
        elif args.formula == "labeled-edge-types":
            value = enumeration.count_labeled_by_edge_types(sig)
        elif args.formula == "injective":
            value = enumeration.count_injective(sig)
        else:
            if extra is None:
                raise UsageError(f"{args.formula} needs --extra with the census")
            census = _census(extra)
            if args.formula == "labeled-census":
                value = enumeration.count_labeled_by_census(sig, census)
            else:
                value = enumeration.count_unlabeled_by_census(sig, census)
        report["count"] = value
        if args.oracle:
            report["oracle"] = _count_oracle(args.formula, sig, extra)
    if args.oracle:
        report["agree"] = report["oracle"] == report["count"]
    emit_report(report, out)
    return 0 if report.get("agree", True) else 1


def _count_oracle(formula: str, sig: Signature, extra) -> int:
    if formula in ("plane", "unlabeled-census"):
        total = 0
        census = _census(extra) if extra is not None else None
        for f in enumeration.generate_plane_forests(sig.d, enumeration.root_sequence(sig.r), n=sig.n):
            if Signature.of(f) != sig:
                continue
            if census is not None:
                got: dict = {}
                for v in range(len(f)):
                    key = (f.colors[v] - 1, f.offspring(v))
                    got[key] = got.get(key, 0) + 1
                if got != census:
                    continue
            total += 1
        return total
    lab = enumeration.LabeledForests(sig.n)
    if formula == "labeled-edge-types":
        return lab.by_signature().get(sig, 0)
    if formula == "injective":
        return lab.injective_by_signature().get(sig, 0)
    if formula == "labeled-indegree":
        key = tuple(tuple(tuple(v) for v in row) for row in extra)
        return lab.by_indegree().get((sig, key), 0)
    return lab.by_census().get((sig, tuple(sorted(_census(extra).items()))), 0)


def cmd_cyclic(args, out) -> int:
    obj = json.loads(read_input(args.input))
    x = coding.CodingSequence.from_json_obj(obj)
    n = args.n if args.n is not None else x.lengths
    brute = cyclic.count_good_shifts(args.r, x, n)
    det = cyclic.cyclic_determinant(x, n)
    keep = [i for i in range(x.d) if n[i] > 0]
    k = [[x.value(i, j, n[i]) for j in keep] for i in keep]
    esum = cyclic.elementary_forest_sum(k, [args.r[i] for i in keep]) if keep else 1
    emit_report({"config": config_echo(args), "brute_force": brute, "determinant": det,
                 "elementary_sum": esum, "agree": brute == det == esum}, out)
    return 0 if brute == det == esum else 1


def cmd_lagrange(args, out) -> int:
    law = verify.load_law(args.law)
    order = sum(args.n)
    fs = [lagrange.series_from_law(nu, order) for nu in law.nu]
    lhs = lagrange.lagrange_good_lhs(fs, args.r, args.n)
    rhs = lagrange.lagrange_good_rhs(lagrange.root_series(args.r, order), fs, args.n)
    marginal = branching.marginal_progeny_law(law, args.r, args.n)
    ok = lhs == rhs == marginal
    emit_report({"config": config_echo(args), "fixed_point": exact(lhs), "arborescent_sum": exact(rhs),
                 "progeny_marginal": exact(marginal), "equal": ok}, out)
    return 0 if ok else 1


def cmd_verify(args, out) -> int:
    report = verify.run_verify(cap=args.cap, seed=args.seed, replicas=args.replicas)
    if args.json:
        out.write(verify.report_json(report) + "\n")
    else:
        out.write(verify.format_table(report) + "\n")
    return 0 if report["all_passed"] else 1


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mtforest", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="forest JSON -> coding JSON")
    p.add_argument("--input", default="-", help="forest JSON file, '-' for stdin")
    p.add_argument("--normalize", action="store_true", help="sort siblings by color instead of rejecting")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="coding JSON -> forest JSON")
    p.add_argument("--input", default="-")
    p.add_argument("--roots", type=vector, help="root type sequence, overrides the 'roots' field")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("classify", help="criticality report for a law")
    p.add_argument("--law", required=True, help="shipped law name or law JSON path")
    p.add_argument("--width", type=float, default=1e-9, help="target width of the spectral-radius enclosure")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("progeny-law", help="exact probability of a total-progeny event")
    p.add_argument("--law", required=True)
    p.add_argument("--r", type=vector, required=True, help="root counts per type")
    p.add_argument("--n", type=vector, required=True, help="total progeny per type")
    p.add_argument("--a", type=matrix, help="inter-type edge counts; omit for the marginal in n")
    p.set_defaults(func=cmd_progeny)

    p = sub.add_parser("simulate", help="seeded Monte Carlo table of progeny events")
    p.add_argument("--law", required=True)
    p.add_argument("--roots", type=vector, required=True, help="root type sequence")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--replicas", type=int, default=10_000)
    p.add_argument("--cap", type=int, default=64, help="vertex cap per replica")
    p.add_argument("--max-total", type=int, default=8, help="only list events with at most this many individuals")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--exact", action="store_true", help="add the exact probability of each event")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("count-forests", help="closed-form forest counts")
    p.add_argument("--formula", choices=FORMULAS, required=True)
    p.add_argument("--sig", help='{"r": [...], "n": [...], "a": [[...], ...]}')
    p.add_argument("--extra", help="indegree tuple c[i][j][k] or census [{type, offspring, count}, ...]")
    p.add_argument("--degrees", type=vector, help="child counts c_1..c_n for single-type-degrees")
    p.add_argument("--oracle", action="store_true", help="also count by exhaustive generation")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("cyclic-count", help="good cyclic shifts vs determinant vs elementary forests")
    p.add_argument("--input", default="-", help="coding JSON")
    p.add_argument("--r", type=vector, required=True)
    p.add_argument("--n", type=vector, help="window lengths, default the full lengths")
    p.set_defaults(func=cmd_cyclic)

    p = sub.add_parser("lagrange-coeff", help="compare both sides of Lagrange-Good with the progeny law")
    p.add_argument("--law", required=True)
    p.add_argument("--r", "--roots", dest="r", type=vector, required=True)
    p.add_argument("--n", type=vector, required=True)
    p.set_defaults(func=cmd_lagrange)

    p = sub.add_parser("verify", help="run the oracle suite and print a pass/fail table")
    p.add_argument("--cap", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicas", type=int, default=20_000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args, out)
    except (UsageError, ForestError, coding.CodingError, branching.LawError, ValueError,
            FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        print(f"mtforest {args.command}: {exc}", file=sys.stderr)
        return 2



def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
