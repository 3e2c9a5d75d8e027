"""Command-line front end (``etaq``).

Exit status: 0 on success, 1 when a verification fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional

from . import congruence as cg
from . import etaquot as eq
from . import qseries as qs
from .cache import SeriesCache, cached, default_dir
from .partitions import PartitionSpec, c_series

SCHEMA = 1


class InputError(Exception):
    pass


def _num(x):
    """JSON-friendly number: ints stay ints, other rationals become strings."""
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    return x


def _series_rows(f: qs.QSeries) -> list[tuple[str, int]]:
    rows = []
    for i in range(f.offset, f.prec_index):
        rows.append((str(_num(Fraction(i, f.denom))), int(f[i])))
    return rows


def _series_report(f: qs.QSeries, **extra) -> dict:
    return {
        **extra,
        "ring": f.ring,
        "denom": f.denom,
        "offset": f.offset,
        "precision": _num(f.precision),
        "coefficients": [int(f[i]) for i in range(f.offset, f.prec_index)],
        "rows": _series_rows(f),
    }


def _params(args) -> cg.CongruenceParams:
    return cg.derive_params(args.p, args.M, args.r, args.m)


def cmd_expand_eta(args, cache):
    E = eq.parse(args.quotient)
    f = cached(cache, ("eta", str(E), Fraction(args.precision), args.modulus, args.denom),
              lambda: eq.expand(E, args.precision, args.modulus, args.denom))
    return 0, _series_report(f, quotient=str(E))


def cmd_check_eta(args, cache):
    E = eq.parse(args.quotient)
    ok, report = eq.is_cusp_form(E)
    k = eq.weight(E)
    out = {
        "quotient": str(E),
        "ghn": eq.validate_ghn(E),
        "weight": _num(k),
        "cusp_orders": {str(d): _num(o) for d, o in report.entries},
        "total_valence": _num(report.total_valence),
        "expected_valence": _num(eq.valence_expected(E)),
        "verdict": "cusp-form" if ok else "not-cusp-form",
    }
    return 0, out


def cmd_partition_series(args, cache):
    spec = PartitionSpec(args.k, args.r1, args.r2)
    f = cached(cache, ("c_series", spec.k, spec.r1, spec.r2, args.precision, args.modulus),
              lambda: c_series(spec, args.precision, args.modulus))
    return 0, _series_report(f, k=spec.k, r1=spec.r1, r2=spec.r2)


def cmd_derive_params(args, cache):
    P = _params(args)
    E = cg.build_form(P)
    return 0, {**P.as_dict(), "form": str(E),
               "sturm_bound": cg.sturm_bound(P.g_weight, P.g_level)}


def cmd_verify_pipeline(args, cache):
    P = _params(args)
    lift = cg.verify_lift(P, args.precision, cache)
    ext = cg.verify_extraction(P, args.precision, cache)
    out = {
        "params": P.as_dict(),
        "n_max": args.precision,
        "lift": lift,
        "off_lattice": ext.off_lattice,
        "mismatches": [list(x) for x in ext.mismatches],
        "verified": lift and ext.ok,
    }
    return (0 if out["verified"] else 1), out


def cmd_search_ell(args, cache):
    P = _params(args)
    rep = cg.search_serre_primes(P, args.ell_limit, args.check_depth, args.budget,
                                 cache, args.workers)
    out = {
        "params": P.as_dict(),
        "ell_modulus": P.ell_modulus,
        "certificates": [c.to_json() for c in rep.certificates],
        "rejected": [{"ell": ell, "first_failure": n} for ell, n in rep.rejected],
        "over_budget": rep.over_budget,
        "budget_exceeded": rep.budget_exceeded,
    }
    return 0, out


def cmd_verify_congruence(args, cache):
    P = _params(args)
    rep = cg.verify_final(P, args.ell, args.n_max, cache)
    out = {
        "params": P.as_dict(),
        "ell": rep.ell,
        "n_max": rep.n_max,
        "checked": rep.checked,
        "skipped_gcd": rep.skipped_gcd,
        "skipped_nonintegral": rep.skipped_nonintegral,
        "violations": [{"n": n, "argument": a, "value": v} for n, a, v in rep.violations],
        "verified": rep.ok,
    }
    return (0 if rep.ok else 1), out


COMMANDS = {
    "expand-eta": cmd_expand_eta,
    "check-eta": cmd_check_eta,
    "partition-series": cmd_partition_series,
    "derive-params": cmd_derive_params,
    "verify-pipeline": cmd_verify_pipeline,
    "search-ell": cmd_search_ell,
    "verify-congruence": cmd_verify_congruence,
}


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=["json", "csv", "text"], default="text")
    common.add_argument("--cache-dir", default=None,
                        help="series cache directory (default: $ETAQ_CACHE or ~/.cache/etaq)")
    common.add_argument("--no-cache", action="store_true", help="do not read or write the cache")
    common.add_argument("--workers", type=_positive, default=1,
                        help="parallel workers (used by search-ell; output never depends on it)")

    parser = _Parser(prog="etaq", description="Eta-quotients and k-regular partition congruences.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    def pmrm(p):
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--M", type=int, required=True)
        p.add_argument("--r", type=int, required=True)
        p.add_argument("--m", type=int, required=True)

    p = add("expand-eta", "q-expansion of an eta-quotient")
    p.add_argument("quotient", help='e.g. "N=5; 5^1 * 1^43"')
    p.add_argument("--precision", type=_positive, required=True, help="exponent bound")
    p.add_argument("--modulus", type=int, default=None)
    p.add_argument("--denom", type=_positive, default=24)

    p = add("check-eta", "modularity, weight and cusp orders")
    p.add_argument("quotient")

    p = add("partition-series", "c_{k,r1,r2}(n) for n < precision")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--r1", type=_positive, default=1)
    p.add_argument("--r2", type=_positive, default=1)
    p.add_argument("--precision", type=_positive, required=True)
    p.add_argument("--modulus", type=int, default=None)

    p = add("derive-params", "choose a, b, kappa for (p, M, r, m)")
    pmrm(p)

    p = add("verify-pipeline", "check the lift and the extraction of u(n)")
    pmrm(p)
    p.add_argument("--precision", type=_positive, default=500, help="largest n checked")

    p = add("search-ell", "search primes l == -1 (mod level*m) with u | T(l) == 0")
    pmrm(p)
    p.add_argument("--ell-limit", type=_positive, required=True)
    p.add_argument("--check-depth", type=_positive, default=50)
    p.add_argument("--budget", type=_positive, default=2_000_000)

    p = add("verify-congruence", "check the final congruence on partition values")
    pmrm(p)
    p.add_argument("--ell", type=_positive, required=True)
    p.add_argument("--n-max", type=_positive, default=300)
    return parser


def _text(obj, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    for key in sorted(obj):
        value = obj[key]
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_text(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            for item in value:
                lines.append(f"{pad}  - " + ", ".join(f"{k}={item[k]}" for k in sorted(item)))
        elif isinstance(value, list):
            lines.append(f"{pad}{key}: " + ", ".join(str(v) for v in value))
        else:
            lines.append(f"{pad}{key}: {value}")
    return lines


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        body = {k: v for k, v in report.items() if k != "rows"}
        return json.dumps({"schema": SCHEMA, **body}, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if "rows" in report:
            w.writerow(["n", "value"])
            w.writerows(report["rows"])
        else:
            w.writerow(["key", "value"])
            for key in sorted(report):
                value = report[key]
                w.writerow([key, json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else value])
        return buf.getvalue()
    body = {k: v for k, v in report.items() if k not in ("rows", "coefficients")}
    lines = _text(body)
    if "rows" in report:
        lines.extend(f"{n}\t{v}" for n, v in report["rows"])
    return "\n".join(lines) + "\n"


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except InputError as exc:
        print(f"etaq: error: {exc}", file=sys.stderr)
        return 2
    cache = None if args.no_cache else SeriesCache(args.cache_dir or default_dir())
    try:
        status, report = COMMANDS[args.command](args, cache)
    except cg.HypothesisError as exc:
        print("etaq: hypothesis violated:", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return 2
    except (ValueError, ZeroDivisionError) as exc:
        print(f"etaq: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(render(report, args.output))
    return status


if __name__ == "__main__":
    sys.exit(main())
