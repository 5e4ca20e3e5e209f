"""Command-line interface: ``dickman <subcommand> [flags]``.

Exit codes: 0 success, 2 usage error, 3 domain error, 4 resource cap.
Output is only written once every row has been computed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import expand, oracle, smoothlab
from .expand import DomainError, ResourceLimitError
from .seriesgen import (
    DEFAULT_JMAX,
    DEFAULT_KMAX,
    DEFAULT_MMAX,
    DEFAULT_RMAX,
    CoefficientTables,
    TableError,
    build_tables,
    default_tables,
)

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_RESOURCE = 0, 2, 3, 4


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def render(columns, rows, form) -> str:
    if form == "json":
        return json.dumps([dict(zip(columns, r)) for r in rows], indent=1) + "\n"
    lines = [",".join(columns)]
    lines += [",".join(fmt(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def _tables(args) -> CoefficientTables:
    if getattr(args, "coeffs", None):
        return CoefficientTables.load(args.coeffs)
    return default_tables()


def _cfg(args) -> oracle.QuadratureConfig:
    return oracle.QuadratureConfig(tol=args.tol)


# --------------------------------------------------------------------------
# subcommands; each returns (columns, rows) or raw text


def cmd_coeffs(args):
    return build_tables(args.rmax, args.kmax, args.jmax, args.mmax).to_json()


def cmd_eval(args):
    tables, cfg = _tables(args), _cfg(args)
    value = err = terms = oval = dev = None
    if args.method in ("expansion", "both"):
        res = expand.k_ell_kappa(args.ell, args.kappa, args.u, args.J, tables)
        value, err, terms = res.value, res.error_estimate, res.terms_used
    if args.method in ("oracle", "both"):
        oval = oracle.k_ell_kappa_oracle(args.ell, args.kappa, args.u, cfg)
    if value is not None and oval is not None:
        dev = abs(value - oval)
    cols = ["ell", "kappa", "u", "J", "expansion", "error_estimate", "terms_used", "oracle", "deviation"]
    return cols, [[args.ell, args.kappa, args.u, args.J, value, err, terms, oval, dev]]


def cmd_rho(args):
    if args.method == "ode":
        value = oracle.rho_ode(args.u, args.step)
    elif args.method == "sum":
        value = expand.rho_kappa(args.u, args.kappa, "oracle", cfg=_cfg(args))
    else:
        value = expand.rho_kappa(args.u, args.kappa, "expansion", args.J, _tables(args))
    return ["u", "kappa", "method", "value"], [[args.u, args.kappa, args.method, value]]


def geometric_grid(start: float, end: float, factor: float) -> list:
    out = []
    i = 0
    while True:
        u = start * factor**i
        if u > end * (1 + 1e-12):
            return out
        out.append(u)
        i += 1


def cmd_table(args):
    tables = _tables(args)
    rows = []
    for u in geometric_grid(args.u_start, args.u_end, args.factor):
        res = expand.k_ell_kappa(args.ell, args.kappa, u, args.J, tables)
        rows.append([u, res.value, res.error_estimate, res.terms_used])
    return ["u", "value", "error_estimate", "terms_used"], rows


def cmd_compare(args):
    tables, cfg = _tables(args), _cfg(args)
    ref = oracle.k_ell_kappa_oracle(args.ell, args.kappa, args.u, cfg)
    rows = []
    for J in range(args.J_max + 1):
        res = expand.k_ell_kappa(args.ell, args.kappa, args.u, J, tables)
        rows.append([J, res.value, ref, abs(res.value - ref), res.error_estimate])
    return ["J", "expansion", "oracle", "deviation", "error_estimate"], rows


def cmd_sieve_check(args):
    rep = smoothlab.divisor_sum_smooth(args.x, args.y, args.kappa)
    return smoothlab.CSV_HEADER.split(","), [[rep.x, rep.y, rep.u, rep.kappa, rep.exact, rep.predicted, rep.rel_dev]]


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--coeffs", metavar="FILE", help="coefficient cache to load instead of building")
    common.add_argument("--tol", type=float, default=1e-10, help="oracle quadrature tolerance")

    p = argparse.ArgumentParser(prog="dickman", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("coeffs", parents=[common], help="build and write the coefficient cache")
    s.add_argument("--rmax", type=int, default=DEFAULT_RMAX)
    s.add_argument("--kmax", type=int, default=DEFAULT_KMAX)
    s.add_argument("--jmax", type=int, default=DEFAULT_JMAX)
    s.add_argument("--mmax", type=int, default=DEFAULT_MMAX)
    s.set_defaults(func=cmd_coeffs)

    s = sub.add_parser("eval", parents=[common], help="evaluate K_l(u, kappa)")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--kappa", type=int, default=0)
    s.add_argument("--u", type=float, required=True)
    s.add_argument("--J", type=int, default=expand.DEFAULT_J)
    s.add_argument("--method", choices=("expansion", "oracle", "both"), default="both")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("rho", parents=[common], help="rho(u) or rho_kappa(u)")
    s.add_argument("--u", type=float, required=True)
    s.add_argument("--kappa", type=int, default=1)
    s.add_argument("--method", choices=("sum", "ode", "expansion"), default="sum")
    s.add_argument("--J", type=int, default=expand.RHO_J)
    s.add_argument("--step", type=float, default=1e-4, help="grid step for --method ode")
    s.set_defaults(func=cmd_rho)

    s = sub.add_parser("table", parents=[common], help="expansion on a geometric u grid")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--kappa", type=int, default=0)
    s.add_argument("--J", type=int, default=expand.DEFAULT_J)
    s.add_argument("--u-start", type=float, required=True)
    s.add_argument("--u-end", type=float, required=True)
    s.add_argument("--factor", type=float, default=2.0)
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("compare", parents=[common], help="expansion deviation from the oracle for J = 0..J-max")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--kappa", type=int, default=0)
    s.add_argument("--u", type=float, required=True)
    s.add_argument("--J-max", type=int, default=expand.DEFAULT_J)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("sieve-check", parents=[common], help="exact smooth divisor sum vs rho_kappa")
    s.add_argument("--x", type=int, required=True)
    s.add_argument("--y", type=int, required=True)
    s.add_argument("--kappa", type=int, default=1)
    s.set_defaults(func=cmd_sieve_check)
    return p


def validate(p: argparse.ArgumentParser, args) -> None:
    """Flag checks that need no computation; failures exit with status 2."""
    if not 1e-12 <= args.tol <= 1e-2:
        p.error("--tol must lie in [1e-12, 1e-2]")
    for name in ("u", "u_start", "u_end", "factor", "step"):
        v = getattr(args, name, None)
        if v is not None and not math.isfinite(v):
            p.error(f"--{name.replace('_', '-')} must be finite")
    c = args.command
    if c == "coeffs":
        if min(args.rmax, args.kmax, args.jmax, args.mmax) < 0:
            p.error("table extents must be non-negative")
        if args.jmax < args.mmax:
            p.error("--jmax must be >= --mmax")
    if c in ("eval", "table", "compare") and args.kappa < 0:
        p.error("--kappa must be >= 0")
    if c in ("eval", "table") and args.J < 0:
        p.error("--J must be >= 0")
    if c == "compare" and args.J_max < 0:
        p.error("--J-max must be >= 0")
    if c == "rho":
        if args.kappa < 1:
            p.error("--kappa must be >= 1")
        if args.method == "ode" and args.kappa != 1:
            p.error("--method ode only supports --kappa 1")
        if args.method == "ode" and not 0 < args.step <= 1e-3:
            p.error("--step must be in (0, 1e-3]")
    if c == "table":
        if args.factor <= 1:
            p.error("--factor must be > 1")
        if args.u_start <= 0 or args.u_end < args.u_start:
            p.error("need 0 < --u-start <= --u-end")


def run(argv=None) -> int:
    p = build_parser()
    try:
        args = p.parse_args(argv)
        validate(p, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.func(args)
    except ResourceLimitError as exc:
        print(f"dickman: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DomainError, TableError) as exc:
        print(f"dickman: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"dickman: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = result if isinstance(result, str) else render(*result, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
