"""Command-line front end.

Results go to stdout, logs to stderr.  Exit status: 0 success, 1 selftest
failure, 2 domain error, 3 resource error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys

from . import acceptance, container, kernels
from . import estimators as est
from . import kernel_saddle as ks
from . import sandwich, sieves
from . import special_functions as sf
from .estimators import fmt

log = logging.getLogger("friable")

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_RESOURCE = 0, 1, 2, 3


class DomainError(Exception):
    pass


# ------------------------------------------------------------------ resources

class Resources:
    """Builds (or loads from the cache directory) the tables a command needs."""

    def __init__(self, args):
        self.args = args
        self.cache_dir = args.cache_dir or os.environ.get(container.CACHE_ENV)

    def rho(self, max_v=None):
        max_v = float(max_v or self.args.max_v)
        step = self.args.grid_step
        return container.cached(
            self.cache_dir, "rho", max_v,
            lambda: sf.build_rho_table(max_v, step),
            lambda p: container.load_rho_table(p, step, max_v),
            container.save_rho_table, grid_step=step)

    def factors(self, x):
        limit = int(self.args.table_limit or math.floor(x * (1 + sieves.GUARD)))
        if x > limit:
            raise DomainError(f"x = {x:g} exceeds --table-limit {limit}")
        if self.args.low_memory:
            return sieves.SegmentedFactors(limit)
        return container.cached(
            self.cache_dir, "factors", limit,
            lambda: sieves.build_tables(limit, threads=self.args.threads),
            lambda p: container.load_factor_tables(p, limit),
            container.save_factor_tables)

    def ctx(self):
        limit = self.args.prime_limit

        def load(p):
            return container.load_primes(p, limit)[1]

        primes = container.cached(
            self.cache_dir, "primes", limit, lambda: sieves.primes_up_to(limit), load,
            lambda p, arr: container.save_primes(p, limit, arr))
        return ks.make_context(limit, primes=primes)


# ------------------------------------------------------------------ output

def _emit(args, primary, record, out):
    if args.format == "json":
        out.write(json.dumps({k: _jsonable(v) for k, v in record.items()}, sort_keys=True) + "\n")
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(list(record))
        w.writerow([fmt(v) if isinstance(v, (int, float)) else v for v in record.values()])
    else:
        out.write((fmt(primary) if isinstance(primary, (int, float)) else str(primary)) + "\n")


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def _floats(text):
    return [float(t) for t in str(text).split(",") if t.strip()]


# ------------------------------------------------------------------ commands

def cmd_rho(args, res, out):
    table = res.rho(max(args.max_v, math.ceil(args.v) + 1))
    value = sf.rho(table, args.v)
    _emit(args, value, {"v": args.v, "rho": float(value), "rho_prime": float(sf.rho_prime(table, args.v)),
                        "r": float(sf.r(table, args.v)) if args.v > 0 else 0.0}, out)


def cmd_xi(args, res, out):
    value = sf.xi(args.v)
    _emit(args, value, {"v": args.v, "xi": value, "xi_prime": sf.xi_prime(args.v)}, out)


def cmd_sigma(args, res, out):
    ctx = res.ctx()
    value = ks.sigma_solve(ctx, args.t)
    rec = {"t": args.t, "sigma": value, "residual": ks.g_prime(ctx, value) + args.t}
    if args.t >= 16:
        for k in (0, 1, 2):
            rec[f"asymptotic_order{k}"] = ks.sigma_asymptotic(args.t, k)
    _emit(args, value, rec, out)


def cmd_bigf(args, res, out):
    ctx = res.ctx()
    value = ks.F(ctx, args.t)
    _emit(args, value, {"t": args.t, "F": value, "reduced_accuracy": ks.F_reduced_accuracy(ctx, args.t)}, out)


def cmd_zeta(args, res, out):
    if args.s <= 0:
        raise DomainError("s must be positive")
    zeta = sf.zeta_real(args.s) if args.s != 1 else math.inf
    _emit(args, zeta if args.s != 1 else sf.Z(args.s), {"s": args.s, "zeta": zeta, "Z": sf.Z(args.s)}, out)


def _count(kind, source, x, args):
    if kind == "dickman-sum":
        return sieves.dickman_sum_exact(source, x, args.numerator)
    if kind == "S":
        return sieves.s_exact(source, x, _need(args, "theta"), args.alpha)
    if kind == "D":
        return sieves.d_exact(source, x, _need(args, "u"))
    return sieves.CountQuery(kind, x, y=_need(args, "y")).run(source)


def _need(args, name):
    v = getattr(args, name)
    if v is None:
        raise DomainError(f"--{name} is required for --kind {args.kind}")
    return v


def cmd_count(args, res, out):
    value = _count(args.kind, res.factors(args.x), args.x, args)
    rec = {"kind": args.kind, "x": args.x}
    for name in ("y", "u", "theta"):
        if getattr(args, name) is not None:
            rec[name] = getattr(args, name)
    if args.kind == "S":
        rec["alpha"] = args.alpha
    rec["count"] = value
    _emit(args, value, rec, out)


def _estimate(kind, x, args, res, y=None, u=None, theta=None, form=None):
    if kind == "psi-saddle":
        return est.psi_saddle(res.rho(), x, y)
    if kind == "psi-saias":
        return est.psi_saias(res.rho(), x, y)
    if kind == "D":
        return est.d_estimate(res.rho(), x, u, form or args.form)
    if kind == "dickman-sum":
        return est.dickman_sum_estimate(x, args.numerator)
    if kind == "N":
        return est.n_estimate(res.ctx(), x, y)
    if kind == "S":
        return est.s_estimate(res.ctx(), x, theta, args.alpha)
    raise DomainError(f"unknown estimate kind {kind!r}")


def cmd_estimate(args, res, out):
    y = args.y
    if y is None and args.u is not None and args.kind.startswith("psi"):
        y = args.x ** (1 / args.u)
    rep = _estimate(args.kind, args.x, args, res, y=y, u=args.u, theta=args.theta)
    if args.format == "csv":
        out.write(est.reports_to_csv([(rep, None)]))
    elif args.format == "json":
        out.write(rep.to_json() + "\n")
    else:
        out.write(fmt(rep.value) + "\n")


def cmd_sandwich(args, res, out):
    trace = open(args.trace, "w", newline="") if args.trace else None
    try:
        if args.kind == "D":
            u = _need(args, "u")
            f = (sandwich.exact_psi(res.factors(args.x)) if args.evaluator == "exact"
                 else sandwich.asymptotic_psi(res.rho()))
            sched = sandwich.default_schedule_friable(args.x, u)
            lo, up = sandwich.sandwich_D(f, args.x, u, sched, trace)
        else:
            theta = _need(args, "theta")
            f = (sandwich.exact_n(res.factors(args.x)) if args.evaluator == "exact"
                 else sandwich.asymptotic_n(res.ctx()))
            sched = sandwich.default_schedule_kernel(args.x, theta, args.alpha)
            lo, up = sandwich.sandwich_S(f, args.x, theta, args.alpha, sched, trace)
    finally:
        if trace:
            trace.close()
    if sched.capped:
        log.info("K capped from %d to %d", sched.K_uncapped, sched.K)
    rec = {"kind": args.kind, "x": args.x, "epsilon": sched.epsilon, "K": sched.K,
           "K_uncapped": sched.K_uncapped, "lower": lo, "upper": up}
    _emit(args, f"{fmt(lo)} {fmt(up)}", rec, out)


COMPARE_ESTIMATORS = {
    "psi": ("psi-saddle", "psi-saias"),
    "D": ("D:expansion15", "D:thm11"),
    "N": ("N",),
    "S": ("S",),
    "dickman-sum": ("dickman-sum",),
}


def compare_rows(args, res):
    """(report, exact) pairs over the grid x-list times parameter-list."""
    rows = []
    for x in _floats(args.x):
        source = res.factors(x)
        if args.kind in ("psi", "N"):
            ys = _floats(args.y) if args.y else [x ** (1 / u) for u in _floats(_need(args, "u"))]
            grid = [dict(y=y) for y in ys]
        elif args.kind == "D":
            grid = [dict(u=u) for u in _floats(_need(args, "u"))]
        elif args.kind == "S":
            grid = [dict(theta=t) for t in _floats(_need(args, "theta"))]
        else:
            grid = [{}]
        for params in grid:
            if args.kind == "psi":
                exact = sieves.psi_exact(source, x, params["y"])
            elif args.kind == "N":
                exact = sieves.n_exact(source, x, params["y"])
            elif args.kind == "D":
                exact = sieves.d_exact(source, x, params["u"])
            elif args.kind == "S":
                exact = sieves.s_exact(source, x, params["theta"], args.alpha)
            else:
                exact = sieves.dickman_sum_exact(source, x, args.numerator)
            for name in COMPARE_ESTIMATORS[args.kind]:
                kind, _, form = name.partition(":")
                rep = _estimate(kind, x, args, res, form=form or None, **params)
                rep.kind = name
                rows.append((rep, exact))
    return rows


def cmd_compare(args, res, out):
    rows = compare_rows(args, res)
    if args.format == "json":
        for rep, exact in rows:
            out.write(json.dumps(rep.csv_row(exact)) + "\n")
    elif args.format == "csv":
        out.write(est.reports_to_csv(rows))
    else:
        for rep, exact in rows:
            r = rep.csv_row(exact)
            out.write(f"{r['kind']:<16} x={r['x']} exact={r['exact']} estimate={rep.value:.10g} "
                      f"normalized_dev={r['normalized_dev']} in_range={r['in_range']}\n")


def cmd_selftest(args, res, out):
    if args.full:
        scale = acceptance.Scale.full()
    else:
        scale = acceptance.Scale.reduced()
    skip = acceptance.HEAVY if args.quick else ()
    ws = acceptance.Workspace(scale, prime_limit=args.prime_limit)
    results = acceptance.run_all(scale, skip, ws, lambda r: (out.write(r.line() + "\n"), out.flush()))
    failed = [r for r in results if not r.passed]
    out.write(f"{len(results) - len(failed)}/{len(results)} criteria passed\n")
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "rho": cmd_rho, "xi": cmd_xi, "sigma": cmd_sigma, "bigf": cmd_bigf, "zeta": cmd_zeta,
    "count": cmd_count, "estimate": cmd_estimate, "sandwich": cmd_sandwich,
    "compare": cmd_compare, "selftest": cmd_selftest,
}


# ------------------------------------------------------------------ parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--format", choices=("text", "json", "csv"), default="text")
    g.add_argument("--cache-dir", default=None,
                   help=f"table cache directory (default: ${container.CACHE_ENV}, else no cache)")
    g.add_argument("--threads", type=int, default=None, help="sieve threads (default: all cores)")
    g.add_argument("--table-limit", type=int, default=None, help="factor table size (default: x)")
    g.add_argument("--low-memory", action="store_true", help="segmented sieving instead of full tables")
    g.add_argument("--prime-limit", type=int, default=ks.DEFAULT_PRIME_LIMIT)
    g.add_argument("--grid-step", type=float, default=sf.DEFAULT_GRID_STEP)
    g.add_argument("--max-v", type=float, default=40.0)
    g.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="friable", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help):
        return sub.add_parser(name, parents=[common], help=help)

    q = add("rho", "Dickman rho, rho' and r at v")
    q.add_argument("--v", type=float, required=True)
    q = add("xi", "xi(v) and xi'(v)")
    q.add_argument("--v", type=float, required=True)
    q = add("sigma", "saddle point sigma_t")
    q.add_argument("--t", type=float, required=True)
    q = add("bigf", "F(t)")
    q.add_argument("--t", type=float, required=True)
    q = add("zeta", "zeta(s) and Z(s) for real s > 0")
    q.add_argument("--s", type=float, required=True)

    for name, help, kinds in (
            ("count", "exact counts from sieve tables", ("psi", "D", "N", "S", "dickman-sum")),
            ("estimate", "asymptotic estimate with error scale",
             ("psi-saddle", "psi-saias", "D", "dickman-sum", "N", "S")),
            ("compare", "exact versus asymptotic table over a grid", tuple(COMPARE_ESTIMATORS))):
        q = add(name, help)
        q.add_argument("--kind", choices=kinds, required=True)
        numbers = str if name == "compare" else float
        q.add_argument("--x", type=numbers, required=True)
        q.add_argument("--y", type=numbers)
        q.add_argument("--u", type=numbers)
        q.add_argument("--theta", type=numbers)
        q.add_argument("--alpha", type=float, default=0.0)
        q.add_argument("--numerator", choices=("log_n", "log_x"), default="log_n")
        if name != "count":
            q.add_argument("--form", choices=("expansion15", "thm11"), default="expansion15")

    q = add("sandwich", "lower and upper bounds from the discretization sandwich")
    q.add_argument("--kind", choices=("D", "S"), required=True)
    q.add_argument("--x", type=float, required=True)
    q.add_argument("--u", type=float)
    q.add_argument("--theta", type=float)
    q.add_argument("--alpha", type=float, default=0.0)
    q.add_argument("--evaluator", choices=("exact", "asymptotic"), default="exact")
    q.add_argument("--trace", help="write the per-step partial sums to this CSV file")

    q = add("selftest", "run the acceptance checks (x <= 1e6 unless --full)")
    mode = q.add_mutually_exclusive_group()
    mode.add_argument("--quick", action="store_true", help="skip the sieve-heavy checks")
    mode.add_argument("--full", action="store_true", help="run at acceptance scale (x = 1e7)")
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                        level=logging.WARNING - 10 * min(args.verbose, 2))
    log.debug("kernel backend: %s", kernels.BACKEND)
    # selftest streams its lines; other commands print only complete results
    buf = out if args.command == "selftest" else io.StringIO()
    try:
        code = COMMANDS[args.command](args, Resources(args), buf) or EXIT_OK
    except (ValueError, ArithmeticError, DomainError) as exc:
        log.error("%s", exc)
        code = EXIT_DOMAIN
    except (MemoryError, OSError) as exc:
        log.error("resource error: %s", exc)
        code = EXIT_RESOURCE
    if buf is not out:
        out.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
