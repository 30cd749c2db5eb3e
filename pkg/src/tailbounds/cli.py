"""Command-line entry point: ``tailbounds <command> ...``.

Exit codes: 0 success, 1 usage or domain error, 2 counterexamples found,
3 computation budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import bounds, chernoff, exact, verify
from .bounds import BoundMethod, CertMode
from .distributions import Kind, Side, TailQuery, make_spec
from .errors import BudgetExceeded, DomainError, TailBoundError

EXIT_OK, EXIT_ERROR, EXIT_COUNTEREXAMPLES, EXIT_BUDGET = 0, 1, 2, 3

RECORD_KEYS = ("dist", "mu", "lambda", "n", "side", "method", "direction", "log_bound",
               "bound", "exact_log", "ratio", "applicable", "notes", "std_error",
               "trials", "seed", "generator_id")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(rows: list[dict], keys: tuple[str, ...] | None = None, out=None) -> str:
    if keys is None:
        present = {k for row in rows for k in row}
        keys = tuple(k for k in RECORD_KEYS if k in present) + tuple(
            sorted(present - set(RECORD_KEYS)))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(keys)
    for row in rows:
        writer.writerow([_fmt(row.get(k)) for k in keys])
    return buf.getvalue()


def write_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _finite_or_none(x: float) -> float | None:
    return x if math.isfinite(x) else None


def _add_dist_args(p: argparse.ArgumentParser, mu_required: bool = False) -> None:
    p.add_argument("--dist", required=True, choices=[k.value for k in Kind])
    group = p.add_mutually_exclusive_group(required=mu_required)
    group.add_argument("--mu", type=float)
    group.add_argument("--p", type=float)
    group.add_argument("--rho", type=float)


def _spec(args):
    if args.mu is None and args.p is None and args.rho is None:
        if args.dist == Kind.GEOMETRIC.value:
            raise DomainError("geometric queries need one of --mu or --p")
        return make_spec(args.dist, mu=1.0)
    return make_spec(args.dist, mu=args.mu, p=args.p, rho=args.rho)


def _query(args) -> TailQuery:
    return TailQuery(_spec(args), args.n, args.lam, args.side)


def _bound_record(q: TailQuery, r: bounds.BoundReport) -> dict:
    rec = q.describe()
    rec.update(method=r.method.value, direction=r.direction.value, log_bound=r.log_bound,
               bound=math.exp(r.log_bound), applicable=r.applicable, notes=r.notes)
    return rec


def _emit_records(rows: list[dict], fmt: str) -> str:
    return write_json(rows) if fmt == "json" else write_csv(rows)


def cmd_eval(args) -> tuple[str, int]:
    q = _query(args)
    mode = CertMode(args.mode)
    if args.method == "all":
        reports = bounds.compare_all(q, mode)
    elif args.method == "theorem1":
        reports = [bounds.thm1_bound(q)]
    elif args.method == "certificate":
        reports = [bounds.certificate_bound(q, mode)]
    elif args.method == "janson":
        reports = [bounds.janson_bound(q)]
    else:
        reports = [bounds.agrawal_bound(q)]
    return _emit_records([_bound_record(q, r) for r in reports], args.format), EXIT_OK


def cmd_exact(args) -> tuple[str, int]:
    q = _query(args)
    rows = []
    if not args.mc or not args.skip_exact:
        lp = exact.exact_tail(q)
        rec = q.describe()
        rec.update(method="exact", log_bound=lp.log_value, bound=lp.prob, exact_log=lp.log_value,
                   applicable=True, notes="binomial/Poisson counting identity")
        rows.append(rec)
    if args.mc:
        est = exact.mc_tail(q, args.trials, args.seed, workers=args.workers)
        rec = q.describe()
        rec.update(method="monte_carlo",
                   log_bound=math.log(est.estimate) if est.estimate > 0 else None,
                   bound=est.estimate, applicable=True, notes=f"hits={est.hits}",
                   std_error=est.std_error, trials=est.trials, seed=est.seed,
                   generator_id=est.generator_id)
        rows.append(rec)
    return _emit_records(rows, args.format), EXIT_OK


def _family(dist: str, lam: float) -> chernoff.Family:
    if dist == Kind.GEOMETRIC.value:
        return chernoff.Family.GEOM_UPPER if lam > 1 else chernoff.Family.GEOM_LOWER
    if lam < 1:
        raise DomainError("no Chernoff exponent curve is defined for the exponential lower tail")
    return chernoff.Family.EXP_UPPER


def cmd_chernoff(args) -> tuple[str, int]:
    spec = _spec(args)
    curve = chernoff.ExponentCurve(_family(args.dist, args.lam), args.lam, spec.mu)
    if args.numeric:
        opt = chernoff.numeric_optimum(curve, args.tol)
    else:
        opt = chernoff.closed_form_optimum(curve)
    row = {"family": curve.family.value, "lambda": curve.lam, "mu": curve.mu,
           "t_star": opt.t_star, "exponent": opt.value, "rate": opt.rate,
           "method": opt.method.value, "iterations": opt.iterations}
    keys = ("family", "lambda", "mu", "t_star", "exponent", "rate", "method", "iterations")
    if args.format == "json":
        return write_json(row), EXIT_OK
    return write_csv([row], keys), EXIT_OK


def cmd_verify(args) -> tuple[str, int]:
    grid = None
    if args.grid:
        try:
            with open(args.grid) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read grid file {args.grid}: {exc}") from None
        grid = verify.GridSpec.from_dict(data)
    report = verify.run_suite(args.suite, grid, args.mode, args.tolerance)
    code = EXIT_OK if report.passed else EXIT_COUNTEREXAMPLES
    return write_json(report.to_dict()), code


def _int_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty integer list")
    return values


def cmd_asymptotics(args) -> tuple[str, int]:
    spec = _spec(args)
    rows = []
    for n in args.n_list:
        q = TailQuery(spec, n, args.lam, args.side)
        ratio, certified = verify.asymptotic_ratio(q)
        rate = bounds.rate(q)
        rows.append({"n": n, "exact_log": exact.exact_tail(q).log_value,
                     "n_times_rate": n * rate, "ratio": ratio, "certified_max": certified})
    keys = ("n", "exact_log", "n_times_rate", "ratio", "certified_max")
    if args.format == "json":
        return write_json(rows), EXIT_OK
    return write_csv(rows, keys), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tailbounds",
                     description="Tail bounds for sums of geometric and exponential variables.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate catalog bounds for one query")
    _add_dist_args(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--side", choices=[s.value for s in Side], required=True)
    p.add_argument("--method", choices=["theorem1", "certificate", "janson", "agrawal", "all"],
                   default="all")
    p.add_argument("--mode", choices=[m.value for m in CertMode], default=CertMode.REPAIRED.value)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("exact", help="exact tail probability and optional Monte Carlo estimate")
    _add_dist_args(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--side", choices=[s.value for s in Side], required=True)
    p.add_argument("--mc", action="store_true")
    p.add_argument("--skip-exact", action="store_true", help="with --mc, omit the exact record")
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("chernoff", help="optimise a Chernoff exponent curve")
    _add_dist_args(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--numeric", action="store_true")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_chernoff)

    p = sub.add_parser("verify", help="run a verification suite over a grid")
    p.add_argument("--suite", choices=[s.value for s in verify.Suite], default="all")
    p.add_argument("--mode", choices=[m.value for m in CertMode], default=CertMode.REPAIRED.value)
    p.add_argument("--grid")
    p.add_argument("--tolerance", type=float, default=verify.DEFAULT_TOLERANCE)
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("asymptotics", help="ratio -ln(exact)/(n*rate) with certified envelope")
    _add_dist_args(p)
    p.add_argument("--side", choices=[s.value for s in Side], required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_asymptotics)
    return parser


def _diagnose(kind: str, message: str) -> None:
    message = " ".join(str(message).split())
    print(f"tailbounds: error={kind} message={json.dumps(message)}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text, code = args.func(args)
    except UsageError as exc:
        _diagnose("UsageError", exc)
        return EXIT_ERROR
    except BudgetExceeded as exc:
        _diagnose(type(exc).__name__, exc)
        return EXIT_BUDGET
    except TailBoundError as exc:
        _diagnose(type(exc).__name__, exc)
        return EXIT_ERROR
    try:
        sys.stdout.write(text)
        sys.stdout.flush()
    except BrokenPipeError:
        sys.stderr.close()
    return code


if __name__ == "__main__":
    sys.exit(main())
