"""Command-line front end.

    lambda-memory simulate --config base.cfg --set tau_p=50
    lambda-memory sweep --axis gamma_eg:0.05:0.95:60 --axis tau_p:0.2:20:60:log --out fig.csv
    lambda-memory optimize --set omega=0.7 --free a:0.1:3 --free b:-2:3
    lambda-memory figure 8b --out fig8b/
    lambda-memory selftest

Exit codes: 0 success, 1 usage error, 2 too many non-converged cells.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from .integrator import IntegrationOptions, StepUnderflow, integrate
from .model import ConfigError, Params, load_config
from .observables import summarize
from .output import write_atomic
from .sweep import DEFAULT_BOUNDS, AxisSpec, BudgetExhausted, OptimizeSpec, optimize, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_BAD_CELLS = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    p.add_argument("--out", help="output file (or directory for 'figure')")
    p.add_argument("--workers", type=int, help="worker threads (default: LM_WORKERS or CPU count)")
    p.add_argument("--max-bad-cells", type=int, default=0,
                   help="tolerated non-converged cells before exit code 2")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lambda-memory",
                     description="Single-photon storage in a Lambda atom coupled to a waveguide.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("simulate", help="run one configuration")
    _common(p)
    p.add_argument("--trajectory", help="write the trajectory CSV here")

    p = sub.add_parser("sweep", help="1-D or 2-D grid sweep")
    _common(p)
    p.add_argument("--axis", action="append", default=[], metavar="NAME:MIN:MAX:STEPS[:log]")

    p = sub.add_parser("optimize", help="multistart simplex maximisation of P_s")
    _common(p)
    p.add_argument("--free", action="append", default=[], metavar="NAME[:MIN:MAX]",
                   help="free parameter with optional bounds (repeatable)")
    p.add_argument("--multistart", type=int, default=16)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--max-evals", type=int, default=4000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("figure", help="reproduce a figure as CSV")
    _common(p)
    p.add_argument("id")
    p.add_argument("--points", type=int, help="override every axis length")

    p = sub.add_parser("selftest", help="oracle equivalence and invariant checks")
    p.add_argument("--quick", action="store_true", help="smaller grid")
    return parser


def _params(args) -> Params:
    base = load_config(args.config) if args.config else Params()
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip()] = v.strip()
    return base.with_(**overrides)


def _resolved_header(params: Params) -> list[str]:
    cfg = params.resolve()
    eff = cfg.coupling
    return [f"# resolved a={cfg.control.a!r} b={cfg.control.b!r} kappa={eff.kappa!r} "
            f"gamma_eg_eff={eff.gamma_eg_eff!r} gamma_es_eff={eff.gamma_es_eff!r}"]


def _emit(text: str, out: str | None):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    params = _params(args)
    try:
        final = integrate(params.resolve(), IntegrationOptions(), strict=False)
    except StepUnderflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CELLS
    r = summarize(final)
    print(f"P_s={r.P_s:.12g} P_g={r.P_g:.12g} P_e_max={r.P_e_max:.12g} "
          f"converged={str(r.converged).lower()} trace_dev={r.trace_dev:.3g}")
    if args.trajectory:
        header = "\n".join(["# " + s for s in params.to_lines()] + _resolved_header(params))
        write_atomic(args.trajectory, header + "\n" + final.trajectory.to_csv())
    if args.out:
        write_atomic(args.out, "\n".join(["# " + s for s in params.to_lines()]) + "\n"
                     + "P_s,P_g,P_e_max,trace_dev,converged\n"
                     + f"{r.P_s:.12g},{r.P_g:.12g},{r.P_e_max:.12g},{r.trace_dev:.12g},"
                       f"{int(r.converged)}\n")
    return EXIT_OK if r.converged or args.max_bad_cells >= 1 else EXIT_BAD_CELLS


def cmd_sweep(args) -> int:
    if not 1 <= len(args.axis) <= 2:
        raise UsageError("sweep needs one or two --axis options")
    axes = [AxisSpec.parse(a) for a in args.axis]
    params = _params(args)
    table = run_sweep(params, axes, workers=args.workers)
    _emit(table.to_csv(_resolved_header(params)), args.out)
    if table.n_bad > args.max_bad_cells:
        print(f"{table.n_bad} non-converged cells (limit {args.max_bad_cells})", file=sys.stderr)
        return EXIT_BAD_CELLS
    return EXIT_OK


def _parse_free(items) -> dict:
    bounds = {}
    for item in items:
        parts = item.split(":")
        name = parts[0]
        if len(parts) == 1:
            if name not in DEFAULT_BOUNDS:
                raise UsageError(f"no default bounds for {name!r}; give NAME:MIN:MAX")
            bounds[name] = DEFAULT_BOUNDS[name]
        elif len(parts) == 3:
            try:
                bounds[name] = (float(parts[1]), float(parts[2]))
            except ValueError:
                raise UsageError(f"bad bounds in {item!r}") from None
        else:
            raise UsageError(f"bad --free {item!r}; expected NAME or NAME:MIN:MAX")
    return bounds


def cmd_optimize(args) -> int:
    params = _params(args)
    bounds = _parse_free(args.free) if args.free else dict(DEFAULT_BOUNDS)
    spec = OptimizeSpec(bounds, args.multistart, args.tol, args.max_evals, args.seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BudgetExhausted)
        res = optimize(params, spec, workers=args.workers)
    best = " ".join(f"{k}={v:.12g}" for k, v in sorted(res.best_params.items()))
    flag = " budget_exhausted=true" if res.budget_exhausted else ""
    print(f"P_s={res.best_P_s:.12g} {best} evaluations={res.n_evals}{flag}")
    if args.out:
        names = sorted(res.best_params)
        lines = ["# " + s for s in params.to_lines()]
        lines += [f"# bounds {k}={lo!r}:{hi!r}" for k, (lo, hi) in sorted(bounds.items())]
        lines.append(",".join(["eval"] + names + ["P_s", "best_so_far"]))
        for i, ev in enumerate(res.log):
            vals = [f"{ev.params[k]:.12g}" for k in names]
            lines.append(",".join([str(i)] + vals + [f"{ev.P_s:.12g}", f"{ev.best_so_far:.12g}"]))
        write_atomic(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_figure(args) -> int:
    from .figures import UnknownFigure, figure

    if not args.out:
        raise UsageError("figure needs --out DIR")
    try:
        result = figure(args.id, points=args.points, workers=args.workers)
    except UnknownFigure as exc:
        raise UsageError(str(exc.args[0])) from None
    result.write(args.out)
    bad = sum(getattr(t, "n_bad", 0) for t in result.tables.values())
    print(f"figure {result.spec.id}: {len(result.tables)} table(s) written to {Path(args.out)}")
    if bad > args.max_bad_cells:
        print(f"{bad} non-converged cells (limit {args.max_bad_cells})", file=sys.stderr)
        return EXIT_BAD_CELLS
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return EXIT_OK if run_selftest(quick=args.quick) else EXIT_BAD_CELLS


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "figure": cmd_figure,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
