"""Command-line driver: ``lvlmg solve | sweep | spectrum``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import gamma_spectrum_table, smooth_limit
from .cycle import CycleConfig, build_hierarchy, solve
from .grid import ConfigurationError
from .krylov import fgmres, mg_preconditioner
from .operator import CSG, CSL, UNPERTURBED
from .problems import PROBLEMS, make_problem
from .smoother import GmresM, WeightedJacobi

log = logging.getLogger("lvlmg")

METHODS = ("lvl-mg", "mg-fgmres", "mg-fgmres-restarted", "lvl-mg-fgmres",
           "lvl-mg-fgmres-restarted")
SWEEP_PARAMS = ("n", "k", "f", "k0", "theta-max")
REPORT_KEYS = ("problem", "method", "params", "iterations", "converged",
               "final_rel_residual", "wall_seconds", "work_units", "residual_history_file")

EXIT_OK, EXIT_CONFIG, EXIT_NOT_CONVERGED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


_PI_EXPR = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_angle(text) -> float:
    """Parse ``0.5``, ``pi/6``, ``2pi/3`` or ``2*pi/15``."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _PI_EXPR.match(str(text))
    if m:
        num = float(m.group(1)) if m.group(1) not in ("", None) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}") from None


def parse_smoother(text: str):
    """``gmres`` / ``gmres:M`` or ``jacobi`` / ``jacobi:OMEGA[:SWEEPS]``."""
    name, *rest = str(text).split(":")
    if name == "gmres":
        return GmresM(int(rest[0]) if rest else 3)
    if name == "jacobi":
        omega = complex(rest[0]) if rest else 2.0 / 3.0
        if omega.imag == 0:
            omega = omega.real
        return WeightedJacobi(omega, int(rest[1]) if len(rest) > 1 else 1)
    raise argparse.ArgumentTypeError(f"unknown smoother {text!r}")


def _add_solve_args(p):
    p.add_argument("--config", type=Path, help="JSON file with default values for any flag")
    p.add_argument("--problem", choices=PROBLEMS)
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--k", type=float, help="wavenumber (constant-k)")
    p.add_argument("--f", type=float, help="frequency in Hz (wedge)")
    p.add_argument("--k0", type=float, help="asymptotic wavenumber (ionization)")
    p.add_argument("--n", type=int, help="interior points per axis (finest level)")
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--nz", type=int)
    p.add_argument("--dim", type=int, help="dimension of constant-k problem")
    p.add_argument("--bc", choices=("ecs", "dirichlet"))
    p.add_argument("--theta-max", type=parse_angle)
    p.add_argument("--variant", choices=(CSG, CSL, UNPERTURBED))
    p.add_argument("--restart", type=int)
    p.add_argument("--nu1", type=int)
    p.add_argument("--nu2", type=int)
    p.add_argument("--smoother", type=parse_smoother)
    p.add_argument("--tol", type=float)
    p.add_argument("--maxiter", type=int)
    p.add_argument("--ecs-angle", type=parse_angle)
    p.add_argument("--max-levels", type=int)
    p.add_argument("--seed", type=int, help="recorded only; the pipeline is deterministic")
    p.add_argument("--out", type=Path, help="output directory (solve) or CSV file (sweep)")


DEFAULTS = {
    "method": "lvl-mg", "theta_max": math.pi / 6, "variant": CSG, "nu1": 1, "nu2": 1,
    "smoother": GmresM(3), "tol": 1e-7, "maxiter": 500, "seed": 0, "dim": 2, "bc": "ecs",
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lvlmg", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("solve", help="run one solve")
    _add_solve_args(p)
    p = sub.add_parser("sweep", help="sweep one parameter and tabulate iterations")
    _add_solve_args(p)
    p.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    p.add_argument("--values", required=True,
                   help="comma-separated list; angles accept pi expressions")
    p.add_argument("--jobs", type=int, default=1)
    p = sub.add_parser("spectrum", help="tabulate the perturbation-error weights gamma_l")
    p.add_argument("--n", type=int, required=True, help="fine-grid intervals per axis")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--dtheta", type=parse_angle)
    p.add_argument("--theta-max", type=parse_angle, default=math.pi / 6,
                   help="used with dtheta = theta_max / log2(n) when --dtheta is absent")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--variant", choices=(CSG, CSL), default=CSG)
    p.add_argument("--out", type=Path, help="CSV file (default: stdout)")
    return parser


def resolve_options(args) -> dict:
    """Merge defaults, the optional JSON config file and explicit flags."""
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config file {args.config}: {exc}") from exc
        for key, value in data.items():
            key = key.replace("-", "_")
            if key in ("theta_max", "ecs_angle"):
                value = parse_angle(value)
            elif key == "smoother":
                value = parse_smoother(value)
            opts[key] = value
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "command", "verbose"):
            opts[key] = value
    if not opts.get("problem"):
        raise ConfigurationError("no --problem given")
    if opts.get("method") not in METHODS:
        raise ConfigurationError(f"unknown method {opts.get('method')!r}")
    if opts["problem"] not in PROBLEMS:
        raise ConfigurationError(f"unknown problem {opts['problem']!r}")
    return opts


def _smoother_label(s) -> str:
    if isinstance(s, GmresM):
        return f"gmres:{s.m}"
    return f"jacobi:{s.omega}:{s.sweeps}"


def run_solve(opts: dict):
    """Build the problem and run the requested method. Returns ``(x, report, params)``."""
    problem = make_problem(opts["problem"], **{k: opts.get(k) for k in
                           ("k", "f", "k0", "n", "nx", "ny", "nz", "bc", "dim", "ecs_angle")})
    method = opts["method"]
    fixed = method.startswith("mg-fgmres")
    config = CycleConfig(nu1=opts["nu1"], nu2=opts["nu2"], smoother=opts["smoother"],
                         variant=CSG if fixed else opts["variant"], theta_max=opts["theta_max"],
                         max_levels=opts.get("max_levels"), fixed_angle=fixed)
    h = build_hierarchy(problem, config)
    if method == "lvl-mg":
        x, report = solve(h, problem.rhs, tol=opts["tol"], maxiter=opts["maxiter"])
    else:
        restart = None
        if method.endswith("restarted"):
            restart = opts.get("restart") or 10
        x, report = fgmres(h.base, problem.rhs, mg_preconditioner(h), restart=restart,
                           tol=opts["tol"], maxiter=opts["maxiter"])
    params = {key: problem.params.get(key) for key in problem.params}
    params.update({"theta_max": config.theta_max, "dtheta": h.schedule.dtheta, "levels": h.p,
                   "variant": config.variant, "nu1": config.nu1, "nu2": config.nu2,
                   "smoother": _smoother_label(config.smoother), "tol": opts["tol"],
                   "maxiter": opts["maxiter"], "restart": opts.get("restart"),
                   "seed": opts.get("seed")})
    return x, report, params


def _fmt(x) -> str:
    return format(float(x), ".16e")


def write_outputs(out: Path, opts: dict, report, params: dict) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{opts['problem']}_{opts['method']}"
    hist = out / f"{stem}_history.csv"
    with hist.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "residual_norm", "relative_residual"])
        for i, (r, rr) in enumerate(zip(report.residual_history, report.relative_residuals)):
            w.writerow([i, _fmt(r), _fmt(rr)])
    data = {
        "problem": opts["problem"],
        "method": opts["method"],
        "params": params,
        "iterations": report.iterations,
        "converged": report.converged,
        "final_rel_residual": report.final_rel_residual,
        "wall_seconds": report.wall_seconds,
        "work_units": report.work_units,
        "residual_history_file": hist.name,
    }
    path = out / f"{stem}_report.json"
    path.write_text(json.dumps(data, indent=2, default=str))
    return path


def cmd_solve(args) -> int:
    opts = resolve_options(args)
    _, report, params = run_solve(opts)
    print(f"{opts['problem']} {opts['method']}: levels={params['levels']} "
          f"dtheta={params['dtheta']:.6g} iterations={report.iterations} "
          f"converged={report.converged} rel_residual={report.final_rel_residual:.3e} "
          f"wall={report.wall_seconds:.2f}s work_units={report.work_units:.1f}")
    if opts.get("out"):
        path = write_outputs(Path(opts["out"]), opts, report, params)
        print(f"report written to {path}")
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def _sweep_point(opts):
    _, report, _ = run_solve(opts)
    return report.iterations, report.work_units, report.wall_seconds, report.converged


def cmd_sweep(args) -> int:
    opts = resolve_options(args)
    raw = [v for v in str(opts.pop("values")).split(",") if v.strip()]
    if not raw:
        raise ConfigurationError("empty sweep list")
    param = opts.pop("param")
    key = param.replace("-", "_")
    cast = parse_angle if key == "theta_max" else (int if key == "n" else float)
    values = [cast(v) for v in raw]
    jobs = opts.pop("jobs", 1) or 1
    points = [dict(opts, **{key: v}) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, points))
    else:
        results = [_sweep_point(p) for p in points]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([param, "iterations", "work_units", "wall_seconds", "converged"])
    for v, (it, work, wall, conv) in zip(values, results):
        w.writerow([_fmt(v) if key == "theta_max" else v, it, _fmt(work), _fmt(wall), conv])
    if opts.get("out"):
        Path(opts["out"]).parent.mkdir(parents=True, exist_ok=True)
        Path(opts["out"]).write_text(buf.getvalue())
    sys.stdout.write(buf.getvalue())
    return EXIT_OK if all(r[3] for r in results) else EXIT_NOT_CONVERGED


def cmd_spectrum(args) -> int:
    if args.n < 4 or args.n & (args.n - 1) or args.dim not in (1, 2, 3):
        raise ConfigurationError(f"invalid mode range: n={args.n}, dim={args.dim}")
    dtheta = args.dtheta if args.dtheta is not None else args.theta_max / math.log2(args.n)
    rows = gamma_spectrum_table(args.n, args.k, dtheta, args.dim, args.variant)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    idx_cols = ["l"] if args.dim == 1 else [f"l{i + 1}" for i in range(args.dim)]
    w.writerow(idx_cols + ["re_gamma", "im_gamma"])
    for l, g in rows:
        w.writerow(([l] if args.dim == 1 else list(l)) + [_fmt(g.real), _fmt(g.imag)])
    mods = np.abs([g for _, g in rows])
    marker = smooth_limit(dtheta)
    summary = (f"# max|gamma|={mods.max():.6g} mean|gamma|={mods.mean():.6g} "
               f"smooth_limit={marker.real:.6g}{marker.imag:+.6g}j dtheta={dtheta:.6g}")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    print(summary)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"lvlmg: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    commands = {"solve": cmd_solve, "sweep": cmd_sweep, "spectrum": cmd_spectrum}
    try:
        return commands[args.command](args)
    except ConfigurationError as exc:
        print(f"lvlmg: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
