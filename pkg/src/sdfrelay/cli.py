"""Command-line front end. Every command writes CSV: one comment line with the
resolved configuration, a header row, then data rows.

Exit codes: 0 success, 2 usage or validation error, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .analytic import outage_rayleigh
from .bounds import (q_bc_asymptotic_pathloss_only, q_bc_lower_bound_fading_marks,
                     q_bc_lower_bound_pathloss_only, tightness_diagnostic)
from .diversity import ANALYTIC_GRID, MONTECARLO_GRID, estimate_scdo, log_grid, outage_curve
from .errors import DomainError
from .geometry import dominant_regions
from .model import NetworkConfig
from .montecarlo import SimulationParams, estimate_outage
from .optimizer import sweep_alpha_curve

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

COMMANDS = ("analytic", "simulate", "scdo", "regions", "optimize", "bound", "tightness")

DEFAULTS: dict[str, Any] = {
    "alpha": 4.0,
    "beta": 0.1,
    "xs": "15,0",
    "xr": None,
    "fading": "rayleigh",
    "lambda": None,
    "lambda_grid": None,
    "alpha_grid": None,
    "trials": 100_000,
    "seed": 0,
    "window_radius": None,
    "source": "auto",
}

# settings that change scheduling or destinations but never a number
_NOT_RECORDED = {"out", "threads", "config", "command"}


class UsageError(Exception):
    pass


def parse_point(text: str) -> tuple[float, float]:
    try:
        x, y = (float(v) for v in str(text).split(","))
    except ValueError:
        raise DomainError(f"expected a point 'x,y', got {text!r}") from None
    return x, y


def parse_grid(text: str, default_spacing: str = "log") -> list[float]:
    """Expand ``lo:hi:N[log|lin]`` into N points, ascending."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise DomainError(f"grid must look like lo:hi:Nlog, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    spec = parts[2].strip().lower()
    spacing = default_spacing
    for suffix in ("log", "lin"):
        if spec.endswith(suffix):
            spacing, spec = suffix, spec[: -len(suffix)]
    n = int(spec)
    if n < 1:
        raise DomainError("grid needs at least one point")
    if n == 1:
        if lo != hi:
            raise DomainError("a one-point grid needs lo == hi")
        return [lo]
    if spacing == "log":
        if not 0 < lo < hi:
            raise DomainError("log grid needs 0 < lo < hi")
        return [float(v) for v in np.logspace(math.log10(lo), math.log10(hi), n)]
    if not lo < hi:
        raise DomainError("linear grid needs lo < hi")
    return [float(v) for v in np.linspace(lo, hi, n)]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--alpha", type=float, help="path-loss exponent, > 2 (default 4)")
    g.add_argument("--beta", type=float, help="SIR threshold (default 0.1)")
    g.add_argument("--xs", help="source position x,y (default 15,0)")
    g.add_argument("--xr", help="relay position x,y; the destination is the origin")
    g.add_argument("--fading", choices=("rayleigh", "pathloss-only", "mixed-u1"),
                   help="fading model (default rayleigh)")
    g.add_argument("--lambda", dest="lambda_", type=float, help="interferer density")
    g.add_argument("--lambda-grid", help="density grid lo:hi:Nlog")
    s = common.add_argument_group("simulation")
    s.add_argument("--trials", type=int, help="Monte Carlo trials per density (default 100000)")
    s.add_argument("--seed", type=int, help="RNG seed (default 0)")
    s.add_argument("--window-radius", type=float, help="simulation disk radius (default automatic)")
    o = common.add_argument_group("run")
    o.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: all cores); never changes results")
    o.add_argument("--out", help="output CSV path (default stdout)")
    o.add_argument("--config", help="JSON file with flag values; flags override it")

    parser = argparse.ArgumentParser(prog="sdfrelay",
                                     description="Outage and diversity of selection decode-and-forward "
                                                 "relaying in a Poisson field of interferers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analytic", parents=[common], help="closed-form outage under Rayleigh fading")
    sub.add_parser("simulate", parents=[common], help="Monte Carlo outage estimates")
    p = sub.add_parser("scdo", parents=[common], help="diversity order from a log-log slope fit")
    p.add_argument("--source", choices=("auto", "analytic", "bound", "montecarlo"),
                   help="outage curve to fit (default: best closed form for the fading model)")
    sub.add_parser("regions", parents=[common], help="dominant-interferer disks and their lens")
    p = sub.add_parser("optimize", parents=[common], help="optimal relay ratio on the line vs alpha")
    p.add_argument("--alpha-grid", help="alpha grid lo:hi:N (linear)")
    sub.add_parser("bound", parents=[common], help="dominant-interferer lower bounds")
    sub.add_parser("tightness", parents=[common], help="Monte Carlo outage over the path-loss-only bound")
    return parser


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    """Merge flags over the JSON config over the defaults."""
    file_values: dict[str, Any] = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise DomainError("config file must hold a JSON object")
        file_values = {k.replace("-", "_").lstrip("_"): v for k, v in raw.items()}
    flags = {k.rstrip("_"): v for k, v in vars(args).items()}
    merged = dict(DEFAULTS)
    for key in set(merged) | set(flags) | set(file_values):
        if flags.get(key) is not None:
            merged[key] = flags[key]
        elif file_values.get(key) is not None:
            merged[key] = file_values[key]
        else:
            merged.setdefault(key, None)
    merged["command"] = args.command
    if merged.get("threads") is None:
        merged["threads"] = os.cpu_count() or 1
    return merged


def _need(opts, key, flag):
    if opts.get(key) is None:
        raise UsageError(f"{opts['command']}: {flag} is required")
    return opts[key]


def _config(opts) -> NetworkConfig:
    x_r = parse_point(_need(opts, "xr", "--xr"))
    return NetworkConfig.create(parse_point(opts["xs"]), x_r, opts["alpha"], opts["beta"],
                                fading=opts["fading"])


def _lambdas(opts, default_grid=None) -> list[float]:
    if opts.get("lambda_grid"):
        return parse_grid(opts["lambda_grid"], "log")
    if opts.get("lambda") is not None:
        return [float(opts["lambda"])]
    if default_grid is not None:
        return default_grid
    raise UsageError(f"{opts['command']}: --lambda or --lambda-grid is required")


def _sim(opts) -> SimulationParams:
    return SimulationParams(trials=int(opts["trials"]), seed=int(opts["seed"]),
                            window_radius=opts.get("window_radius"), threads=int(opts["threads"]))


def cmd_analytic(opts):
    cfg = _config(opts)
    rows = []
    for lam in _lambdas(opts):
        o = outage_rayleigh(cfg.with_lambda(lam))
        rows.append((lam, o.q_bc, o.q_mac, o.q))
    return ("lambda", "q_bc", "q_mac", "q"), rows


def cmd_simulate(opts):
    cfg = _config(opts)
    sim = _sim(opts)
    rows = []
    for lam in _lambdas(opts):
        r = estimate_outage(cfg.with_lambda(lam), sim)
        rows.append((lam, r.bc.p_hat, r.bc.se, r.mac.p_hat, r.mac.se, sim.trials, sim.seed))
    return ("lambda", "q_bc_hat", "se_bc", "q_mac_hat", "se_mac", "trials", "seed"), rows


def cmd_scdo(opts):
    cfg = _config(opts)
    source = opts.get("source") or "auto"
    if source == "montecarlo":
        sim = _sim(opts)
        grid = parse_grid(opts["lambda_grid"]) if opts.get("lambda_grid") else log_grid(*MONTECARLO_GRID)

        def q_of(lam):
            r = estimate_outage(cfg.with_lambda(lam), sim)
            return r.total.p_hat if cfg.fading.is_rayleigh else r.bc.p_hat
        threads = 1
    else:
        q_of, native = outage_curve(cfg)
        if source not in ("auto", native):
            raise DomainError(f"source {source!r} is not available for fading {cfg.fading.name!r}")
        source = native
        grid = parse_grid(opts["lambda_grid"]) if opts.get("lambda_grid") else log_grid(*ANALYTIC_GRID)
        threads = int(opts["threads"])
    fit = estimate_scdo(q_of, grid, source, threads=threads)
    return ("delta_hat", "residual", "source"), [(fit.delta_hat, fit.residual, fit.source)]


def cmd_regions(opts):
    cfg = _config(opts)
    reg = dominant_regions(cfg.layout, cfg.alpha, cfg.beta)
    return (("r1", "r2", "area_r", "area_d", "area_lens", "lens_fraction_of_union", "overlap"),
            [(reg.r1, reg.r2, reg.area_r, reg.area_d, reg.area_lens, reg.lens_fraction_of_union, reg.overlap)])


def cmd_optimize(opts):
    if opts.get("alpha_grid"):
        alphas = parse_grid(opts["alpha_grid"], "lin")
    else:
        alphas = [float(opts["alpha"])]
    lam = float(opts["lambda"]) if opts.get("lambda") is not None else 1e-3
    xs = math.hypot(*parse_point(opts["xs"]))
    for a in alphas:
        if not a > 2:
            raise DomainError(f"path-loss exponent must exceed 2, got {a}")
    rows = []
    for point in sweep_alpha_curve(alphas, float(opts["beta"]), lam, xs, threads=int(opts["threads"])):
        if point.result is None:
            print(f"warning: alpha={point.alpha!r} failed: {point.error}", file=sys.stderr)
            rows.append((point.alpha, math.nan, math.nan))
        else:
            rows.append((point.alpha, point.result.optimal_ratio, point.result.optimal_q))
    return ("alpha", "optimal_ratio", "optimal_q"), rows


def cmd_bound(opts):
    cfg = _config(opts)
    lams = _lambdas(opts)
    name = cfg.fading.name
    if name == "mixed-u1":
        return ("lambda", "bound"), [(lam, q_bc_lower_bound_fading_marks(cfg.with_lambda(lam))) for lam in lams]
    if name == "pathloss-only":
        asym = q_bc_asymptotic_pathloss_only(cfg)
        rows = [(lam, q_bc_lower_bound_pathloss_only(cfg.with_lambda(lam)), asym(lam), asym.order,
                 asym.coefficient, asym.degenerate) for lam in lams]
        return ("lambda", "bound", "asymptotic", "order", "coefficient", "degenerate"), rows
    raise DomainError("bounds are available for --fading mixed-u1 and pathloss-only")


def cmd_tightness(opts):
    cfg = _config(opts)
    rows = tightness_diagnostic(cfg, _lambdas(opts), _sim(opts))
    return ("lambda", "bound", "mc_estimate", "se", "ratio"), [
        (r.lam, r.bound, r.mc_estimate, r.se, r.ratio) for r in rows]


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def render_csv(opts, header, rows) -> str:
    recorded = {k: v for k, v in sorted(opts.items()) if k not in _NOT_RECORDED}
    buf = io.StringIO()
    buf.write(f"# sdfrelay {opts['command']} {json.dumps(recorded, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve(args)
        header, rows = HANDLERS[args.command](opts)
        text = render_csv(opts, header, rows)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sdfrelay: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValueError, json.JSONDecodeError) as exc:
        print(f"sdfrelay: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"sdfrelay: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"sdfrelay: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if opts.get("out"):
            with open(opts["out"], "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"sdfrelay: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
