"""Command-line front end.

Exit codes: 0 success, 1 validation or computation failure, 2 input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from . import __version__
from .analytic import feedback_only_optimum, ground_state_criteria
from .optimizer import OptimizationError, OptimizerConfig, feedback_gain_db, optimize_gain
from .params import ParameterError, PhysicalParams, classify, diagnostics, load_params, reduce
from .quadrature import QuadratureConfig, QuadratureError, integrate_spectrum
from .spectrum import SpectrumModel
from .sweep import COLUMNS, load_grid, run_sweep, write_heatmap

EXIT_OK, EXIT_VALIDATION, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--params", type=Path, help="JSON parameter file")
    parser.add_argument("--reduced", action="store_true",
                        help="parameter file holds reduced (cooperativity) parameters")
    parser.add_argument("--format", choices=("text", "csv", "json"), default=None)
    parser.add_argument("--out", type=Path, help="write output here instead of stdout")
    parser.add_argument("--tol", type=float, default=1e-8, help="quadrature relative tolerance")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridcool",
        description="Steady-state cooling of a mechanical oscillator by feedback and trapped atoms.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("variance", help="steady-state variance at one parameter point")
    _common(p)
    p.add_argument("--optimize", action="store_true", help="optimise the feedback gain first")
    p.add_argument("--gain", type=float, help="feedback gain G (overrides the file)")
    p.add_argument("--bandwidth", type=float, help="feedback bandwidth in rad/s")

    p = sub.add_parser("optimize-gain", help="optimal feedback gain")
    _common(p)

    p = sub.add_parser("sweep", help="two-dimensional cooperativity map")
    _common(p)
    p.add_argument("--grid", type=Path, required=True, help="JSON grid file")
    p.add_argument("--heatmap", type=Path, help="also write an SVG heatmap")
    p.add_argument("--column", default="var_num_gopt", help="column shown in the heatmap")

    p = sub.add_parser("classify", help="ground-state cooling regime")
    _common(p)

    p = sub.add_parser("diagnose", help="consistency checks on physical parameters")
    _common(p)

    p = sub.add_parser("validate", help="run the cross-validation suites")
    _common(p)
    p.add_argument("--oracle-cases", type=int, default=100)
    return parser


def _reduced(args):
    if args.params is None:
        raise InputError("--params is required")
    try:
        p = load_params(args.params, reduced=args.reduced)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {args.params}: {exc}") from exc
    r = p if args.reduced else reduce(p)
    changes = {}
    if getattr(args, "gain", None) is not None:
        changes["G"] = args.gain
    if getattr(args, "bandwidth", None) is not None:
        changes["fb_bandwidth"] = args.bandwidth
    return r.replace(**changes) if changes else r


def _emit(args, payload: dict, text: str) -> None:
    out = json.dumps(_clean(payload), indent=2) + "\n" if args.format == "json" else text
    if args.out:
        args.out.write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else str(obj)
    return obj


def cmd_variance(args) -> int:
    r = _reduced(args)
    qc = QuadratureConfig(rtol=args.tol)
    lines = []
    payload = {"params": r.to_dict()}
    if args.optimize:
        opt = optimize_gain(r, OptimizerConfig(quadrature=qc))
        r = r.replace(G=opt.G_opt)
        payload["optimum"] = dataclasses.asdict(opt) | {"ratio": opt.ratio}
        lines.append(f"G_opt        {opt.G_opt:.6g}  (G_opt0 {opt.G_opt0:.6g}, ratio {opt.ratio:.4f})")
    rep = integrate_spectrum(SpectrumModel(r), qc)
    payload["report"] = dataclasses.asdict(rep)
    lines.append(f"variance     {rep.variance_zp:.6g} x_zp^2  (+/- {rep.error_zp:.2g})")
    lines.append(f"variance     {rep.variance_m2:.6g} m^2" if r.x_zp_m else
                 "variance     (no zero-point scale recorded; SI value uses M = 1 kg)")
    for name, value in rep.by_source.items():
        lines.append(f"  {name:<18}{value:.6g}")
    lines.append(f"regime       {rep.regime}")
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_optimize(args) -> int:
    r = _reduced(args)
    opt = optimize_gain(r, OptimizerConfig(quadrature=QuadratureConfig(rtol=args.tol)))
    payload = dataclasses.asdict(opt) | {"ratio": opt.ratio, "improvement_db": feedback_gain_db(opt)}
    try:
        payload["feedback_only_variance"] = feedback_only_optimum(r).variance
    except ParameterError:
        pass
    text = (f"G_opt        {opt.G_opt:.8g}\nG_opt0       {opt.G_opt0:.8g}\n"
            f"ratio        {opt.ratio:.6f}\nvariance     {opt.variance:.6g} x_zp^2\n"
            f"no feedback  {opt.variance_no_feedback:.6g} x_zp^2\n"
            f"improvement  {feedback_gain_db(opt):.4f} dB\nstatus       {opt.status}\n")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        grid = load_grid(args.grid)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {args.grid}: {exc}") from exc
    if args.tol != grid.rtol:
        grid = dataclasses.replace(grid, rtol=args.tol)
    if args.heatmap and args.column not in COLUMNS:
        raise InputError(f"unknown column {args.column!r}")
    fmt = args.format or "csv"
    if fmt == "text":
        raise InputError("sweep output format must be csv or json")
    result = run_sweep(grid, threads=args.threads, seed=args.seed)
    if args.out:
        result.write(args.out, fmt)
    else:
        sys.stdout.write(result.to_csv() if fmt == "csv" else result.to_json())
    if args.heatmap:
        write_heatmap(result, args.column, args.heatmap)
    return EXIT_OK


def cmd_classify(args) -> int:
    r = _reduced(args)
    report = classify(r, allow_unstable=True)
    crit = ground_state_criteria(r)
    payload = {**dataclasses.asdict(report), **crit.as_dict(), "label": str(report.label)}
    text = f"{report.label}\n"
    if args.format != "json":
        flags = crit.as_dict()
        text += "".join(f"  {k:<28}{v}\n" for k, v in flags.items())
    _emit(args, payload, text)
    return EXIT_OK


def cmd_diagnose(args) -> int:
    if args.params is None:
        raise InputError("--params is required")
    if args.reduced:
        raise InputError("diagnose needs physical parameters")
    try:
        p = load_params(args.params)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {args.params}: {exc}") from exc
    assert isinstance(p, PhysicalParams)
    rep = diagnostics(p)
    r = reduce(p)
    payload = dataclasses.asdict(rep) | {"c_m": r.c_m, "c_a": r.c_a, "g_over_omega": r.g / r.Omega,
                                         "n_bath": r.n_bath, "stable": r.stable}
    text = "".join(f"{k:<28}{v}\n" for k, v in payload.items())
    _emit(args, payload, text)
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import run_all

    results = run_all(seed=args.seed, rtol=args.tol, oracle_count=args.oracle_cases)
    text = "".join(r.line() + "\n" for r in results)
    payload = {"seed": args.seed, "suites": [dataclasses.asdict(r) for r in results]}
    _emit(args, payload, text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


COMMANDS = {
    "variance": cmd_variance,
    "optimize-gain": cmd_optimize,
    "sweep": cmd_sweep,
    "classify": cmd_classify,
    "diagnose": cmd_diagnose,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        QuadratureConfig(rtol=args.tol)
        return COMMANDS[args.command](args)
    except (InputError, ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (QuadratureError, OptimizationError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
