"""Command-line interface: ``omnoise <command> [options]``.

Exit status is 0 on success, 2 for usage or configuration errors and 3 for
numerical failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import eplocator, linmodel, nonreciprocity, spectra, sweep
from .errors import InvalidParameterError, NumericalError
from .model import TWO_PI, RunOptions, load_config, paper_defaults
from .parallel import ordered_map

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3


def _parse_range(text: str):
    """``NAME:START:STOP:N`` axis spec."""
    parts = text.split(":")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("axis must look like NAME:START:STOP:N")
    name, start, stop, n = parts
    try:
        values = np.linspace(float(start), float(stop), int(n))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if int(n) < 1:
        raise argparse.ArgumentTypeError("axis needs at least one point")
    return name, values


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON parameter file (defaults to the built-in set)")
    parser.add_argument("--jobs", type=int, help="worker processes (default: $OMNOISE_JOBS or CPU count)")
    parser.add_argument("--out", type=Path, help="output path (default: stdout)")
    parser.add_argument("--phi", type=float, help="override the loop phase [rad]")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--mu-over-gamma-sum", type=float, help="override |mu| in units of gamma1 + gamma2")
    group.add_argument("--mu-over-ep1", type=float, help="override |mu| in units of the first EP magnitude")
    group.add_argument("--mu-over-ep2", type=float, help="override |mu| in units of the second EP magnitude")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omnoise", description="Noise spectra, exceptional points and non-reciprocal noise flow.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady-state", help="mean fields and effective detuning")
    _common(p)

    p = sub.add_parser("model", help="drift matrix stability and eigenvalues")
    _common(p)
    p.add_argument("--dump", action="store_true", help="include M, D and C")

    p = sub.add_parser("spectrum", help="tabulate one spectral quantity")
    _common(p)
    p.add_argument("--quantity", default="internal",
                   choices=["internal", "output", "contribution", "contribution_output", "homodyne"])
    p.add_argument("--row", default="Y_a", help="target quadrature (default Y_a)")
    p.add_argument("--col", help="source or column quadrature (default: same as --row)")
    p.add_argument("--theta", type=float, default=0.0, help="homodyne angle [rad]")
    p.add_argument("--omega-min", type=float, help="lowest frequency in units of omega_m")
    p.add_argument("--omega-max", type=float, help="highest frequency in units of omega_m")
    p.add_argument("--points", type=int, default=2001)

    p = sub.add_parser("eps", help="locate exceptional points")
    _common(p)
    p.add_argument("--mu-min", type=float, default=eplocator.DEFAULT_MU_RANGE[0],
                   help="in units of gamma1 + gamma2")
    p.add_argument("--mu-max", type=float, default=eplocator.DEFAULT_MU_RANGE[1])
    p.add_argument("--mu-points", type=int, default=eplocator.DEFAULT_GRID[0])
    p.add_argument("--phi-points", type=int, default=eplocator.DEFAULT_GRID[1])

    p = sub.add_parser("nonreciprocity", help="directional flows and I_delta over the loop phase")
    _common(p)
    p.add_argument("--phi-points", type=int, default=73)
    p.add_argument("--tol", type=float, help="quadrature tolerance (default from config, 1e-8)")
    p.add_argument("--pair", default="Y_b1,Y_b2", help="quadrature pair of b1 and b2")

    p = sub.add_parser("sweep", help="two-axis sweep of a scalar quantity")
    _common(p)
    p.add_argument("--quantity", required=True, choices=list(sweep.SPECTRAL_KINDS + sweep.FLOW_KINDS))
    p.add_argument("--row", default="Y_b2")
    p.add_argument("--col")
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--omega", type=float, default=1.0, help="frequency in units of omega_m")
    p.add_argument("--axis1", type=_parse_range, required=True, help="NAME:START:STOP:N")
    p.add_argument("--axis2", type=_parse_range, required=True, help="NAME:START:STOP:N")

    p = sub.add_parser("preset", help="regenerate the data behind a figure")
    _common(p)
    p.add_argument("name", help="one of: " + ", ".join(sweep.PRESETS))
    p.add_argument("--phi-points", type=int, default=361)
    p.add_argument("--mu-points", type=int, default=121)
    p.add_argument("--omega-points", type=int, default=2001)
    return parser


def _load(args):
    if args.config is not None:
        p, options = load_config(args.config)
    else:
        p, options = paper_defaults(), RunOptions()
    jobs = args.jobs if args.jobs is not None else options.jobs
    if args.phi is not None:
        p = p.replace(phi_loop=args.phi)
    if args.mu_over_gamma_sum is not None:
        p = p.replace(mu_abs=args.mu_over_gamma_sum * p.gamma_sum)
    elif args.mu_over_ep1 is not None or args.mu_over_ep2 is not None:
        ep1, ep2 = eplocator.resolve_ep_magnitudes(p, jobs=jobs)
        p = p.replace(mu_abs=args.mu_over_ep1 * ep1 if args.mu_over_ep1 is not None
                      else args.mu_over_ep2 * ep2)
    # the worker count never reaches emitted metadata
    return p, dataclasses.replace(options, jobs=None), jobs


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8", newline="\n")


def _cmd_steady_state(args) -> None:
    p, options, _ = _load(args)
    mf = spectra.solve_mean_fields(p, tol=options.ss_tol, max_iter=options.ss_max_iter)
    _emit(sweep.format_json({"params_hash": p.fingerprint(), "mean_fields": mf.as_dict()}), args.out)


def _cmd_model(args) -> None:
    p, options, _ = _load(args)
    mf = spectra.solve_mean_fields(p, tol=options.ss_tol, max_iter=options.ss_max_iter)
    lm = linmodel.build_linear_model(p, mf)
    es = spectra.eigensystem(lm)
    stable, abscissa = linmodel.stability_check(lm)
    payload = {"params_hash": p.fingerprint(), "stable": stable, "abscissa": abscissa,
               "eigenvalues": [[z.real, z.imag] for z in es.lambdas], "cond_u": es.cond}
    if args.dump:
        payload["model"] = lm.as_dict()
    _emit(sweep.format_json(payload), args.out)


def _cmd_spectrum(args) -> None:
    p, options, _ = _load(args)
    system = spectra.prepare(p, tol=options.ss_tol, max_iter=options.ss_max_iter)
    grid = spectra.default_grid(p, args.points)
    lo = args.omega_min * p.omega_m if args.omega_min is not None else grid[0]
    hi = args.omega_max * p.omega_m if args.omega_max is not None else grid[-1]
    if not hi > lo or args.points < 1:
        raise InvalidParameterError("need omega-max > omega-min and at least one point")
    w = np.linspace(lo, hi, args.points)
    row = args.row
    col = args.col
    if args.quantity.startswith("contribution") and col is None:
        raise InvalidParameterError("--col (the source quadrature) is required for contributions")
    vals = spectra.evaluate(system, args.quantity, w, row=row, col=col, theta=args.theta)
    _emit(sweep.format_csv(["omega_over_omega_m", "value_re", "value_im"],
                           [w / p.omega_m, vals.real, vals.imag]), args.out)


def _cmd_eps(args) -> None:
    p, _, jobs = _load(args)
    reports = eplocator.scan_eps(p, (args.mu_min, args.mu_max), grid=(args.mu_points, args.phi_points),
                                 jobs=jobs)
    _emit(sweep.format_json([r.as_dict() for r in reports]), args.out)


def _cmd_nonreciprocity(args) -> None:
    p, options, jobs = _load(args)
    tol = args.tol if args.tol is not None else options.quad_tol
    pair = tuple(s.strip() for s in args.pair.split(","))
    if len(pair) != 2:
        raise InvalidParameterError("--pair must name two quadratures")
    if args.phi_points < 1:
        raise InvalidParameterError("--phi-points must be >= 1")
    phis = np.linspace(0.0, TWO_PI, args.phi_points, endpoint=False)
    tasks = [(p.replace(phi_loop=float(phi)), tol, pair) for phi in phis]
    flows = ordered_map(_flow_task, tasks, jobs)
    cols = [phis] + [[getattr(f, k) for f in flows] for k in ("flow_21", "flow_12", "i_delta", "quad_error")]
    _emit(sweep.format_csv(["phi_rad", "flow_21", "flow_12", "i_delta", "quad_error"], cols), args.out)


def _flow_task(task):
    p, tol, pair = task
    return nonreciprocity.nonreciprocity_measure(p, tol=tol, pair=pair)


def _cmd_sweep(args) -> None:
    p, options, jobs = _load(args)
    spec = sweep.QuantitySpec(args.quantity, row=args.row, col=args.col, theta=args.theta,
                              omega_over_omega_m=args.omega, tol=options.quad_tol)
    axes = [sweep.Axis(name, values) for name, values in (args.axis1, args.axis2)]
    grid = sweep.sweep(spec, axes[0], axes[1], p, options, jobs)
    if args.out is None:
        raise InvalidParameterError("sweep needs --out (CSV path; a JSON sidecar is written next to it)")
    for path in sweep.write_grid(grid, args.out):
        print(path)
    if grid.diagnostics:
        print(f"{len(grid.diagnostics)} masked cell(s); see the JSON sidecar", file=sys.stderr)


def _cmd_preset(args) -> None:
    if args.name not in sweep.PRESETS:
        raise InvalidParameterError(f"unknown preset {args.name!r}; valid presets: {', '.join(sweep.PRESETS)}")
    p, options, jobs = _load(args)
    density = sweep.PresetDensity(args.phi_points, args.mu_points, args.omega_points)
    for path in sweep.run_preset(args.name, args.out or Path("."), p, options, jobs, density):
        print(path)


_COMMANDS = {
    "steady-state": _cmd_steady_state, "model": _cmd_model, "spectrum": _cmd_spectrum,
    "eps": _cmd_eps, "nonreciprocity": _cmd_nonreciprocity, "sweep": _cmd_sweep,
    "preset": _cmd_preset,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        _COMMANDS[args.command](args)
    except (InvalidParameterError, ValueError) as exc:
        print(f"omnoise: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ArithmeticError) as exc:
        print(f"omnoise: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"omnoise: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
