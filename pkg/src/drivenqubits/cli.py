"""Command-line front end: ``drivenqubits {steady,sweep,figure,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .algebra import BasisTag
from .checks import timed_run
from .correlations import full_report
from .errors import (
    ConfigurationError,
    DrivenQubitsError,
    MissingInitialPopulationError,
    NonPhysicalError,
    NotPSDError,
    SolverFailure,
    StepSizeError,
)
from .master import ModelParams, steady_state
from .oracles import steady_equal_g, steady_g2zero
from .sweeps import FIGURES, SweepConfig, parse_range_flag, run_figure, run_sweep, write_atomically

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
_NUMERIC_ERRORS = (SolverFailure, StepSizeError, NotPSDError, NonPhysicalError, np.linalg.LinAlgError)


def _fmt_matrix(m: np.ndarray) -> str:
    rows = []
    for row in m:
        rows.append("  ".join(f"{z.real:+.12f}{z.imag:+.12f}j" for z in row))
    return "\n".join(rows)


def _analytic(p: ModelParams, p00):
    if p.g2bar == 0.0:
        return "one driven atom", steady_g2zero(p)
    if p.g1bar == p.g2bar:
        return "equal drives", steady_equal_g(p, p00)
    return None, None


def cmd_steady(args) -> int:
    try:
        p = ModelParams(args.g1, args.g2, args.x, args.dperp)
    except ValueError as exc:
        return _usage(str(exc))
    try:
        sol = steady_state(p, args.p00)
    except MissingInitialPopulationError:
        return _usage("--p00 is required when x = 0 and g1 = g2 (the singlet population is conserved)")
    except ValueError as exc:
        return _usage(str(exc))
    basis = BasisTag.PRODUCT if args.basis == "product" else BasisTag.TRIPLET_SINGLET
    out = [
        f"parameters: g1={p.g1bar!r} g2={p.g2bar!r} x={p.x!r} dperp_ratio={p.dperp_ratio!r} F12={p.f12!r}",
        f"zero multiplicity: {sol.zero_multiplicity}  residual: {sol.residual:.3e}  spectral gap: {sol.spectral_gap:.6g}",
        f"steady state ({basis.value} basis, numerical):",
        _fmt_matrix(sol.rho.to(basis).matrix),
    ]
    label, closed = _analytic(p, args.p00)
    if closed is not None:
        dev = float(np.abs(closed.to(basis).matrix - sol.rho.to(basis).matrix).max())
        out += [f"closed form ({label}):", _fmt_matrix(closed.to(basis).matrix), f"max deviation: {dev:.3e}"]
    rep = full_report(sol.rho)
    out.append("correlations:")
    out += [f"  {k:<15s} {v!r}" for k, v in rep.scalars().items()]
    out.append(f"  argmin_1        a={rep.argmin_1.alpha_sq:.9f} phi={rep.argmin_1.phi:.9f}")
    out.append(f"  argmin_2        a={rep.argmin_2.alpha_sq:.9f} phi={rep.argmin_2.phi:.9f}")
    text = "\n".join(out) + "\n"
    sys.stdout.write(text)
    if args.out:
        write_atomically(args.out, text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = SweepConfig.from_json(args.config)
    if args.workers is not None:
        cfg = SweepConfig(**{**cfg.__dict__, "workers": args.workers})
    text = run_sweep(cfg, args.out)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_figure(args) -> int:
    if args.id not in FIGURES:
        return _usage(f"unknown figure id {args.id!r}; valid ids: {', '.join(FIGURES)}")
    text = run_figure(
        args.id,
        args.out,
        mode=args.mode,
        g1_values=parse_range_flag(args.g1) if args.g1 else None,
        x_values=parse_range_flag(args.x) if args.x else None,
        ratios=parse_range_flag(args.dperp) if args.dperp else None,
        workers=args.workers or 1,
        numeric_check=args.numeric_check,
    )
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.grid_size < 1:
        return _usage("--grid-size must be at least 1")
    results, elapsed = timed_run(args.grid_size, corrupt=args.corrupt_f)
    lines = [r.line() for r in results]
    ok = all(r.passed for r in results)
    lines.append(f"{'ALL PASSED' if ok else 'FAILED'} ({sum(r.passed for r in results)}/{len(results)}) in {elapsed:.1f} s")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        write_atomically(args.out, text)
    return EXIT_OK if ok else EXIT_VERIFY


def _usage(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drivenqubits", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("steady", help="steady state and correlations at one parameter point")
    s.add_argument("--g1", type=float, required=True, help="drive of atom 1 in units of the decay rate")
    s.add_argument("--g2", type=float, default=0.0, help="drive of atom 2")
    s.add_argument("--x", type=float, required=True, help="scaled separation omega_A r / c")
    s.add_argument("--dperp", type=float, default=1.0, help="d_perp^2 / |d01|^2, in [0, 1]")
    s.add_argument("--p00", type=float, default=None, help="initial singlet population (needed at x=0, g1=g2)")
    s.add_argument("--basis", choices=("product", "coupled"), default="product")
    s.add_argument("--out", default=None, help="also write the report to this file")
    s.set_defaults(func=cmd_steady)

    w = sub.add_parser("sweep", help="CSV sweep described by a JSON config")
    w.add_argument("config", help="path to the JSON sweep configuration")
    w.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    w.add_argument("--workers", type=int, default=None, help="worker processes (output order is unaffected)")
    w.set_defaults(func=cmd_sweep)

    f = sub.add_parser("figure", help="CSV for one of the figure families")
    f.add_argument("id", help="one of: " + ", ".join(FIGURES))
    f.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    f.add_argument("--mode", choices=("g2zero", "equalg"), default=None, help="override the drive configuration")
    f.add_argument("--g1", default=None, help="override G1 values: 'v', 'v1,v2,..' or 'start:stop:count[:log]'")
    f.add_argument("--x", default=None, help="override separations (same syntax as --g1)")
    f.add_argument("--dperp", default=None, help="override dperp ratios (same syntax as --g1)")
    f.add_argument("--workers", type=int, default=None)
    f.add_argument("--numeric-check", action="store_true", help="fill numeric_deviation against the solver")
    f.set_defaults(func=cmd_figure)

    v = sub.add_parser("verify", help="run the self-verification suite")
    v.add_argument("--grid-size", type=int, default=7, help="points per axis of the oracle grid")
    v.add_argument("--out", default=None, help="also write the report to this file")
    v.add_argument("--corrupt-f", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        return _usage(str(exc))
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DrivenQubitsError as exc:
        return _usage(str(exc))


if __name__ == "__main__":
    sys.exit(main())
