"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from typing import Optional, Sequence

import numpy as np

from .amplitudes import ZoneWarning, closed_form_amplitudes, find_resonances
from .errors import DiracBarrierError
from .kinematics import EPS_ZONE, EnergyZone, barrier_channel, classify_zone, make_kinematics
from .phases import IncomingState, isospin_ratio
from .records import FORMATS, RECORD_FIELDS, atomic_write_text, render, run_record
from .verify import ZONES, run_verification

SWEEP_VARIABLES = ("E", "angle", "V0", "L", "phase")
EXIT_OK, EXIT_VERIFY_FAILED, EXIT_INVALID = 0, 1, 2


class InvalidInput(DiracBarrierError):
    pass


def _angle(args: argparse.Namespace, value: float) -> float:
    return math.radians(value) if args.deg else value


def _kinematics(args: argparse.Namespace, **override: float):
    params = dict(E=args.E, angle=_angle(args, args.angle), m=args.m, V0=args.V0, L=args.L)
    params.update(override)
    return make_kinematics(params["E"], params["angle"], params["m"], params["V0"], params["L"])


def _state(args: argparse.Namespace, **override: float) -> IncomingState:
    params = dict(alpha=_angle(args, args.alpha), beta=_angle(args, args.beta))
    params.update(override)
    return IncomingState(args.Iplus_mag, args.Iminus_mag, params["alpha"], params["beta"])


def _format(args: argparse.Namespace) -> str:
    if args.format:
        return args.format
    if args.out and str(args.out).endswith(".jsonl"):
        return "jsonl"
    return "csv"


def _emit(args: argparse.Namespace, records, fields=None) -> None:
    text = render(records, _format(args), fields)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_amplitudes(args: argparse.Namespace) -> int:
    k = _kinematics(args)
    state = _state(args)
    record = run_record(k, state, args.eps_zone)
    amp = closed_form_amplitudes(k, barrier_channel(k, args.eps_zone))
    rows = [
        ("zone", record["zone"]),
        ("E, m", f"{k.E:.10g}, {k.m:.10g}"),
        ("p1, p2", f"{k.p1:.10g}, {k.p2:.10g}"),
        ("V0, L", f"{k.V0:.10g}, {k.L:.10g}"),
        ("q1", f"{complex(record['q1_re'], record['q1_im']):.10g}"),
        ("R", f"{amp.R:.10g}  |R|^2={abs(amp.R) ** 2:.10g}"),
        ("R_tilde", f"{amp.R_tilde:.10g}  |R~|^2={abs(amp.R_tilde) ** 2:.10g}"),
        ("T", f"{amp.T:.10g}  |T|^2={abs(amp.T) ** 2:.10g}"),
        ("|R+|^2 |R-|^2", f"{record['r_plus']:.10g}  {record['r_minus']:.10g}"),
        ("|T+|^2 |T-|^2", f"{record['t_plus']:.10g}  {record['t_minus']:.10g}"),
        ("unitarity residual", f"{record['unitarity_residual']:.3e}"),
    ]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value}")
    if amp.warning:
        print(f"warning: {amp.warning}", file=sys.stderr)
    if args.out:
        atomic_write_text(args.out, render([record], _format(args), RECORD_FIELDS))
    return EXIT_OK


def _sweep_records(args: argparse.Namespace, variable: str, start: float, stop: float, steps: int) -> list[dict]:
    if variable not in SWEEP_VARIABLES:
        raise InvalidInput(f"unknown sweep variable {variable!r}")
    if not start < stop:
        raise InvalidInput(f"sweep needs start < stop, got {start} >= {stop}")
    if steps < 2:
        raise InvalidInput(f"sweep needs at least 2 steps, got {steps}")
    if variable in ("angle", "phase"):
        start, stop = _angle(args, start), _angle(args, stop)
    records = []
    for x in np.linspace(start, stop, steps):
        x = float(x)
        if variable == "phase":
            beta = _angle(args, args.beta)
            k, state = _kinematics(args), _state(args, alpha=beta + x)
        else:
            k, state = _kinematics(args, **{variable: x}), _state(args)
        records.append(run_record(k, state, args.eps_zone))
    return records


def _report_flags(records: Sequence[dict]) -> None:
    flagged = sum(1 for r in records if r["flagged"])
    if flagged:
        print(f"warning: {flagged} row(s) flagged by self-validation", file=sys.stderr)


def cmd_sweep(args: argparse.Namespace) -> int:
    records = _sweep_records(args, args.variable, args.start, args.stop, args.steps)
    _emit(args, records, RECORD_FIELDS)
    _report_flags(records)
    return EXIT_OK


def cmd_phase_scan(args: argparse.Namespace) -> int:
    records = _sweep_records(args, "phase", args.start, args.stop, args.steps)
    _emit(args, records, RECORD_FIELDS)
    _report_flags(records)
    return EXIT_OK


def cmd_zones(args: argparse.Namespace) -> int:
    e_lo, e_hi = args.E_range
    a_lo, a_hi = (_angle(args, a) for a in args.angle_range)
    n_e, n_a = args.grid
    if not (args.m > 0 and e_lo > args.m and e_lo <= e_hi):
        raise InvalidInput(f"energy range must satisfy m < start <= stop, got {args.E_range} with m={args.m}")
    if not (-math.pi / 2 < a_lo <= a_hi < math.pi / 2):
        raise InvalidInput("angle range must lie inside (-pi/2, pi/2)")
    if n_e < 1 or n_a < 1:
        raise InvalidInput("grid sizes must be positive")
    records = []
    counts = {z.value: 0 for z in EnergyZone}
    for E in np.linspace(e_lo, e_hi, n_e):
        p = math.sqrt((E - args.m) * (E + args.m))
        for angle in np.linspace(a_lo, a_hi, n_a):
            p2 = p * math.sin(angle)
            zone = classify_zone(float(E), args.V0, p2, args.m, args.eps_zone)
            counts[zone.value] += 1
            records.append(
                {
                    "E": float(E),
                    "angle": float(angle),
                    "p2": p2,
                    "V0": args.V0,
                    "m": args.m,
                    "q1_squared": (E - args.V0) ** 2 - p2 * p2 - args.m**2,
                    "zone": zone.value,
                }
            )
    _emit(args, records)
    summary = " ".join(f"{name}={count}" for name, count in counts.items())
    print(f"zones: {summary}", file=sys.stderr)
    return EXIT_OK


def cmd_resonances(args: argparse.Namespace) -> int:
    k = _kinematics(args)
    bounds = None
    if args.start is not None or args.stop is not None:
        if args.start is None or args.stop is None:
            raise InvalidInput("give both --start and --stop, or neither")
        bounds = (args.start, args.stop)
        if args.variable == "angle":
            bounds = tuple(_angle(args, b) for b in bounds)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ZoneWarning)
        found = find_resonances(k, args.variable, bounds, args.n_max, args.grid)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    records = [
        {
            "n": r.n,
            "variable": r.variable,
            "value": r.value,
            "q1": r.q1,
            "abs_T": r.abs_T,
            "abs_R": r.abs_R,
            "abs_R_tilde": r.abs_R_tilde,
        }
        for r in found
    ]
    fields = ["n", "variable", "value", "q1", "abs_T", "abs_R", "abs_R_tilde"]
    if args.out:
        _emit(args, records, fields)
    print(f"{'n':>3}  {args.variable + ' at root':>22}  {'|T|':>20}  {'|R|':>10}  {'|R~|':>10}")
    for r in found:
        print(f"{r.n:>3}  {r.value:>22.15g}  {r.abs_T:>20.17g}  {r.abs_R:>10.2e}  {r.abs_R_tilde:>10.2e}")
    return EXIT_OK


def cmd_demo_isospin(args: argparse.Namespace) -> int:
    theta, alpha = _angle(args, args.theta), _angle(args, args.alpha)
    ratio = isospin_ratio(theta, alpha)
    print(f"theta={theta:.17g} alpha={alpha:.17g} ratio={ratio:.17g}")
    if args.out:
        _emit(args, [{"theta": theta, "alpha": alpha, "ratio": ratio}])
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.samples < 1:
        raise InvalidInput(f"--samples must be positive, got {args.samples}")
    zones = [EnergyZone(z) for z in args.zones]
    report = run_verification(samples=args.samples, seed=args.seed, zones=zones, tolerance=args.tolerance)
    text = "\n".join(report.lines()) + "\n"
    sys.stdout.write(text)
    if args.out:
        atomic_write_text(args.out, text)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _zone_list(text: str) -> list[str]:
    names = [part.strip().lower() for part in text.split(",") if part.strip()]
    valid = {z.value for z in ZONES}
    bad = [n for n in names if n not in valid]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"zones must be a comma list drawn from {sorted(valid)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("kinematics (natural units, hbar = c = 1)")
    g.add_argument("--E", type=float, default=2.0, help="total energy")
    g.add_argument("--angle", type=float, default=0.0, help="angle of incidence from the normal")
    g.add_argument("--m", type=float, default=1.0, help="rest mass")
    g.add_argument("--V0", type=float, default=0.0, help="barrier height")
    g.add_argument("--L", type=float, default=1.0, help="barrier width")
    g = common.add_argument_group("incoming helicity state")
    g.add_argument("--Iplus-mag", dest="Iplus_mag", type=float, default=1.0)
    g.add_argument("--Iminus-mag", dest="Iminus_mag", type=float, default=0.0)
    g.add_argument("--alpha", type=float, default=0.0, help="phase of I+")
    g.add_argument("--beta", type=float, default=0.0, help="phase of I-")
    g = common.add_argument_group("output")
    g.add_argument("--out", help="write records here (atomic); stdout when omitted")
    g.add_argument("--format", choices=FORMATS, help="csv (default) or jsonl; inferred from --out suffix")
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--deg", action="store_true", help="read every angle and phase in degrees")
    g.add_argument("--eps-zone", dest="eps_zone", type=float, default=EPS_ZONE)

    parser = argparse.ArgumentParser(
        prog="dirac-barrier",
        description="Helicity amplitudes for planar Dirac scattering off an electrostatic barrier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("amplitudes", parents=[common], help="evaluate one kinematic point")
    p.set_defaults(func=cmd_amplitudes)

    p = sub.add_parser("sweep", parents=[common], help="scan one parameter on a uniform grid")
    p.add_argument("--variable", choices=SWEEP_VARIABLES, required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, default=101)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("phase-scan", parents=[common], help="sweep the relative phase alpha - beta")
    p.add_argument("--start", type=float, default=-math.pi)
    p.add_argument("--stop", type=float, default=math.pi)
    p.add_argument("--steps", type=int, default=65)
    p.set_defaults(func=cmd_phase_scan)

    p = sub.add_parser("zones", parents=[common], help="energy-zone map over (E, angle)")
    p.add_argument("--E-range", dest="E_range", nargs=2, type=float, default=(1.01, 10.0), metavar=("START", "STOP"))
    p.add_argument("--angle-range", dest="angle_range", nargs=2, type=float, default=(-1.4, 1.4), metavar=("START", "STOP"))
    p.add_argument("--grid", nargs=2, type=int, default=(100, 57), metavar=("N_E", "N_ANGLE"))
    p.set_defaults(func=cmd_zones)

    p = sub.add_parser("resonances", parents=[common], help="find total-transmission points q1 L = n pi")
    p.add_argument("--variable", choices=("L", "E", "angle"), default="L")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--n-max", dest="n_max", type=int, default=5)
    p.add_argument("--grid", type=int, default=2048)
    p.set_defaults(func=cmd_resonances)

    p = sub.add_parser("demo-isospin", parents=[common], help="pp -> pi+ d over np -> pi0 d cross-section ratio")
    p.add_argument("--theta", type=float, default=0.0, help="np/pn mixing angle")
    p.set_defaults(func=cmd_demo_isospin)

    p = sub.add_parser("verify", parents=[common], help="run the oracle and invariant suites")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--tolerance", type=float, help="override every check tolerance")
    p.add_argument("--zones", type=_zone_list, default=[z.value for z in ZONES], help="comma list of zones to sample")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DiracBarrierError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
