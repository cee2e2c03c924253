"""Command-line front end.

    fdeform visibility   --config scenario.yaml [--out v.csv]
    fdeform intensity    --config scenario.yaml [--deltas 0,1.5708,3.1416]
    fdeform fringe       --config scenario.yaml [--points 4096]
    fdeform revivals     --config scenario.yaml [--threshold 0.99]
    fdeform oracle-check --config scenario.yaml

Exit codes: 0 success, 2 config error, 3 truncation cap (series or oracle),
4 symmetry violation, 5 oracle disagreement.  CSV output uses repr()
formatting of doubles (shortest round-trip), '.' decimals and '\\n' line
endings, so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import analysis, oracle, series
from .config import ConfigError, load_config
from .errors import (CapExceeded, InvalidDeformation, NegativeDeformation, NotSymmetric,
                     OutOfRange, TailTooLarge)
from .hamiltonian import DiagonalHamiltonian, ShiftedHamiltonian

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_SYMMETRY = 4
EXIT_DISAGREE = 5

ORACLE_TOLERANCE = 1e-8


def _fmt(x) -> str:
    return repr(float(x))


def _write(rows, out):
    text = "".join(",".join(row) + "\n" for row in rows)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def cmd_visibility(cfg, args):
    H = DiagonalHamiltonian(cfg.deformation)
    curve = series.visibility(H, cfg.scenario(), cfg.policy(),
                              allow_asymmetric=args.allow_asymmetric)
    rows = [["t", "v_re", "v_im", "v_abs", "v_arg", "trunc_bound"]]
    for t, v, a, g in zip(curve.t, curve.v, curve.v_abs, curve.v_arg):
        rows.append([_fmt(t), _fmt(v.real), _fmt(v.imag), _fmt(a), _fmt(g),
                     _fmt(curve.truncation_bound)])
    return rows


def cmd_intensity(cfg, args):
    H = DiagonalHamiltonian(cfg.deformation)
    if args.deltas is not None:
        deltas = args.deltas
    elif cfg.deltas is not None:
        deltas = cfg.deltas
    else:
        deltas = (cfg.fringe_phase,)
    imap = series.intensity_map(H, cfg.scenario(), deltas, cfg.policy())
    rows = [["t", "delta", "intensity"]]
    for i, t in enumerate(imap.t):
        for j, d in enumerate(imap.delta):
            rows.append([_fmt(t), _fmt(d), _fmt(imap.intensity[i, j])])
    return rows


def cmd_fringe(cfg, args):
    H = DiagonalHamiltonian(cfg.deformation)
    scen = cfg.scenario()
    s, _ = series.phase_sum(H, scen.alpha_sq, scen.times, cfg.policy())
    rows = [["t", "v_op", "i_max", "i_min", "v_abs"]]
    for t, si in zip(scen.times, s):
        fn = (lambda d, si=si: series.fringe_intensity(scen.alpha_sq, si, d))
        scan = analysis.fringe_scan(fn, args.points, vectorized=True)
        rows.append([_fmt(t), _fmt(scan.v_op), _fmt(scan.i_max), _fmt(scan.i_min),
                     _fmt(abs(si))])
    return rows


def cmd_revivals(cfg, args):
    H = DiagonalHamiltonian(cfg.deformation)
    curve = series.visibility(H, cfg.scenario(), cfg.policy(),
                              allow_asymmetric=args.allow_asymmetric)
    report = analysis.detect_revivals(curve, args.threshold)
    rows = [["revival_time"]] + [[_fmt(t)] for t in report.revival_times]
    rows.append(["collapse_floor", "period", "time_independent_flag"])
    period = "" if report.estimated_period is None else _fmt(report.estimated_period)
    rows.append([_fmt(report.collapse_floor), period, str(int(report.time_independent))])
    return rows


def oracle_check(cfg, allow_asymmetric=False, inject_fault=False):
    """Per-time |I_series - I_oracle| and ||V_series| - V_oracle|."""
    H = DiagonalHamiltonian(cfg.deformation)
    if not cfg.deformation.declared_symmetric and not allow_asymmetric:
        raise NotSymmetric(f"{cfg.deformation.describe()} is not declared symmetric")
    # fault hook: corrupt the series path only, H -> H + na
    H_series = ShiftedHamiltonian(H, lambda na, nb: na) if inject_fault else H
    scen = cfg.scenario()
    s, _ = series.phase_sum(H_series, scen.alpha_sq, scen.times, cfg.policy())
    i_series = series.fringe_intensity(scen.alpha_sq, s, scen.fringe_phase)
    state0 = oracle.scenario_state(scen.alpha_sq, scen.phi)
    x_phase = oracle.spatial_phase(scen.fringe_phase, scen.phi)
    results = []
    for t, si, ii in zip(scen.times, s, i_series):
        st = oracle.evolve(state0, H, float(t))
        i_or = oracle.oracle_intensity(st, x_phase)
        v_or = oracle.oracle_visibility(st) if scen.alpha_sq > 0 else 0.0
        v_se = abs(si) if scen.alpha_sq > 0 else 0.0
        results.append((float(t), abs(float(ii) - i_or), abs(v_se - v_or)))
    return results


def cmd_oracle_check(cfg, args):
    results = oracle_check(cfg, args.allow_asymmetric, args.inject_fault)
    rows = [["t", "intensity_diff", "visibility_diff"]]
    rows += [[_fmt(t), _fmt(di), _fmt(dv)] for t, di, dv in results]
    max_i = max(r[1] for r in results)
    max_v = max(r[2] for r in results)
    rows.append(["max_intensity_diff", "max_visibility_diff", "tolerance"])
    rows.append([_fmt(max_i), _fmt(max_v), _fmt(ORACLE_TOLERANCE)])
    ok = max_i <= ORACLE_TOLERANCE and max_v <= ORACLE_TOLERANCE
    return rows, ok


def _parse_deltas(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad delta list {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="YAML scenario file")
    common.add_argument("--out", help="output path (default: config 'output' or stdout)")
    common.add_argument("--epsilon", type=float, help="override truncation epsilon")
    common.add_argument("--allow-asymmetric", action="store_true",
                        help="evaluate the visibility series for asymmetric f")

    parser = argparse.ArgumentParser(prog="fdeform",
                                     description="Interference of f-deformed two-mode fields")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("visibility", parents=[common], help="V(t) over the time grid")
    p = sub.add_parser("intensity", parents=[common], help="I(delta, t)")
    p.add_argument("--deltas", type=_parse_deltas, help="comma separated fringe phases")
    p = sub.add_parser("fringe", parents=[common], help="fringe-scan visibility per time")
    p.add_argument("--points", type=int, default=4096)
    p = sub.add_parser("revivals", parents=[common], help="collapse floor and revivals")
    p.add_argument("--threshold", type=float, default=0.99)
    p = sub.add_parser("oracle-check", parents=[common],
                       help="compare the series against the state-vector oracle")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


_COMMANDS = {
    "visibility": cmd_visibility,
    "intensity": cmd_intensity,
    "fringe": cmd_fringe,
    "revivals": cmd_revivals,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.epsilon is not None:
            if not 0 < args.epsilon < 1:
                raise ConfigError("--epsilon: must lie in (0, 1)")
            cfg = dataclasses.replace(cfg, epsilon=args.epsilon)
        if args.command == "fringe" and args.points < 8:
            raise ConfigError("--points: must be >= 8")
        if args.command == "revivals" and not 0 < args.threshold < 1:
            raise ConfigError("--threshold: must lie in (0, 1)")
        out = args.out if args.out is not None else cfg.output
        if args.command == "oracle-check":
            rows, ok = cmd_oracle_check(cfg, args)
            _write(rows, out)
            if not ok:
                print("oracle-check: series and oracle disagree", file=sys.stderr)
                return EXIT_DISAGREE
            return EXIT_OK
        rows = _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidDeformation, NegativeDeformation, OutOfRange) as exc:
        print(f"config error: deformation: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CapExceeded, TailTooLarge) as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except NotSymmetric as exc:
        print(f"symmetry error: {exc}", file=sys.stderr)
        return EXIT_SYMMETRY
    _write(rows, out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
