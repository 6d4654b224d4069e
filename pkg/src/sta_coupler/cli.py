"""Command-line interface.

Subcommands: profile, simulate, splitter, sweep, threshold, check.
A JSON config file (``--config``) may supply any option; explicit flags
override file values.  Exit codes: 0 success, 2 argument/config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from .coupler import simulate
from .propagation import StiffnessError
from .schedules import DiscontinuityError, ModelParams, diagnostics, effective_schedule
from .serialize import format_float, sweep_payload, write_csv, write_json, write_sweep_csv
from .splitter import MODES, SplitterParams, simulate_splitter
from .sweep import (
    AxisSpec,
    SweepSpec,
    TargetNotReached,
    run_sweep,
    threshold_length,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


def _axis(text: str) -> AxisSpec:
    parts = text.split(":")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"expected name:lo:hi:count, got {text!r}"
        )
    name, lo, hi, count = parts
    try:
        return AxisSpec(name, float(lo), float(hi), int(count))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_model_args(sp: argparse.ArgumentParser, *, with_sta: bool = True) -> None:
    sp.add_argument("--omega0", type=float, help="maximum coupling, 1/mm")
    sp.add_argument("--delta0", type=float, help="phase mismatch magnitude, 1/mm")
    sp.add_argument("--total-length", type=float, dest="total_length",
                    help="device length 2L, mm")
    if with_sta:
        sp.add_argument("--sta", action=argparse.BooleanOptionalAction,
                        help="use the counterdiabatic effective schedules")


def _add_io_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--output", help="output path ('-' for stdout)")
    sp.add_argument("--format", choices=("csv", "json"), dest="fmt")
    sp.add_argument("--config", help="JSON config file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sta-coupler",
        description="STA waveguide coupler design and simulation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="emit the coupling/mismatch schedules")
    _add_model_args(p)
    p.add_argument("--samples", type=int, help="number of z samples")
    _add_io_args(p)

    p = sub.add_parser("simulate", help="two-guide intensity trajectory")
    _add_model_args(p)
    p.add_argument("--input-guide", type=int, dest="input_guide", choices=(1, 2))
    p.add_argument("--tol", type=float)
    _add_io_args(p)

    p = sub.add_parser("splitter", help="three-guide beam-splitter trajectory")
    _add_model_args(p)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--tol", type=float)
    _add_io_args(p)

    p = sub.add_parser("sweep", help="2-D parameter sweep of a transfer metric")
    _add_model_args(p)
    p.add_argument("--axis-x", type=_axis, dest="axis_x", help="name:lo:hi:count")
    p.add_argument("--axis-y", type=_axis, dest="axis_y", help="name:lo:hi:count")
    p.add_argument("--metric", choices=("final_i2", "splitting_infidelity"))
    p.add_argument("--mode", choices=MODES, help="splitter mode for splitting_infidelity")
    p.add_argument("--tol", type=float)
    p.add_argument("--workers", type=int)
    _add_io_args(p)

    p = sub.add_parser("threshold", help="minimal device length for a target efficiency")
    _add_model_args(p)
    p.add_argument("--target", type=float)
    p.add_argument("--length-min", type=float, dest="length_min")
    p.add_argument("--length-max", type=float, dest="length_max")
    p.add_argument("--tol", type=float)
    _add_io_args(p)

    p = sub.add_parser("check", help="adiabaticity and coupling-bound diagnostics")
    _add_model_args(p)
    p.add_argument("--samples", type=int)
    _add_io_args(p)

    return parser


_DEFAULTS = {
    "samples": 1000,
    "tol": None,  # per-command default applied below
    "fmt": "csv",
    "output": "-",
    "input_guide": 1,
    "mode": "reduced_cd",
    "metric": "final_i2",
    "workers": 1,
    "sta": False,
    "target": 0.99,
    "length_min": 0.0,
    "length_max": 2.0,
}


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from the config file, then from hard defaults."""
    config: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot parse config {args.config}: {exc}") from exc
        if not isinstance(doc, dict) or len(doc) != 1:
            raise ConfigError("config must contain exactly one top-level command object")
        (command, config), = doc.items()
        if command != args.command:
            raise ConfigError(
                f"config is for command {command!r}, invoked {args.command!r}"
            )
        if not isinstance(config, dict):
            raise ConfigError("command object must be a JSON object")
        known = set(vars(args)) - {"command", "config"}
        unknown = set(config) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    for key, value in vars(args).items():
        if value is None and key in config:
            raw = config[key]
            if key in ("axis_x", "axis_y"):
                raw = _axis(raw) if isinstance(raw, str) else AxisSpec(**raw)
            setattr(args, key, raw)
    for key, value in vars(args).items():
        if value is None and key in _DEFAULTS:
            setattr(args, key, _DEFAULTS[key])
    if getattr(args, "tol", None) is None:
        args.tol = 1e-8 if args.command == "sweep" else 1e-10
    return args


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise ConfigError(f"missing required option(s): "
                          + ", ".join("--" + n.replace("_", "-") for n in missing))


def _model(args: argparse.Namespace) -> ModelParams:
    _require(args, "omega0", "delta0", "total_length")
    return ModelParams(omega0=args.omega0, delta0=args.delta0,
                       half_length=args.total_length / 2.0, sta=bool(args.sta))


def _emit_rows(args, header, rows, inputs) -> None:
    if args.fmt == "csv":
        if args.output == "-":
            import csv as _csv
            writer = _csv.writer(sys.stdout)
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_float(v) for v in row])
        else:
            write_csv(args.output, header, rows)
    else:
        payload = {"columns": list(header),
                   "rows": [[float(v) for v in row] for row in rows]}
        if args.output == "-":
            payload["provenance"] = {"inputs": inputs}
            json.dump(payload, sys.stdout, indent=2)
            sys.stdout.write("\n")
        else:
            write_json(args.output, payload, inputs)


def _inputs(args: argparse.Namespace) -> dict:
    skip = {"config", "output", "fmt"}
    out = {}
    for k, v in vars(args).items():
        if k in skip:
            continue
        if isinstance(v, AxisSpec):
            v = vars(v) | {}
        out[k] = v
    return out


def _cmd_profile(args) -> int:
    p = _model(args)
    if args.samples < 2:
        raise ConfigError("--samples must be >= 2")
    zs = np.linspace(-p.half_length, p.half_length, args.samples)
    rows = []
    for z in zs:
        sp = effective_schedule(p, float(z), side=-1 if z == 0.0 else 0)
        rows.append((sp.z, sp.omega, sp.delta, sp.omega_a, sp.omega_eff, sp.delta_eff))
    _emit_rows(args, ("z", "omega", "delta", "omega_a", "omega_eff", "delta_eff"),
               rows, _inputs(args))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    p = _model(args)
    result = simulate(p, input_guide=args.input_guide, tol=args.tol)
    traj = result.trajectory
    rows = [(z, i[0], i[1]) for z, i in zip(traj.z, traj.intensities)]
    _emit_rows(args, ("z", "I1", "I2"), rows, _inputs(args))
    return EXIT_OK


def _cmd_splitter(args) -> int:
    p = _model(args)
    result = simulate_splitter(SplitterParams(p, args.mode), tol=args.tol)
    traj = result.trajectory
    rows = [(z, i[0], i[1], i[2]) for z, i in zip(traj.z, traj.intensities)]
    _emit_rows(args, ("z", "I1", "I2", "I3"), rows, _inputs(args))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    _require(args, "axis_x", "axis_y")
    axis_names = {args.axis_x.name, args.axis_y.name}
    fixed = {}
    for name in ("omega0", "delta0", "total_length"):
        if name not in axis_names:
            value = getattr(args, name)
            if value is None:
                raise ConfigError(f"--{name.replace('_', '-')} must fix the unswept parameter")
            fixed[name] = value
    spec = SweepSpec(axis_x=args.axis_x, axis_y=args.axis_y, fixed=fixed,
                     metric=args.metric, sta=bool(args.sta), tol=args.tol,
                     splitter_mode=args.mode)
    result = run_sweep(spec, workers=args.workers)
    if args.fmt == "csv":
        if args.output == "-":
            raise ConfigError("sweep CSV output requires --output PATH")
        write_sweep_csv(args.output, result)
    else:
        payload = sweep_payload(result)
        payload["provenance_sweep"] = result.provenance
        if args.output == "-":
            payload["provenance"] = {"inputs": _inputs(args)}
            json.dump(payload, sys.stdout, indent=2)
            sys.stdout.write("\n")
        else:
            write_json(args.output, payload, _inputs(args))
    return EXIT_OK


def _cmd_threshold(args) -> int:
    _require(args, "omega0", "delta0")
    result = threshold_length(args.omega0, args.delta0, bool(args.sta),
                              args.target, (args.length_min, args.length_max),
                              tol=args.tol)
    print(f"{result.total_length:.4g} mm (metric {result.achieved_metric:.6f})")
    return EXIT_OK


def _cmd_check(args) -> int:
    p = _model(args)
    if args.samples < 2:
        raise ConfigError("--samples must be >= 2")
    d = diagnostics(p, args.samples)
    payload = {
        "max_adiabaticity_ratio": d.max_adiabaticity_ratio,
        "max_cd_ratio": d.max_cd_ratio,
        "bound_satisfied": d.bound_satisfied,
    }
    if args.output == "-":
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        write_json(args.output, payload, _inputs(args))
    return EXIT_OK


_COMMANDS = {
    "profile": _cmd_profile,
    "simulate": _cmd_simulate,
    "splitter": _cmd_splitter,
    "sweep": _cmd_sweep,
    "threshold": _cmd_threshold,
    "check": _cmd_check,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(args)
        return _COMMANDS[args.command](args)
    except (ConfigError, DiscontinuityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StiffnessError, TargetNotReached, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
