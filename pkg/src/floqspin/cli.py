"""Command-line interface.

Subcommands:

* ``point``     -- full pipeline at one parameter point, key=value output
* ``sweep``     -- 1D/2D parameter sweep written as CSV plus metadata sidecar
* ``spectrum``  -- quasienergy-only sweep (fast path, no rate stage)
* ``analytic``  -- closed-form high-frequency quantities at one point
* ``validate``  -- run the built-in verification suite, one line per check

Parameters come from an INI config file (sections [system], [bath], [sweep])
and/or command-line flags mirroring the config keys one to one
(``--system.h_z1 96.2``, ``--sweep.axis1_points 300``, ...).  Flags override
the file.  Exit code 0 on success; failures print one machine-readable
``floqspin-error code=... message="..."`` line on stderr.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys

import numpy as np

from . import __version__, analytics
from ._core import BACKEND
from .errors import ConfigError, FloqspinError
from .model import BathParams, SystemParams
from .sweep import (AxisSpec, SweepSpec, result_columns, run_point,
                    run_sweep, write_csv, write_metadata)

_SYSTEM_KEYS = ("h_x", "h_z0", "h_z1", "omega", "theta")
_BATH_KEYS = ("gamma", "omega_c", "temperature")
_SWEEP_FLOAT_KEYS = ("axis1_start", "axis1_stop", "axis2_start", "axis2_stop",
                     "jump_threshold_p0", "jump_threshold_ratio")
_SWEEP_INT_KEYS = ("axis1_points", "axis2_points", "n_steps", "n_max")
_SWEEP_STR_KEYS = ("axis1", "axis2", "outputs")

_DEFAULTS = {
    "system": {"h_x": 1.0, "h_z0": 0.0, "h_z1": 40.0, "omega": 40.0,
               "theta": math.pi / 2},
    "bath": {"gamma": 0.01, "omega_c": 10.0, "temperature": 3.0},
    "sweep": {"axis1": "h_z1", "axis1_start": 0.0, "axis1_stop": 240.0,
              "axis1_points": 200, "axis2": "", "axis2_start": 0.0,
              "axis2_stop": 0.0, "axis2_points": 0,
              "outputs": "spectrum,populations,coefficients,emission",
              "n_steps": 2048, "n_max": 3,
              "jump_threshold_p0": 0.05, "jump_threshold_ratio": 0.02},
}


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _add_param_flags(parser: argparse.ArgumentParser, sweep: bool) -> None:
    parser.add_argument("--config", metavar="FILE",
                        help="INI config file with [system]/[bath]/[sweep]")
    for key in _SYSTEM_KEYS:
        parser.add_argument(f"--system.{key}", dest=f"system__{key}",
                            type=float, metavar="X")
    for key in _BATH_KEYS:
        parser.add_argument(f"--bath.{key}", dest=f"bath__{key}",
                            type=float, metavar="X")
    if not sweep:
        parser.add_argument("--sweep.n_steps", dest="sweep__n_steps",
                            type=int, metavar="N")
        parser.add_argument("--sweep.n_max", dest="sweep__n_max",
                            type=int, metavar="N")
        return
    for key in _SWEEP_FLOAT_KEYS:
        parser.add_argument(f"--sweep.{key}", dest=f"sweep__{key}",
                            type=float, metavar="X")
    for key in _SWEEP_INT_KEYS:
        parser.add_argument(f"--sweep.{key}", dest=f"sweep__{key}",
                            type=int, metavar="N")
    for key in _SWEEP_STR_KEYS:
        parser.add_argument(f"--sweep.{key}", dest=f"sweep__{key}",
                            metavar="S")


def _load_settings(args) -> dict:
    settings = {sec: dict(vals) for sec, vals in _DEFAULTS.items()}
    if getattr(args, "config", None):
        parser = configparser.ConfigParser()
        read = parser.read(args.config)
        if not read:
            raise ConfigError(f"config file not found: {args.config}")
        for section in parser.sections():
            if section not in settings:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                if key not in settings[section]:
                    raise ConfigError(
                        f"unknown config key {key!r} in [{section}]")
                default = _DEFAULTS[section][key]
                if isinstance(default, (int, np.integer)) and \
                        not isinstance(default, bool):
                    settings[section][key] = int(raw)
                elif isinstance(default, float):
                    settings[section][key] = float(raw)
                else:
                    settings[section][key] = raw
    for name, value in vars(args).items():
        if "__" in name and value is not None:
            section, key = name.split("__", 1)
            settings[section][key] = value
    return settings


def _params_from(settings) -> tuple[SystemParams, BathParams]:
    system = SystemParams(**settings["system"])
    bath = BathParams(**settings["bath"])
    return system, bath


def _sweep_spec(settings, outputs_override=None) -> SweepSpec:
    system, bath = _params_from(settings)
    sw = settings["sweep"]
    axis1 = AxisSpec(sw["axis1"], sw["axis1_start"], sw["axis1_stop"],
                     sw["axis1_points"])
    axis2 = None
    if sw["axis2"]:
        axis2 = AxisSpec(sw["axis2"], sw["axis2_start"], sw["axis2_stop"],
                         sw["axis2_points"])
    outputs = outputs_override or tuple(
        s.strip() for s in sw["outputs"].split(",") if s.strip())
    return SweepSpec(system=system, bath=bath, axis1=axis1, axis2=axis2,
                     outputs=outputs, n_steps=sw["n_steps"],
                     n_max=sw["n_max"],
                     jump_threshold_p0=sw["jump_threshold_p0"],
                     jump_threshold_ratio=sw["jump_threshold_ratio"])


def _cmd_point(args) -> int:
    settings = _load_settings(args)
    system, bath = _params_from(settings)
    record = run_point(system, bath, n_steps=settings["sweep"]["n_steps"],
                       n_max=settings["sweep"]["n_max"],
                       include_analytic=args.analytic)
    outputs = ("spectrum", "populations", "coefficients", "emission") + \
        (("analytic",) if args.analytic else ())
    pairs = [(c, record.value(c)) for c in result_columns(outputs)]
    pairs += [("gamma", bath.gamma), ("omega_c", bath.omega_c),
              ("temperature", bath.temperature), ("backend", BACKEND)]
    if args.json:
        print(json.dumps({k: (v if isinstance(v, str) else float(v))
                          for k, v in pairs}, indent=2, sort_keys=False))
    else:
        for key, value in pairs:
            print(f"{key} = {value if isinstance(value, str) else _fmt(value)}")
    return 0


def _cmd_sweep(args, outputs_override=None) -> int:
    settings = _load_settings(args)
    spec = _sweep_spec(settings, outputs_override)
    result = run_sweep(spec, workers=args.workers)
    write_csv(result, args.out)
    meta = args.meta or (str(args.out) + ".meta.txt")
    write_metadata(result, meta)
    n_ok = sum(r is not None for r in result.records)
    print(f"wrote {args.out} ({n_ok} points, {len(result.jumps)} jumps, "
          f"{len(result.failures)} failures); metadata in {meta}")
    return 0


def _cmd_spectrum(args) -> int:
    return _cmd_sweep(args, outputs_override=("spectrum",))


def _cmd_analytic(args) -> int:
    settings = _load_settings(args)
    system, _ = _params_from(settings)
    n_max = settings["sweep"]["n_max"]
    z = system.drive_ratio
    print(f"z = {_fmt(z)}")
    print(f"J0_z = {_fmt(analytics.bessel_j(0, z))}")
    for k in range(1, 6):
        print(f"cdt_root.{k} = {_fmt(analytics.bessel_root(k))}")
    heff = analytics.effective_hamiltonian(system)
    print(f"heff.coeff_x = {_fmt(heff.coeff_x)}")
    print(f"heff.coeff_z = {_fmt(heff.coeff_z)}")
    print(f"heff.eps0 = {_fmt(heff.quasienergies[0])}")
    print(f"heff.eps1 = {_fmt(heff.quasienergies[1])}")
    for n in range(-n_max, n_max + 1):
        coeff = analytics.s_coefficients(system, n)
        print(f"s.{n}.x = {_fmt(coeff.s_x)}")
        print(f"s.{n}.y = {_fmt(coeff.s_y)}")
        print(f"s.{n}.z = {_fmt(coeff.s_z)}")
    for n in (0, -1):
        table = analytics.analytic_transition_elements(system, n)
        for lam in range(2):
            for mu in range(2):
                value = table[lam, mu]
                print(f"a.{n}.{lam}{mu}.re = {_fmt(value.real)}")
                print(f"a.{n}.{lam}{mu}.im = {_fmt(value.imag)}")
    try:
        jump = analytics.ratio_jump_prediction(system)
        print(f"ratio_jump.root_index = {jump.root_index}")
        print(f"ratio_jump.left = {_fmt(jump.ratio_left)}")
        print(f"ratio_jump.right = {_fmt(jump.ratio_right)}")
        print(f"ratio_jump.magnitude = {_fmt(jump.jump_magnitude)}")
    except FloqspinError as exc:
        print(f"ratio_jump.note = {exc}")
    return 0


def _cmd_validate(args) -> int:
    from . import validate

    indices = None
    if args.only:
        indices = [int(s) for s in args.only.split(",")]
    results = validate.run_criteria(indices, verbose=True)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floqspin",
        description="Dissipative Floquet dynamics of a driven two-level "
                    "system: quasienergies, rate equations, stationary "
                    "populations, sideband emission.")
    parser.add_argument("--version", action="version",
                        version=f"floqspin {__version__} (kernel: {BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    p_point = sub.add_parser("point", help="single parameter point")
    _add_param_flags(p_point, sweep=False)
    p_point.add_argument("--analytic", action="store_true",
                         help="include closed-form high-frequency columns")
    p_point.add_argument("--json", action="store_true")
    p_point.set_defaults(func=_cmd_point)

    for name, help_text, func in (
            ("sweep", "parameter sweep to CSV", _cmd_sweep),
            ("spectrum", "quasienergy-only sweep (fast path)", _cmd_spectrum)):
        p = sub.add_parser(name, help=help_text)
        _add_param_flags(p, sweep=True)
        p.add_argument("--out", required=True, metavar="CSV")
        p.add_argument("--meta", metavar="FILE",
                       help="metadata sidecar path (default: CSV + .meta.txt)")
        p.add_argument("--workers", type=int, default=None,
                       help="worker processes (default: FLOQSPIN_WORKERS "
                            "or logical cores)")
        p.set_defaults(func=func)

    p_analytic = sub.add_parser("analytic",
                                help="closed-form high-frequency quantities")
    _add_param_flags(p_analytic, sweep=False)
    p_analytic.set_defaults(func=_cmd_analytic)

    p_validate = sub.add_parser("validate",
                                help="run the verification suite")
    p_validate.add_argument("--only", metavar="N[,M...]",
                            help="run only these check numbers (1-10)")
    p_validate.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FloqspinError as exc:
        message = str(exc).replace('"', "'")
        print(f'floqspin-error code={type(exc).__name__} '
              f'message="{message}"', file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
