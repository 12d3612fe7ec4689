"""Command-line front end: ``optomech-router SUBCOMMAND [options]``.

Configuration is a flat ``key = value`` file (``#`` starts a comment).
Without ``--config`` the built-in preset for ``--case`` is used.  Outputs go
to ``--out`` (default ``./out``); failures print one line to stderr of the
form ``error=<Kind> exit=<code> message=<text>``.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
import argparse
import itertools
import json
import math
import os
import sys

import numpy as np

from .dynamics import assess_stability, drift_case1, drift_case2
from .errors import (
    ConfigError,
    InvalidParameter,
    MissingKey,
    NumericalError,
    UnknownKey,
    UnparsableValue,
    ValidationError,
)
from .model import DriveParams, RawParams, derive_constants, paper_preset
from .router import reproduce, route_decision, write_dataset
from .spectra import output_spectra, scatter, spectrum_table, write_spectrum_csv
from .steadystate import integrate_mean_field, pump_for_coupling, solve_steady

__all__ = ["RunConfig", "parse_config", "run", "main", "SUBCOMMANDS", "MAX_EVALUATIONS"]

SUBCOMMANDS = ("steady", "stability", "spectrum", "route", "reproduce", "sweep")
MAX_EVALUATIONS = 1_000_000
DEFAULT_NU_COUNT = 4001

RAW_KEYS = tuple(f.name for f in fields(RawParams))
DRIVE_KEYS = ("G", "epsilon_d", "omega_d")
REQUIRED_KEYS = RAW_KEYS + ("G",)
OPTIONAL_KEYS = (
    "epsilon_d",
    "omega_d",
    "case",
    "nu_min",
    "nu_max",
    "nu_count",
    "out",
    "workers",
    "epsilon_p",
    "t_end",
    "dt",
    "ramp_time",
)
SWEEPABLE = RAW_KEYS + DRIVE_KEYS


@dataclass(frozen=True)
class RunConfig:
    raw: RawParams
    drive: DriveParams
    case: int
    nu_min: float = None
    nu_max: float = None
    nu_count: int = DEFAULT_NU_COUNT
    sweep: dict = field(default_factory=dict)
    out: str = "out"
    workers: int = 1
    epsilon_p: float = None
    t_end: float = None
    dt: float = None
    ramp_time: float = None

    def __post_init__(self):
        if self.case not in (1, 2):
            raise InvalidParameter(f"case must be 1 or 2, got {self.case!r}")
        if self.case == 2 and self.drive.epsilon_d <= 0:
            raise InvalidParameter("case 2 needs epsilon_d > 0 and omega_d > 0")
        if self.nu_count < 2:
            raise InvalidParameter(f"nu_count must be >= 2, got {self.nu_count!r}")
        lo, hi = self.grid
        if not hi > lo:
            raise InvalidParameter("nu_max must exceed nu_min")
        if self.workers < 1:
            raise InvalidParameter(f"workers must be >= 1, got {self.workers!r}")
        for name in self.sweep:
            if name not in SWEEPABLE:
                raise UnknownKey(f"sweep axis {name!r} is not a parameter name")

    @property
    def grid(self):
        """``(min, max)`` of the nu grid; unset ends follow :func:`default_grid`."""
        lo, hi = default_grid(self.case, self.raw.omega_m)
        return (
            lo if self.nu_min is None else self.nu_min,
            hi if self.nu_max is None else self.nu_max,
        )

    @property
    def nu(self):
        return np.linspace(*self.grid, self.nu_count)


def default_grid(case, omega_m):
    """``[0, 2 omega_m]`` for case 1, ``[-omega_m, omega_m]`` for case 2."""
    return (0.0, 2.0 * omega_m) if case == 1 else (-omega_m, omega_m)


def _number(text, key, line, integer=False):
    try:
        value = float(text)
    except ValueError:
        raise UnparsableValue(f"{key}: cannot parse {text!r} as a number", line) from None
    if not math.isfinite(value):
        raise UnparsableValue(f"{key}: {text!r} is not finite", line)
    if integer:
        if value != int(value):
            raise UnparsableValue(f"{key}: {text!r} is not an integer", line)
        return int(value)
    return value


def parse_config(text):
    """Parse ``key = value`` text into a validated :class:`RunConfig`.

    Required keys are the raw model parameters plus ``G``.  Sweep axes are
    written ``sweep.<name> = v1, v2, ...``.

    Raises
    ------
    UnknownKey, MissingKey, UnparsableValue
        With the offending line number where one exists.
    """
    values, lines, sweep = {}, {}, {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UnparsableValue(f"expected key = value, got {line!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key in lines or ("sweep." + key) in lines:
            raise UnparsableValue(f"duplicate key {key!r}", lineno)
        if key.startswith("sweep."):
            name = key[len("sweep."):]
            if name not in SWEEPABLE:
                raise UnknownKey(f"unknown sweep parameter {name!r}", lineno)
            items = [v.strip() for v in value.split(",") if v.strip()]
            if not items:
                raise UnparsableValue(f"{key}: empty value list", lineno)
            sweep[name] = tuple(_number(v, key, lineno) for v in items)
        elif key in REQUIRED_KEYS or key in OPTIONAL_KEYS:
            if key == "out":
                values[key] = value
            else:
                integer = key in ("case", "nu_count", "workers")
                values[key] = _number(value, key, lineno, integer)
        else:
            raise UnknownKey(f"unknown key {key!r}", lineno)
        lines[key] = lineno

    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise MissingKey(missing)

    raw = RawParams(**{k: values[k] for k in RAW_KEYS})
    drive = DriveParams(
        G=values["G"],
        epsilon_d=values.get("epsilon_d", 0.0),
        omega_d=values.get("omega_d", 0.0),
    )
    return RunConfig(
        raw=raw,
        drive=drive,
        case=values.get("case", drive.case),
        nu_min=values.get("nu_min"),
        nu_max=values.get("nu_max"),
        nu_count=values.get("nu_count", DEFAULT_NU_COUNT),
        sweep=sweep,
        out=values.get("out", "out"),
        workers=values.get("workers", 1),
        epsilon_p=values.get("epsilon_p"),
        t_end=values.get("t_end"),
        dt=values.get("dt"),
        ramp_time=values.get("ramp_time"),
    )


def preset_config(case=1):
    raw, drive = paper_preset(case)
    return RunConfig(raw=raw, drive=drive, case=case)


# --- subcommands -------------------------------------------------------------


def _drift(params, drive, case):
    if case == 1:
        return drift_case1(params, drive.G)
    return drift_case2(params, drive.G, drive.epsilon_d, drive.omega_d)


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _cx(z):
    return [float(z.real), float(z.imag)]


def _steady(cfg, out):
    params = derive_constants(cfg.raw)
    eps = cfg.epsilon_p if cfg.epsilon_p is not None else pump_for_coupling(params, cfg.drive.G)
    state = solve_steady(params, eps)
    result = {
        "epsilon_p": eps,
        "alpha": _cx(state.alpha),
        "beta": _cx(state.beta),
        "G_eff": state.G_eff,
        "Delta_prime": state.Delta_prime,
        "residual": state.residual,
    }
    if cfg.t_end is not None:
        dt = cfg.dt if cfg.dt is not None else 0.2 / params.omega_m
        ramp = cfg.ramp_time if cfg.ramp_time is not None else 0.8 * cfg.t_end
        a, b = integrate_mean_field(params, eps, cfg.t_end, dt, ramp_time=ramp).endpoint
        result["ode_endpoint"] = {"alpha": _cx(a), "beta": _cx(b)}
    return [_write_json(os.path.join(out, "steady.json"), result)]


def _stability(cfg, out):
    params = derive_constants(cfg.raw)
    report = assess_stability(_drift(params, cfg.drive, cfg.case))
    result = dict(report.as_dict(), case=cfg.case)
    return [_write_json(os.path.join(out, "stability.json"), result)]


def _spectrum_table(raw, drive, case, nu):
    params = derive_constants(raw)
    probs = scatter(_drift(params, drive, case), nu)
    decomp = output_spectra(probs, raw.Gamma_photon, raw.n_th, nu)
    return spectrum_table(probs, decomp, raw.omega_m)


def _spectrum(cfg, out):
    path = os.path.join(out, "spectrum.csv")
    write_spectrum_csv(path, _spectrum_table(cfg.raw, cfg.drive, cfg.case, cfg.nu))
    return [path]


def _route(cfg, out):
    params = derive_constants(cfg.raw)
    drive = cfg.drive if cfg.case == 2 else DriveParams(G=cfg.drive.G)
    verdict = route_decision(params, drive)
    return [_write_json(os.path.join(out, "route.json"), dict(verdict.as_dict(), case=cfg.case))]


def _reproduce(cfg, out, figure):
    if figure is None:
        raise InvalidParameter("reproduce needs --figure {fig2,fig3,fig4}")
    return [write_dataset(reproduce(figure), out)]


def sweep_points(cfg):
    """Cartesian product of the sweep axes as a list of ``{name: value}``."""
    names = sorted(cfg.sweep)
    return [dict(zip(names, combo)) for combo in itertools.product(*(cfg.sweep[n] for n in names))]


def _sweep_task(args):
    raw_dict, drive_dict, case, nu = args
    return _spectrum_table(RawParams(**raw_dict), DriveParams(**drive_dict), case, nu)


def _sweep(cfg, out):
    if not cfg.sweep:
        raise InvalidParameter("sweep needs at least one sweep.<name> axis in the config")
    points = sweep_points(cfg)
    evaluations = len(points) * cfg.nu_count
    if evaluations > MAX_EVALUATIONS:
        raise InvalidParameter(
            f"sweep has {evaluations} evaluations, above the limit of {MAX_EVALUATIONS}"
        )
    tasks = []
    for point in points:
        raw = replace(cfg.raw, **{k: v for k, v in point.items() if k in RAW_KEYS})
        drive = replace(cfg.drive, **{k: v for k, v in point.items() if k in DRIVE_KEYS})
        tasks.append((raw.as_dict(), {k: getattr(drive, k) for k in DRIVE_KEYS}, cfg.case, cfg.nu))
    if cfg.workers == 1:
        tables = [_sweep_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            tables = list(pool.map(_sweep_task, tasks))  # map keeps input order
    entries, paths = [], []
    for i, (point, task, table) in enumerate(zip(points, tasks, tables)):
        name = f"sweep_{i:04d}.csv"
        write_spectrum_csv(os.path.join(out, name), table)
        label = ", ".join(f"{k} = {v!r}" for k, v in point.items())
        entries.append({"label": label, "params": dict(task[0], **task[1]), "csv_path": name})
        paths.append(os.path.join(out, name))
    manifest = {
        "figure": "sweep",
        "curves": entries,
        "grid": {"min": cfg.grid[0], "max": cfg.grid[1], "count": cfg.nu_count},
    }
    paths.append(_write_json(os.path.join(out, "manifest.json"), manifest))
    return paths


def run(config, subcommand, *, figure=None):
    """Execute ``subcommand`` for ``config``; returns the written paths.

    Exceptions propagate; :func:`main` turns them into exit codes.
    """
    if subcommand not in SUBCOMMANDS:
        raise InvalidParameter(f"unknown subcommand {subcommand!r}")
    os.makedirs(config.out, exist_ok=True)
    if subcommand == "reproduce":
        return _reproduce(config, config.out, figure)
    handler = {
        "steady": _steady,
        "stability": _stability,
        "spectrum": _spectrum,
        "route": _route,
        "sweep": _sweep,
    }[subcommand]
    return handler(config, config.out)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="optomech-router",
        description="Single-photon routing in a two-port optomechanical cavity.",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="key = value parameter file")
    parser.add_argument("--out", help="output directory (default: config 'out' or ./out)")
    parser.add_argument("--workers", type=int, help="worker processes for sweep")
    parser.add_argument("--figure", choices=("fig2", "fig3", "fig4"))
    parser.add_argument("--case", type=int, choices=(1, 2), help="drive case")
    return parser


def _diagnostic(kind, code, message):
    text = " ".join(str(message).split())
    return f"error={kind} exit={code} message={text}"


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config {args.config!r}: {exc.strerror}") from None
            cfg = parse_config(text)
            if args.case is not None:
                cfg = replace(cfg, case=args.case)
        else:
            cfg = preset_config(args.case or 1)
        overrides = {}
        if args.out is not None:
            overrides["out"] = args.out
        if args.workers is not None:
            overrides["workers"] = args.workers
        cfg = replace(cfg, **overrides)
        paths = run(cfg, args.subcommand, figure=args.figure)
    except ValidationError as exc:
        print(_diagnostic(type(exc).__name__, 1, exc), file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(_diagnostic(type(exc).__name__, 2, exc), file=sys.stderr)
        return 2
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
