"""Command-line entry point and machine-readable result emission.

One subcommand per headline question:

  analyze   density evolution at a point or over a beta curve
  optimize  beta* search, asymptotic (density evolution) or empirical (Monte Carlo)
  simulate  Monte Carlo of fixed-M or frameless rounds
  sweep     per-ratio asymptotic optimum over an M/N grid
  compare   frameless operating point vs the irregular framed baseline

Parameters come from flags, optionally seeded by a flat key=value config file
(flags win). Results are emitted as CSV (default) or JSON with one row per
grid point or aggregate; every row carries the seed (where one exists) and a
canonical rendering of the resolved RunSpec, so any output file names the
exact inputs that reproduce it. Floats are rendered with repr, which
round-trips to the identical double. Output destination is excluded from the
RunSpec rendering: it does not affect the computation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from .access import IRREGULAR_BASELINE
from .evolution import evolve, resolution_upper_bound
from .optimize import (
    GridSpec,
    optimize_beta_asymptotic,
    optimize_beta_empirical,
)
from .simulate import (
    ConstantBeta,
    FixedM,
    Frameless,
    Irregular,
    RoundConfig,
    monte_carlo,
)


@dataclass(frozen=True)
class RunSpec:
    """A validated subcommand plus its fully resolved parameters."""

    subcommand: str
    parameters: dict

    def render(self):
        """Canonical one-line form embedded in every output row."""
        parts = [self.subcommand]
        for key, value in self.parameters.items():
            if key in ("output", "format") or value is None:
                continue
            parts.append(f"{key}={_render_value(value)}")
        return " ".join(parts)


def _render_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class _Option:
    name: str
    type: type
    default: object = None
    required: bool = False
    choices: tuple | None = None
    help: str = ""


_OUTPUT_OPTIONS = (
    _Option("format", str, default="csv", choices=("csv", "json"), help="output format"),
    _Option("output", str, help="output path (default: standard output)"),
)

_SUBCOMMANDS = {
    "analyze": (
        _Option("beta", float, required=True, help="expected slot degree"),
        _Option("ratio", float, default=1.1, help="M/N"),
        _Option("beta_max", float, help="sweep betas up to this value"),
        _Option("beta_step", float, default=0.1, help="beta sweep step"),
        _Option("tol", float, default=1e-12, help="fixed-point tolerance"),
        _Option("max_iter", int, default=10_000, help="iteration cap"),
    )
    + _OUTPUT_OPTIONS,
    "optimize": (
        _Option("mode", str, default="asymptotic", choices=("asymptotic", "empirical")),
        _Option("objective", str, default="throughput", choices=("resolution", "throughput")),
        _Option("ratio", float, default=1.1, help="M/N"),
        _Option("beta_min", float, help="grid lower edge"),
        _Option("beta_max", float, help="grid upper edge"),
        _Option("beta_step", float, help="grid step"),
        _Option("refinements", int, help="refinement passes at step/10"),
        _Option("n", int, help="number of users (empirical mode)"),
        _Option("runs", int, default=100, help="runs per grid point (empirical mode)"),
        _Option("seed", int, default=0, help="master seed (empirical mode)"),
    )
    + _OUTPUT_OPTIONS,
    "simulate": (
        _Option("n", int, required=True, help="number of users"),
        _Option("beta", float, required=True, help="expected slot degree"),
        _Option("threshold", float, help="frameless termination threshold"),
        _Option("m", int, help="fixed frame length"),
        _Option("max_slots", int, help="frameless slot cap (default 4N)"),
        _Option("runs", int, default=100, help="Monte Carlo runs"),
        _Option("seed", int, default=0, help="master seed"),
    )
    + _OUTPUT_OPTIONS,
    "sweep": (
        _Option("ratio_min", float, default=0.8),
        _Option("ratio_max", float, default=2.0),
        _Option("ratio_step", float, default=0.01),
        _Option("objective", str, default="throughput", choices=("resolution", "throughput")),
        _Option("beta_min", float, default=0.5),
        _Option("beta_max", float, default=5.0),
        _Option("beta_step", float, default=0.01),
        _Option("refinements", int, default=1),
    )
    + _OUTPUT_OPTIONS,
    "compare": (
        _Option("n", int, default=1000, help="number of users"),
        _Option("runs", int, default=300, help="runs per scheme and ratio"),
        _Option("seed", int, default=0, help="master seed"),
        _Option("beta", float, default=2.9, help="frameless expected slot degree"),
        _Option("threshold", float, default=0.923, help="frameless termination threshold"),
        _Option("max_slots", int, help="frameless slot cap (default 4N)"),
        _Option("ratio_min", float, default=0.8, help="irregular sweep lower edge"),
        _Option("ratio_max", float, default=1.4, help="irregular sweep upper edge"),
        _Option("ratio_step", float, default=0.1, help="irregular sweep step"),
    )
    + _OUTPUT_OPTIONS,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="frameless-aloha",
        description="Frameless ALOHA simulator and analytical toolkit",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name, options in _SUBCOMMANDS.items():
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", type=str, default=None, help="key=value config file")
        for opt in options:
            flag = "--" + opt.name.replace("_", "-")
            sub.add_argument(
                flag,
                dest=opt.name,
                type=opt.type,
                default=None,
                choices=opt.choices,
                help=opt.help,
            )
    return parser


def _read_config_file(path, options, parser):
    """Flat key=value lines; '#' starts a comment; keys match option names."""
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        parser.error(f"cannot read config file: {exc}")
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            parser.error(f"config line {lineno}: expected key=value, got {line!r}")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in options:
            parser.error(f"unknown config key '{key}'")
        opt = options[key]
        try:
            parsed = opt.type(value)
        except ValueError:
            parser.error(f"invalid value for config key '{key}': {value!r}")
        if opt.choices and parsed not in opt.choices:
            parser.error(f"config key '{key}' must be one of {list(opt.choices)}")
        values[key] = parsed
    return values


def _resolve_grid(params, parser, defaults):
    """Fill missing beta-grid parameters from mode defaults, then validate."""
    for key, value in defaults.items():
        if params.get(key) is None:
            params[key] = value
    try:
        return GridSpec(
            lo=params["beta_min"],
            hi=params["beta_max"],
            step=params["beta_step"],
            refinements=params["refinements"],
        )
    except ValueError as exc:
        parser.error(f"invalid beta grid: {exc}")


def parse_config(args=None):
    """Parse flags plus optional config file into a validated RunSpec.

    Precedence: command-line flags, then config file values, then declared
    defaults. Any unknown key, missing required key, or unparsable number is
    a usage error naming the offending key (exit code 2).
    """
    parser = _build_parser()
    namespace = parser.parse_args(args)
    name = namespace.subcommand
    options = {opt.name: opt for opt in _SUBCOMMANDS[name]}

    params = {opt.name: getattr(namespace, opt.name) for opt in _SUBCOMMANDS[name]}
    if namespace.config is not None:
        for key, value in _read_config_file(namespace.config, options, parser).items():
            if params[key] is None:
                params[key] = value
    for opt in options.values():
        if params[opt.name] is None and opt.default is not None:
            params[opt.name] = opt.default
    for opt in options.values():
        if opt.required and params[opt.name] is None:
            parser.error(f"missing required parameter '{opt.name}'")

    if name == "optimize":
        if params["mode"] == "empirical" and params["n"] is None:
            parser.error("missing required parameter 'n' (empirical mode)")
        defaults = (
            {"beta_min": 0.5, "beta_max": 5.0, "beta_step": 0.01, "refinements": 1}
            if params["mode"] == "asymptotic"
            else {"beta_min": 2.0, "beta_max": 4.0, "beta_step": 0.1, "refinements": 0}
        )
        _resolve_grid(params, parser, defaults)
    if name == "simulate":
        if (params["threshold"] is None) == (params["m"] is None):
            parser.error("pass exactly one of 'threshold' (frameless) or 'm' (fixed)")
    return RunSpec(subcommand=name, parameters=params)


def _json_ready(value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return value
    return str(value)


def _csv_ready(value):
    if value is None:
        return ""
    return _render_value(value)


def emit_results(rows, format="csv", destination=None):
    """Write result rows as CSV (header + rows) or a JSON array.

    All rows must share one schema. Emission is deterministic: the same rows
    produce byte-identical output, floats render at full round-trip
    precision.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("result set is empty")
    fields = list(rows[0].keys())
    for row in rows:
        if list(row.keys()) != fields:
            raise ValueError("rows do not share a single schema")
    if format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_csv_ready(row[f]) for f in fields])
        text = buffer.getvalue()
    elif format == "json":
        text = json.dumps(
            [{f: _json_ready(row[f]) for f in fields} for row in rows], indent=2
        )
        text += "\n"
    else:
        raise ValueError(f"unknown format '{format}'")
    if destination is None:
        sys.stdout.write(text)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _ratio_points(lo, hi, step):
    if step <= 0 or hi < lo:
        raise ValueError("need ratio_min <= ratio_max and a positive step")
    count = int(round((hi - lo) / step)) + 1
    return [float(r) for r in np.round(lo + step * np.arange(count), 12)]


def _run_analyze(spec):
    p = spec.parameters
    betas = (
        [p["beta"]]
        if p["beta_max"] is None
        else _ratio_points(p["beta"], p["beta_max"], p["beta_step"])
    )
    ratio = p["ratio"]
    epsilon = ratio - 1.0
    rows = []
    for beta in betas:
        result = evolve(beta=beta, epsilon=epsilon, max_iter=p["max_iter"], tol=p["tol"])
        p_r = result.resolution_probability
        rows.append(
            {
                "beta": beta,
                "ratio": ratio,
                "p_r": p_r,
                "p_ub": resolution_upper_bound(beta, epsilon),
                "throughput": p_r / ratio,
                "converged": result.converged,
                "iterations": result.iterations_used,
                "runspec": spec.render(),
            }
        )
    return rows


def _run_optimize(spec):
    p = spec.parameters
    grid = GridSpec(p["beta_min"], p["beta_max"], p["beta_step"], p["refinements"])
    ratio = p["ratio"]
    if p["mode"] == "asymptotic":
        result = optimize_beta_asymptotic(ratio, p["objective"], grid)
        p_r = (
            result.objective_value
            if p["objective"] == "resolution"
            else result.objective_value * ratio
        )
        t = p_r / ratio
        n = runs = seed = None
    else:
        result = optimize_beta_empirical(
            p["n"], ratio, p["objective"], runs=p["runs"], seed=p["seed"], grid=grid
        )
        m = round(ratio * p["n"])
        if p["objective"] == "resolution":
            p_r = result.objective_value
            t = p_r * p["n"] / m
        else:
            t = result.objective_value
            p_r = t * m / p["n"]
        n, runs, seed = p["n"], p["runs"], p["seed"]
    return [
        {
            "mode": p["mode"],
            "objective": p["objective"],
            "ratio": ratio,
            "beta_star": result.beta_star,
            "objective_value": result.objective_value,
            "p_r": p_r,
            "throughput": t,
            "n": n,
            "runs": runs,
            "seed": seed,
            "grid_min": grid.lo,
            "grid_max": grid.hi,
            "grid_step": grid.step,
            "refinements": grid.refinements,
            "runspec": spec.render(),
        }
    ]


def _run_simulate(spec):
    p = spec.parameters
    if p["threshold"] is not None:
        mode = Frameless(threshold=p["threshold"], max_slots=p["max_slots"])
    else:
        mode = FixedM(num_slots=p["m"])
    config = RoundConfig(
        num_users=p["n"], mode=mode, access=ConstantBeta(beta=p["beta"]), seed=p["seed"]
    )
    stats = monte_carlo(config, p["runs"])
    return [
        {
            "runs": stats.runs,
            "mean_slots": stats.mean_slots_used,
            "sd_slots": stats.sd_slots_used,
            "mean_p_r": stats.mean_resolution_fraction,
            "sd_p_r": stats.sd_resolution_fraction,
            "mean_throughput": stats.mean_realized_throughput,
            "sd_throughput": stats.sd_realized_throughput,
            "frac_reached": stats.fraction_reached_threshold,
            "seed": p["seed"],
            "runspec": spec.render(),
        }
    ]


def _run_sweep(spec):
    p = spec.parameters
    grid = GridSpec(p["beta_min"], p["beta_max"], p["beta_step"], p["refinements"])
    rows = []
    for ratio in _ratio_points(p["ratio_min"], p["ratio_max"], p["ratio_step"]):
        result = optimize_beta_asymptotic(ratio, p["objective"], grid)
        p_r = evolve(beta=result.beta_star, epsilon=ratio - 1.0).resolution_probability
        rows.append(
            {
                "ratio": ratio,
                "beta_star": result.beta_star,
                "p_r": p_r,
                "throughput": p_r / ratio,
                "runspec": spec.render(),
            }
        )
    return rows


def _run_compare(spec):
    p = spec.parameters
    n, runs, seed = p["n"], p["runs"], p["seed"]
    runspec = spec.render()

    def stats_row(scheme, ratio, m, stats):
        return {
            "scheme": scheme,
            "ratio": ratio,
            "m": m,
            "runs": stats.runs,
            "mean_slots": stats.mean_slots_used,
            "sd_slots": stats.sd_slots_used,
            "mean_p_r": stats.mean_resolution_fraction,
            "sd_p_r": stats.sd_resolution_fraction,
            "mean_throughput": stats.mean_realized_throughput,
            "sd_throughput": stats.sd_realized_throughput,
            "frac_reached": stats.fraction_reached_threshold,
            "seed": seed,
            "runspec": runspec,
        }

    frameless_config = RoundConfig(
        num_users=n,
        mode=Frameless(threshold=p["threshold"], max_slots=p["max_slots"]),
        access=ConstantBeta(beta=p["beta"]),
        seed=seed,
    )
    frameless_stats = monte_carlo(frameless_config, runs)
    rows = [
        stats_row("frameless", frameless_stats.mean_slots_used / n, None, frameless_stats)
    ]
    for ratio in _ratio_points(p["ratio_min"], p["ratio_max"], p["ratio_step"]):
        m = round(ratio * n)
        config = RoundConfig(
            num_users=n,
            mode=FixedM(num_slots=m),
            access=Irregular(distribution=IRREGULAR_BASELINE),
            seed=seed,
        )
        rows.append(stats_row("irregular", ratio, m, monte_carlo(config, runs)))
    return rows


_RUNNERS = {
    "analyze": _run_analyze,
    "optimize": _run_optimize,
    "simulate": _run_simulate,
    "sweep": _run_sweep,
    "compare": _run_compare,
}


def main(args=None):
    """Entry point: 0 on success, 2 on usage errors, 1 on runtime errors."""
    spec = parse_config(args)
    try:
        rows = _RUNNERS[spec.subcommand](spec)
        emit_results(
            rows,
            format=spec.parameters["format"],
            destination=spec.parameters["output"],
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
