"""Command-line interface.

Subcommands:
  run       simulate one scenario (JSON config or named preset)
  presets   list the built-in scenario names
  analytic  print closed-form slab quantities as CSV on stdout
  sweep     run a preset repeatedly while varying one config key
  check     validate a finished run directory

Exit codes: 0 on success, 1 on solver failure or a failed check, 2 on usage
errors (bad flags, malformed configs).
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .analytic import AnalyticSetup, analytic_nutrient, analytic_pressure, integrate_radius
from .diagnostics import SERIES_CHANNELS
from .scenarios import (
    PRESETS,
    PROFILE_COLUMNS,
    config_from_dict,
    config_to_dict,
    load_config,
    run_scenario,
)
from .solver import SolverError, read_checkpoint

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="autophagy-tumor",
        description="1D two-population tumor growth simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one scenario")
    src = p_run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to a JSON scenario config")
    src.add_argument("--preset", help="name of a built-in scenario")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_presets = sub.add_parser("presets", help="list built-in scenario names")
    p_presets.set_defaults(func=_cmd_presets)

    p_an = sub.add_parser("analytic", help="print closed-form slab quantities as CSV")
    p_an.add_argument("quantity", choices=("radius", "nutrient", "pressure"))
    p_an.add_argument("--mu", type=float, default=1.0, help="constant normal fraction")
    p_an.add_argument("--g", type=float, default=1.0, help="growth gain")
    p_an.add_argument("--a", type=float, default=0.5, help="autophagic nutrient release rate")
    p_an.add_argument("--D", type=float, default=0.3, help="autophagic death rate")
    p_an.add_argument("--cB", type=float, default=1.0, help="ambient nutrient level")
    p_an.add_argument("--R0", type=float, default=1.0, help="slab radius (initial, for radius)")
    p_an.add_argument("--t-end", type=float, default=1.0, help="horizon for the radius ODE")
    p_an.add_argument("--dt", type=float, default=1e-3, help="radius ODE step")
    p_an.add_argument("--points", type=int, default=101, help="profile sample count")
    p_an.set_defaults(func=_cmd_analytic)

    p_sweep = sub.add_parser("sweep", help="run a preset over several values of one key")
    p_sweep.add_argument("--preset", required=True, help="base preset name")
    p_sweep.add_argument(
        "--vary",
        required=True,
        metavar="KEY=V1,V2,...",
        help="config key to vary (dotted path or bare key) and its values",
    )
    p_sweep.add_argument("--out", required=True, help="parent output directory")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_check = sub.add_parser("check", help="validate a finished run directory")
    p_check.add_argument("run_dir", help="directory holding manifest.json")
    p_check.set_defaults(func=_cmd_check)

    return parser


def _cmd_run(args) -> int:
    try:
        if args.preset is not None:
            if args.preset not in PRESETS:
                print(
                    f"unknown preset {args.preset!r}; run 'autophagy-tumor presets'",
                    file=sys.stderr,
                )
                return 2
            cfg = PRESETS[args.preset]
        else:
            cfg = load_config(args.config)
    except (OSError, ValueError, json.JSONDecodeError) as err:
        print(f"bad config: {err}", file=sys.stderr)
        return 2
    try:
        result = run_scenario(cfg, args.out)
    except SolverError as err:
        print(f"solver failed: {err}", file=sys.stderr)
        return 1
    for line in result.log.warnings:
        print(f"warning: {line}", file=sys.stderr)
    for line in result.log.violations:
        print(f"VIOLATION: {line}", file=sys.stderr)
    print(f"wrote {args.out} ({result.log.steps} steps)")
    return 0


def _cmd_presets(args) -> int:
    for name in PRESETS:
        print(name)
    return 0


def _cmd_analytic(args) -> int:
    try:
        setup = AnalyticSetup(
            mu=args.mu, g=args.g, a=args.a, D=args.D, c_B=args.cB, R0=args.R0
        )
    except ValueError as err:
        print(f"bad parameters: {err}", file=sys.stderr)
        return 2
    if args.quantity == "radius":
        traj = integrate_radius(setup, args.t_end, args.dt)
        print("t,radius,speed")
        for t, r, v in zip(traj.times, traj.radii, traj.speeds):
            print("%.12g,%.12g,%.12g" % (t, r, v))
        return 0
    x = np.linspace(-args.R0, args.R0, args.points)
    if args.quantity == "nutrient":
        values = analytic_nutrient(x, args.R0, setup)
    else:
        values = analytic_pressure(x, args.R0, setup)
    print("x,value")
    for xi, vi in zip(x, values):
        print("%.12g,%.12g" % (xi, vi))
    return 0


# --- sweep ------------------------------------------------------------------

_BARE_KEY_SECTIONS = (
    ("model",),
    ("solver",),
    ("initial",),
    ("model", "growth"),
    ("model", "transitions"),
)


def set_config_value(data: dict, key: str, value) -> None:
    """Assign into a config dict by dotted path or bare key.

    Dotted paths start at one of: name, model (alias: params), solver,
    initial, t_end. A bare key is looked up in the model, solver, and
    initial sections (growth and transitions included); it must match
    exactly one existing entry.
    """
    if "." in key:
        parts = key.split(".")
        if parts[0] == "params":
            parts[0] = "model"
        if parts[0] not in ("name", "model", "solver", "initial", "t_end"):
            raise ValueError(f"unknown config root {parts[0]!r} in {key!r}")
        node = data
        for part in parts[:-1]:
            if not isinstance(node, dict) or part not in node:
                raise ValueError(f"no such config entry: {key!r}")
            node = node[part]
        if not isinstance(node, dict) or parts[-1] not in node:
            raise ValueError(f"no such config entry: {key!r}")
        node[parts[-1]] = value
        return
    if key in ("t_end", "name"):
        data[key] = value
        return
    hits = []
    for section in _BARE_KEY_SECTIONS:
        node = data
        for part in section:
            node = node.get(part, {}) if isinstance(node, dict) else {}
        if isinstance(node, dict) and key in node:
            hits.append(node)
    if not hits:
        raise ValueError(f"key {key!r} not found in the config")
    if len(hits) > 1:
        raise ValueError(f"key {key!r} is ambiguous; use a dotted path")
    hits[0][key] = value


def _parse_value(token: str):
    try:
        return json.loads(token)
    except json.JSONDecodeError:
        return token


def _sweep_worker(item: tuple[dict, str]) -> tuple[str, str | None]:
    data, out_dir = item
    try:
        run_scenario(config_from_dict(data), out_dir)
        return out_dir, None
    except (SolverError, ValueError) as err:
        return out_dir, str(err)


def _cmd_sweep(args) -> int:
    if args.preset not in PRESETS:
        print(f"unknown preset {args.preset!r}", file=sys.stderr)
        return 2
    if "=" not in args.vary:
        print("--vary needs the form KEY=V1,V2,...", file=sys.stderr)
        return 2
    key, _, value_list = args.vary.partition("=")
    tokens = [tok for tok in value_list.split(",") if tok]
    if not tokens:
        print("--vary lists no values", file=sys.stderr)
        return 2

    base = config_to_dict(PRESETS[args.preset])
    jobs = []
    try:
        for tok in tokens:
            data = copy.deepcopy(base)
            set_config_value(data, key, _parse_value(tok))
            data["name"] = f"{args.preset}-{key}={tok}"
            config_from_dict(data)  # validate before launching
            jobs.append((data, str(Path(args.out) / f"{args.preset}-{key}={tok}")))
    except ValueError as err:
        print(f"bad sweep: {err}", file=sys.stderr)
        return 2

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_worker, jobs))
    else:
        results = [_sweep_worker(job) for job in jobs]

    failed = 0
    for out_dir, error in results:
        if error is None:
            print(f"done {out_dir}")
        else:
            failed += 1
            print(f"FAILED {out_dir}: {error}", file=sys.stderr)
    return 1 if failed else 0


# --- check ------------------------------------------------------------------


def _check_csv(path: Path, expected_header: tuple[str, ...], problems: list[str]) -> None:
    try:
        with open(path) as fh:
            header = fh.readline().strip()
            if header != ",".join(expected_header):
                problems.append(f"{path.name}: unexpected header {header!r}")
                return
            for lineno, line in enumerate(fh, start=2):
                fields = line.strip().split(",")
                if len(fields) != len(expected_header):
                    problems.append(f"{path.name}:{lineno}: wrong column count")
                    return
                for tok in fields:
                    float(tok)
    except (OSError, ValueError) as err:
        problems.append(f"{path.name}: {err}")


def _cmd_check(args) -> int:
    run_dir = Path(args.run_dir)
    problems: list[str] = []
    manifest_path = run_dir / "manifest.json"
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        print(f"check failed: {manifest_path}: {err}", file=sys.stderr)
        return 1

    if manifest.get("failed"):
        problems.append(f"run failed: {manifest.get('error')}")
    for line in manifest.get("violations", []):
        problems.append(f"violation: {line}")

    outputs = manifest.get("outputs", {})
    if "timeseries" in outputs:
        _check_csv(run_dir / outputs["timeseries"], SERIES_CHANNELS, problems)
    for fname in outputs.get("profiles", {}).values():
        _check_csv(run_dir / fname, PROFILE_COLUMNS, problems)
    if "checkpoint" in outputs:
        try:
            read_checkpoint(run_dir / outputs["checkpoint"])
        except (OSError, ValueError) as err:
            problems.append(f"{outputs['checkpoint']}: {err}")

    if problems:
        for line in problems:
            print(f"check failed: {line}", file=sys.stderr)
        return 1
    print(f"OK {run_dir}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # stdout consumer (head, a closed pager) went away mid-print
        sys.stderr.close()
        return 0


if __name__ == "__main__":
    raise SystemExit(main())
