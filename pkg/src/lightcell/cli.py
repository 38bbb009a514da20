"""Command-line front end.

    lightcell --config scenario.yaml [--algo dpp] [--slots 150] [--seed 1]
              [--out runs] [--sweep fov=96,100,104,108] [--reps 3]

Single runs write slots.csv, summary.csv and graph.txt into the output
directory and print one line with the user-mean ESR and the worst
normalized backlog. Sweeps write one summary.csv row per (value, rep).
Every flag mirrors a config-file entry under the `run:` block; flags win.
Exit codes: 0 success, 2 configuration problem (message names the key),
1 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import yaml

from .sim import (
    ALGORITHMS,
    SWEEP_AXES,
    ConfigError,
    build_scenario,
    epsilon_from,
    pso_config_from,
    run,
    sweep,
    write_run_summary_csv,
    write_slots_csv,
    write_sweep_summary_csv,
)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lightcell",
        description="Timeslotted simulator for secure cell formation in multi-AP "
        "indoor visible-light networks.",
    )
    p.add_argument("--config", required=True, help="YAML scenario file")
    p.add_argument("--algo", choices=ALGORITHMS, help="scheduling algorithm (default from config)")
    p.add_argument("--slots", type=int, help="horizon in slots")
    p.add_argument("--seed", type=int, help="run seed")
    p.add_argument("--out", help="output directory for CSV files")
    p.add_argument(
        "--sweep",
        metavar="AXIS=V1,V2,...",
        help=f"sweep one axis ({', '.join(SWEEP_AXES)}) over comma-separated values",
    )
    p.add_argument("--reps", type=int, help="repetitions per sweep value (default 1)")
    return p


def _parse_sweep(text: str) -> tuple[str, list[float]]:
    axis, sep, tail = text.partition("=")
    axis = axis.strip()
    if not sep or not tail.strip():
        raise ConfigError(f"--sweep expects AXIS=v1,v2,..., got {text!r}")
    try:
        values = [float(v) for v in tail.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"--sweep {axis}: values must be numbers, got {tail!r}") from exc
    if not values:
        raise ConfigError(f"--sweep {axis}: no values given")
    return axis, values


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            cfg = yaml.safe_load(fh)
    except FileNotFoundError:
        print(f"config error: file not found: {args.config}", file=sys.stderr)
        return 2
    except yaml.YAMLError as exc:
        print(f"config error: cannot parse {args.config}: {exc}", file=sys.stderr)
        return 2
    if not isinstance(cfg, dict):
        print(f"config error: {args.config} does not hold a mapping", file=sys.stderr)
        return 2

    run_block = cfg.setdefault("run", {})
    if args.algo is not None:
        run_block["algo"] = args.algo
    if args.slots is not None:
        run_block["slots"] = args.slots
    if args.seed is not None:
        run_block["seed"] = args.seed
    if args.out is not None:
        run_block["out"] = args.out
    if args.reps is not None:
        run_block["reps"] = args.reps
    if args.sweep is not None:
        run_block["sweep"] = args.sweep

    try:
        return _execute(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - boundary: report and signal failure
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _execute(cfg: dict) -> int:
    run_block = cfg.get("run") or {}
    algo = run_block.get("algo", "dpp")
    if algo not in ALGORITHMS:
        raise ConfigError(f"run.algo must be one of {ALGORITHMS}, got {algo!r}")
    slots = int(run_block.get("slots", 150))
    if slots < 1:
        raise ConfigError(f"run.slots must be >= 1, got {slots}")
    seed = int(run_block.get("seed", 1))
    out_dir = str(run_block.get("out", "runs"))
    os.makedirs(out_dir, exist_ok=True)

    sweep_spec = run_block.get("sweep")
    if sweep_spec:
        axis, values = _parse_sweep(str(sweep_spec))
        reps = int(run_block.get("reps", 1))
        rows = sweep(cfg, axis, values, reps=reps, algorithm=algo, horizon=slots, seed=seed)
        write_sweep_summary_csv(os.path.join(out_dir, "summary.csv"), rows)
        for r in rows:
            print(
                f"algo={r.algo} {r.axis}={r.value:g} rep={r.rep} seed={r.seed} "
                f"slots={r.horizon} mean_esr_bps={r.mean_esr_bps:.6g} "
                f"max_norm_backlog={r.max_norm_backlog:.6g}"
            )
        return 0

    scenario = build_scenario(cfg)
    result = run(
        scenario,
        algorithm=algo,
        horizon=slots,
        seed=seed,
        pso_config=pso_config_from(cfg),
        epsilon=epsilon_from(cfg, scenario),
        an_alpha=float(run_block.get("an_alpha", 0.7)),
        pf_t_f=float(run_block.get("pf_window", 100.0)),
    )
    write_slots_csv(os.path.join(out_dir, "slots.csv"), result)
    write_run_summary_csv(os.path.join(out_dir, "summary.csv"), result.summary)
    with open(os.path.join(out_dir, "graph.txt"), "w") as fh:
        for j, k in sorted(result.graph.edges):
            fh.write(f"{j} {k}\n")
    s = result.summary
    print(
        f"algo={s.algo} seed={s.seed} slots={s.horizon} "
        f"mean_esr_bps={s.mean_esr_bps:.6g} max_norm_backlog={s.max_norm_backlog:.6g}"
    )
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
