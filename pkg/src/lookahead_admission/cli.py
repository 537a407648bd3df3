"""Command-line front end.

    lookahead-admission simulate --lambda 0.95 --p 0.1 --policy nob
    lookahead-admission sweep --lambda-grid 1-1e-1:1-1e-3:5log --policy threshold,nob
    lookahead-admission duality --lambda 0.99 --p 0.1 --slots 1000000
    lookahead-admission pool --n 10,50,200 --scheduler threshold
    lookahead-admission validate --quick --out report.csv

Exit codes: 0 success, 1 a validation criterion failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import experiments, validation
from .errors import ParameterError, UnsupportedParameterError
from .experiments import ExperimentConfig
from .paths import ModelParams
from .policies import KINDS
from .pooling import SCHEDULERS, PoolingConfig, run_pooling

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
QUICK_SLOTS = 1_000_000

POOL_COLUMNS = (
    "n_stations", "scheduler", "lambda", "p", "epsilon", "L", "horizon_events", "seed",
    "mean_local_queue", "mean_central_queue", "system_mean_queue", "central_rate_in",
    "max_station_redirect_rate", "wasted_central_tokens",
)


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _policies(text: str) -> list[str]:
    kinds = [x.strip() for x in text.split(",") if x.strip()]
    for k in kinds:
        if k not in KINDS:
            raise argparse.ArgumentTypeError(f"unknown policy {k!r} (choose from {', '.join(KINDS)})")
    return kinds


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", type=_floats, help="arrival rate, or a comma list")
    common.add_argument("--lambda-grid", help="grid such as 1-1e-1:1-1e-3:5log or 0.9,0.99")
    common.add_argument("--p", type=float, help="fraction of service capacity spent on deletions")
    common.add_argument("--policy", type=_policies, help="comma list of " + "|".join(KINDS))
    common.add_argument("--threshold-L", type=int)
    common.add_argument("--window", type=float, help="lookahead window in time units")
    common.add_argument("--window-c", type=float, help="window constant C in C*ln(1/(1-lambda))")
    common.add_argument("--greedy-K", type=int)
    common.add_argument("--slots", type=int, help="horizon in slots (events for pool)")
    common.add_argument("--seed", type=int, help="base seed; replication k uses seed + k")
    common.add_argument("--replications", type=int)
    common.add_argument("--burn-in", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--out", help="output CSV path ('-' for stdout)")
    common.add_argument("--config", help="JSON file mirroring the experiment config")
    common.add_argument("--quick", action="store_true", help="scaled-down horizons")

    parser = argparse.ArgumentParser(prog="lookahead-admission", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="one policy at one lambda")
    sub.add_parser("sweep", parents=[common], help="lambda grid x policies")
    dual = sub.add_parser("duality", parents=[common], help="windowed NOB over a grid of windows")
    dual.add_argument("--windows", type=_floats, help="comma list of window sizes")
    pool = sub.add_parser("pool", parents=[common], help="resource pooling simulation")
    pool.add_argument("--n", type=_ints, default=[10], help="comma list of station counts")
    pool.add_argument("--epsilon", type=float, help="redirection slack (default p/5)")
    pool.add_argument("--scheduler", choices=[*SCHEDULERS, "both"], default="threshold")
    val = sub.add_parser("validate", parents=[common], help="run the acceptance criteria")
    val.add_argument("--only", type=_ints, help="comma list of criterion numbers")
    return parser


def make_config(args, defaults: dict | None = None) -> ExperimentConfig:
    """Config file first, then flags on top."""
    data = dataclasses.asdict(ExperimentConfig())
    data.update(defaults or {})
    if args.config:
        try:
            with open(args.config) as fh:
                file_cfg = ExperimentConfig.from_json(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        data.update(dataclasses.asdict(file_cfg))
    if args.quick and not args.config:
        data["horizon_slots"] = QUICK_SLOTS
    overrides = {
        "lambdas": args.lam,
        "p": args.p,
        "policies": args.policy,
        "threshold_L": args.threshold_L,
        "window": args.window,
        "window_c": args.window_c,
        "greedy_K": args.greedy_K,
        "horizon_slots": args.slots,
        "seed_base": args.seed,
        "replications": args.replications,
        "burn_in": args.burn_in,
        "workers": args.workers,
        "output_path": args.out,
    }
    if args.lambda_grid:
        if args.lam:
            raise UsageError("give either --lambda or --lambda-grid")
        overrides["lambdas"] = experiments.parse_lambda_grid(args.lambda_grid)
    data.update({k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "windows", None) is not None:
        data["windows"] = args.windows
    return ExperimentConfig(**data)


def cmd_simulate(args) -> int:
    config = make_config(args)
    if len(config.lambdas) != 1 or len(config.policies) != 1:
        raise UsageError("simulate takes one --lambda and one --policy (use sweep for grids)")
    experiments.write_csv(experiments.sweep(config), config.output_path)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = make_config(args, {"policies": ["threshold", "nob", "nob-window"]})
    experiments.write_csv(experiments.sweep(config), config.output_path)
    return EXIT_OK


def cmd_duality(args) -> int:
    config = make_config(args, {"lambdas": [0.99]})
    rows = experiments.duality_sweep(config)
    experiments.write_csv(rows, config.output_path)
    w = experiments.smallest_feasible_window(rows)
    print(f"smallest feasible window: {'none' if w is None else f'{w:.6g}'}", file=sys.stderr)
    return EXIT_OK


def pool_row(stats, config: PoolingConfig) -> dict:
    fmt = experiments._fmt
    return {
        "n_stations": stats.n_stations,
        "scheduler": stats.scheduler,
        "lambda": fmt(config.params.lam),
        "p": fmt(config.params.p),
        "epsilon": fmt(config.eps),
        "L": fmt(stats.L),
        "horizon_events": config.horizon_events,
        "seed": config.seed,
        "mean_local_queue": fmt(float(stats.mean_local_queue)),
        "mean_central_queue": fmt(float(stats.mean_central_queue)),
        "system_mean_queue": fmt(float(stats.system_mean_queue)),
        "central_rate_in": fmt(float(stats.central_rate_in)),
        "max_station_redirect_rate": fmt(float(stats.per_station_redirect_rates.max())),
        "wasted_central_tokens": stats.wasted_central_tokens,
    }


def cmd_pool(args) -> int:
    config = make_config(args)
    if len(config.lambdas) != 1:
        raise UsageError("pool takes a single --lambda")
    params = ModelParams(config.lambdas[0], config.p)
    events = args.slots or (QUICK_SLOTS if args.quick else 2_000_000)
    schedulers = list(SCHEDULERS) if args.scheduler == "both" else [args.scheduler]
    rows = []
    for n in args.n:
        for sched in schedulers:
            for k in range(config.replications):
                pc = PoolingConfig(n, params, epsilon=args.epsilon, scheduler=sched,
                                   horizon_events=events, seed=config.seed_base + k)
                rows.append(pool_row(run_pooling(pc), pc))
    experiments.write_csv(rows, config.output_path, POOL_COLUMNS)
    return EXIT_OK


def cmd_validate(args) -> int:
    results = validation.run_all(quick=args.quick, only=args.only, echo=print)
    if args.out:
        experiments.write_csv(validation.report_rows(results), args.out, validation.REPORT_COLUMNS)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failed: {', '.join(map(str, failed))}" if failed else ""))
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "duality": cmd_duality,
    "pool": cmd_pool,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for bad flags
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ParameterError, UnsupportedParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
