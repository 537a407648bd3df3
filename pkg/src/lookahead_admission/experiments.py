"""Single runs, lambda sweeps and window sweeps, emitted as CSV rows."""

from __future__ import annotations

import csv
import io
import json
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import analytics
from .deletion import check_feasible, deletion_epochs, multi_delete
from .errors import ParameterError
from .metrics import DEFAULT_BURN_IN, RunResult, time_avg_queue_ci
from .paths import ModelParams, extend_to_time, generate_initial_path
from .policies import KINDS, PolicySpec, apply_policy

CSV_COLUMNS = (
    "policy", "lambda", "p", "L", "w", "horizon_slots", "seed", "avg_queue",
    "del_rate_discrete", "del_rate_continuous", "feasible", "epoch_mean", "error",
)


@dataclass
class ExperimentConfig:
    lambdas: list[float] = field(default_factory=lambda: [0.95])
    p: float = 0.1
    policies: list[str] = field(default_factory=lambda: ["nob"])
    threshold_L: int | None = None
    window: float | None = None
    window_c: float = 2.0
    windows: list[float] | None = None
    horizon_slots: int = 10_000_000
    replications: int = 1
    seed_base: int = 1
    burn_in: int = DEFAULT_BURN_IN
    greedy_K: int = 1
    workers: int = 1
    output_path: str | None = None

    def __post_init__(self):
        if self.replications < 1:
            raise ParameterError("replications must be >= 1")
        if not self.lambdas or any(not (0.0 < x < 1.0) for x in self.lambdas):
            raise ParameterError("lambda values must lie in (0, 1)")
        if not (0.0 < self.p < 1.0):
            raise ParameterError("p must lie in (0, 1)")
        for kind in self.policies:
            if kind not in KINDS:
                raise ParameterError(f"unknown policy {kind!r}")
        if self.horizon_slots < 1:
            raise ParameterError("horizon must be at least one slot")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        if "lambdas" in data and isinstance(data["lambdas"], str):
            data["lambdas"] = parse_lambda_grid(data["lambdas"])
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


_GRID = re.compile(r"^(?P<a>[^:]+):(?P<b>[^:]+):(?P<n>\d+)(?P<kind>log|lin)$")


def _grid_value(text: str) -> float:
    text = text.strip()
    if text.startswith("1-"):
        return 1.0 - float(text[2:])
    return float(text)


def parse_lambda_grid(spec: str) -> list[float]:
    """Parse ``0.9,0.99`` or ``1-1e-1:1-1e-3:5log`` (five log-spaced gaps 1 - lambda)."""
    m = _GRID.match(spec.strip())
    if m is None:
        return [_grid_value(part) for part in spec.split(",") if part.strip()]
    a, b, n = _grid_value(m["a"]), _grid_value(m["b"]), int(m["n"])
    if m["kind"] == "lin":
        return [float(x) for x in np.linspace(a, b, n)]
    gaps = np.geomspace(1.0 - a, 1.0 - b, n)
    return [float(1.0 - g) for g in gaps]


def resolve_policy(kind: str, lam: float, config: ExperimentConfig) -> PolicySpec:
    """Concrete policy for one grid point (fills in L(p, lambda) and w(lambda))."""
    if kind == "threshold":
        L = config.threshold_L or analytics.optimal_threshold(config.p, lam)
        return PolicySpec.threshold(L)
    if kind in ("nob-window", "sigma-window"):
        w = config.window
        if w is None:
            w = analytics.lookahead_window(config.p, lam, config.window_c)
        return PolicySpec(kind, w=w)
    if kind == "greedy":
        return PolicySpec.greedy(config.greedy_K)
    return PolicySpec.nob()


def run_single(params: ModelParams, spec: PolicySpec, horizon_slots: int, seed: int,
               burn_in: int = DEFAULT_BURN_IN, clip: bool = False) -> RunResult:
    """Simulate one replication of one policy and summarise it."""
    if horizon_slots < 1:
        raise ParameterError("horizon must be at least one slot")
    if not (0 <= burn_in < horizon_slots):
        raise ParameterError("burn_in must be below the horizon")
    started = time.perf_counter()
    path = generate_initial_path(params, horizon_slots, seed)
    if spec.kind in ("nob-window", "sigma-window") and not clip:
        path = extend_to_time(path, path.times[horizon_slots] + spec.w)
    M = apply_policy(spec, path, horizon=horizon_slots, clip=clip)
    q_after = multi_delete(path.q[: horizon_slots + 1], M)
    avg, se = time_avg_queue_ci(q_after, burn_in)
    report = check_feasible(path, M, horizon_slots)
    epoch_mean = None
    if spec.kind == "nob" and M.size >= 2:
        epoch_mean = deletion_epochs(q_after, M).mean_length
    return RunResult(
        policy=spec.kind,
        params=params,
        horizon_slots=horizon_slots,
        seed=seed,
        avg_queue=avg,
        avg_queue_se=se,
        deletion_rate_discrete=report.discrete_rate,
        deletion_rate_continuous=report.continuous_rate,
        feasible=report.feasible_flag,
        epoch_mean=epoch_mean,
        L=None if spec.L is None else int(spec.L),
        w=spec.w,
        runtime_ms=int(1000 * (time.perf_counter() - started)),
    )


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else str(x)
    return str(x)


def result_row(r: RunResult) -> dict:
    return {
        "policy": r.policy,
        "lambda": _fmt(r.params.lam),
        "p": _fmt(r.params.p),
        "L": _fmt(r.L),
        "w": _fmt(r.w),
        "horizon_slots": _fmt(r.horizon_slots),
        "seed": _fmt(r.seed),
        "avg_queue": _fmt(r.avg_queue),
        "del_rate_discrete": _fmt(r.deletion_rate_discrete),
        "del_rate_continuous": _fmt(r.deletion_rate_continuous),
        "feasible": _fmt(r.feasible),
        "epoch_mean": _fmt(r.epoch_mean),
        "error": r.error,
    }


def error_row(kind: str, lam: float, p: float, horizon: int, seed: int, exc: Exception, spec=None) -> dict:
    row = dict.fromkeys(CSV_COLUMNS, "")
    row.update(policy=kind, p=_fmt(p), horizon_slots=_fmt(horizon), seed=_fmt(seed),
               error=f"{type(exc).__name__}: {exc}")
    row["lambda"] = _fmt(lam)
    if spec is not None:
        row["L"] = _fmt(None if spec.L is None else int(spec.L))
        row["w"] = _fmt(spec.w)
    return row


def _task(args):
    kind, lam, config, k = args
    seed = config.seed_base + k
    spec = None
    try:
        spec = resolve_policy(kind, lam, config)
        params = ModelParams(lam, config.p)
        burn_in = min(config.burn_in, config.horizon_slots - 1)
        return result_row(run_single(params, spec, config.horizon_slots, seed, burn_in))
    except Exception as exc:  # one bad grid point must not stop the sweep
        return error_row(kind, lam, config.p, config.horizon_slots, seed, exc, spec)


def _run_tasks(tasks, workers: int) -> list[dict]:
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_task, tasks))
    return [_task(t) for t in tasks]


def sweep(config: ExperimentConfig) -> list[dict]:
    """One row per (lambda, policy, replication); replication k uses seed seed_base + k."""
    tasks = [
        (kind, lam, config, k)
        for lam in config.lambdas
        for kind in config.policies
        for k in range(config.replications)
    ]
    return _run_tasks(tasks, config.workers)


def default_windows(p: float, lam: float) -> list[float]:
    base = math.log(1.0 / (1.0 - lam))
    return [0.0] + [float(c * base) for c in np.geomspace(0.5, 256.0, 10)]


def _duality_task(args):
    lam, p, w, horizon, seed, burn_in = args
    params = ModelParams(lam, p)
    spec = PolicySpec.nob() if w is None else PolicySpec.nob_window(w)
    try:
        return result_row(run_single(params, spec, horizon, seed, burn_in, clip=True))
    except Exception as exc:
        return error_row(spec.kind, lam, p, horizon, seed, exc, spec)


def duality_sweep(config: ExperimentConfig) -> list[dict]:
    """Windowed no-job-left-behind over a grid of window sizes, plus the offline row.

    Uses the first lambda of the config.  All rows of one replication share
    the same sample path and windows are clipped at the horizon, so every
    windowed deletion set contains the offline one and average queue length
    is nonincreasing in w.
    """
    lam, p = config.lambdas[0], config.p
    if lam <= 1.0 - p:
        raise ParameterError("window sweep needs lambda > 1 - p")
    windows = config.windows if config.windows is not None else default_windows(p, lam)
    burn_in = min(config.burn_in, config.horizon_slots - 1)
    tasks = []
    for k in range(config.replications):
        seed = config.seed_base + k
        tasks += [(lam, p, float(w), config.horizon_slots, seed, burn_in) for w in sorted(windows)]
        tasks.append((lam, p, None, config.horizon_slots, seed, burn_in))
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_duality_task, tasks))
    return [_duality_task(t) for t in tasks]


def smallest_feasible_window(rows: list[dict]) -> float | None:
    """Smallest w whose row is feasible, if any."""
    ok = [float(r["w"]) for r in rows if r["policy"] == "nob-window" and r["feasible"] == "true"]
    return min(ok) if ok else None


def rows_to_csv(rows, columns=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def write_csv(rows, path, columns=CSV_COLUMNS) -> None:
    text = rows_to_csv(rows, columns)
    if path in (None, "-"):
        print(text, end="")
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
