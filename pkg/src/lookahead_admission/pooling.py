"""Resource pooling: N local stations plus one shared central server.

Each station sees Poisson(lambda) arrivals and a rate 1 - p local server;
the central server runs at rate pN.  Two ways to use the central capacity:

``lqf``        the central server takes a job from the longest local queue
               (lowest station index on ties);
``threshold``  each station runs the same threshold admission rule with
               redirection budget p - epsilon and sends the jobs it deletes
               to a first-in-first-out central queue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .analytics import smallest_feasible_threshold
from .errors import ParameterError
from .paths import ModelParams

SCHEDULERS = {"lqf": 0, "threshold": 1}


@dataclass(frozen=True)
class PoolingConfig:
    n_stations: int
    params: ModelParams
    epsilon: float | None = None
    scheduler: str = "threshold"
    horizon_events: int = 2_000_000
    seed: int = 0
    L: int | None = None

    def __post_init__(self):
        if self.n_stations < 1:
            raise ParameterError("need at least one station")
        if self.scheduler not in SCHEDULERS:
            raise ParameterError(f"scheduler must be one of {sorted(SCHEDULERS)}")
        if not (0.0 < self.eps < self.params.p):
            raise ParameterError("epsilon must lie in (0, p)")
        if self.horizon_events < 1:
            raise ParameterError("horizon_events must be positive")

    @property
    def eps(self) -> float:
        return self.params.p / 5.0 if self.epsilon is None else self.epsilon

    @property
    def threshold(self) -> int:
        """Per-station threshold: the smallest one meeting the budget p - epsilon."""
        if self.L is not None:
            return self.L
        return smallest_feasible_threshold(self.params.p, self.params.lam, budget=self.params.p - self.eps)


@dataclass
class PoolingStats:
    n_stations: int
    scheduler: str
    seed: int
    L: int | None
    mean_local_queue: float
    mean_central_queue: float
    central_rate_in: float
    per_station_redirect_rates: np.ndarray
    wasted_central_tokens: int
    elapsed_time: float

    @property
    def system_mean_queue(self) -> float:
        """Jobs in the whole system per station."""
        return self.mean_local_queue + self.mean_central_queue / self.n_stations

    def redirect_rate_se(self) -> float:
        """Standard error of one station's redirect rate.

        Deletions come in bursts, so counts are overdispersed against
        Poisson; with several stations the spread across them (identically
        distributed replicates) is used instead.
        """
        rates = self.per_station_redirect_rates
        if rates.size >= 2:
            return float(rates.std(ddof=1))
        return math.sqrt(max(float(rates.mean()), 0.0) / self.elapsed_time)


def run_pooling(config: PoolingConfig) -> PoolingStats:
    lam, p = config.params.lam, config.params.p
    sched = SCHEDULERS[config.scheduler]
    L = config.threshold if sched == 1 else 0
    t, local_area, central_area, redirects, wasted = _kernels.pooling_run(
        config.n_stations, lam, p, L, sched, int(config.horizon_events), int(config.seed) % 2**32
    )
    rates = redirects / t
    return PoolingStats(
        n_stations=config.n_stations,
        scheduler=config.scheduler,
        seed=config.seed,
        L=L if sched == 1 else None,
        mean_local_queue=local_area / t / config.n_stations,
        mean_central_queue=central_area / t,
        central_rate_in=float(redirects.sum() / t),
        per_station_redirect_rates=rates,
        wasted_central_tokens=int(wasted),
        elapsed_time=float(t),
    )
