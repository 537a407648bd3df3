"""Estimators turning simulated queue paths into the quantities the closed forms predict."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .deletion import counting
from .errors import InsufficientDataError
from .paths import ModelParams

DEFAULT_BURN_IN = 10_000
DEFAULT_BATCHES = 100


@dataclass
class RunResult:
    policy: str
    params: ModelParams
    horizon_slots: int
    seed: int
    avg_queue: float
    deletion_rate_discrete: float
    deletion_rate_continuous: float
    feasible: bool
    epoch_mean: float | None = None
    L: int | None = None
    w: float | None = None
    avg_queue_se: float | None = None
    runtime_ms: int = 0
    error: str = ""


@dataclass(frozen=True)
class Histogram:
    counts: np.ndarray
    total: int

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.total

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.counts) / self.total

    def max_cdf_deviation(self, cdf) -> float:
        """Largest |empirical CDF - cdf| over the observed support plus one."""
        k = np.arange(len(self.counts) + 1)
        emp = np.append(self.cdf(), 1.0)
        return float(np.max(np.abs(emp - np.asarray(cdf(k)))))


def _tail(q, burn_in: int) -> np.ndarray:
    q = np.asarray(q)
    N = len(q) - 1
    if not (0 <= burn_in < N):
        raise InsufficientDataError(f"burn_in={burn_in} must be below the horizon {N}")
    return q[burn_in + 1 :]


def time_avg_queue(q, burn_in: int = 0) -> float:
    """Mean of q[burn_in+1..N]."""
    return float(_tail(q, burn_in).mean())


def batch_means(x, n_batches: int = DEFAULT_BATCHES) -> tuple[float, float]:
    """Mean and its batch-means standard error for an autocorrelated series."""
    x = np.asarray(x, dtype=float)
    size = len(x) // n_batches
    if size < 1 or n_batches < 2:
        raise InsufficientDataError("series too short for the requested batches")
    means = x[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(x.mean()), float(means.std(ddof=1) / math.sqrt(n_batches))


def time_avg_queue_ci(q, burn_in: int = 0, n_batches: int = DEFAULT_BATCHES) -> tuple[float, float]:
    return batch_means(_tail(q, burn_in), n_batches)


def empirical_deletion_rate(M, n: int, params: ModelParams) -> tuple[float, float]:
    """Deletions per slot over 1..n, and the same in deletions per unit time."""
    if n < 1:
        raise ValueError("n must be positive")
    discrete = counting(M, n) / n
    return discrete, params.event_rate * discrete


def empirical_distribution(q, burn_in: int = 0) -> Histogram:
    tail = _tail(q, burn_in)
    counts = np.bincount(tail.astype(np.int64))
    return Histogram(counts=counts, total=int(tail.size))


@dataclass(frozen=True)
class TransitionCounts:
    up_at_positive: int
    n_positive: int
    up_at_zero: int
    n_zero: int


def transition_frequencies(q, burn_in: int = 0):
    """Empirical P(step up | q > 0) and P(step up | q = 0), plus raw counts.

    A frequency is NaN when its conditioning state never occurs.
    """
    q = np.asarray(q)
    if len(q) < 2:
        raise InsufficientDataError("need at least two slots")
    start = q[burn_in:-1]
    up = q[burn_in + 1 :] > start
    pos = start > 0
    counts = TransitionCounts(
        up_at_positive=int(np.count_nonzero(up & pos)),
        n_positive=int(np.count_nonzero(pos)),
        up_at_zero=int(np.count_nonzero(up & ~pos)),
        n_zero=int(np.count_nonzero(~pos)),
    )
    f_pos = counts.up_at_positive / counts.n_positive if counts.n_positive else math.nan
    f_zero = counts.up_at_zero / counts.n_zero if counts.n_zero else math.nan
    return f_pos, f_zero, counts


def binomial_se(prob: float, n: int) -> float:
    return math.sqrt(prob * (1.0 - prob) / n)


def lag1_autocorrelation(x) -> float:
    x = np.asarray(x, dtype=float)
    if x.size < 3:
        raise InsufficientDataError("need at least three observations")
    x = x - x.mean()
    return float(np.dot(x[:-1], x[1:]) / np.dot(x, x))


def wasted_tokens(q_after, is_arrival, start: int = 0) -> np.ndarray:
    """Cumulative count of service tokens that met an empty queue, slots start+1..N."""
    q = np.asarray(q_after)
    idle = ~np.asarray(is_arrival)[start + 1 :] & (q[start:-1] == 0)
    return np.cumsum(idle)
