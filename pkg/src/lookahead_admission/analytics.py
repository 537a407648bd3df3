"""Closed-form performance of the threshold and no-job-left-behind policies.

theta = lambda / (1 - p) is the ratio of arrival to local service rate.
Under an L-threshold rule the queue is a birth-death chain truncated at L,
so its law is geometric in theta on {0..L}.  After no-job-left-behind
deletions the queue is a random walk whose stationary law is geometric
with ratio (1 - p) / lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedParameterError

_THETA_EPS = 1e-12


def _theta(p: float, lam: float) -> float:
    if not (0.0 < p < 1.0 and 0.0 < lam < 1.0):
        raise UnsupportedParameterError(f"need 0 < p, lambda < 1 (p={p}, lambda={lam})")
    theta = lam / (1.0 - p)
    if abs(theta - 1.0) < _THETA_EPS:
        raise UnsupportedParameterError("closed forms are undefined at lambda == 1 - p")
    return theta


@dataclass(frozen=True)
class ThresholdModel:
    p: float
    lam: float
    L: int

    def __post_init__(self):
        if self.L < 1:
            raise UnsupportedParameterError("L must be a positive integer")
        _theta(self.p, self.lam)

    @property
    def theta(self) -> float:
        return self.lam / (1.0 - self.p)


@dataclass(frozen=True)
class NOBModel:
    p: float
    lam: float

    def __post_init__(self):
        if not (0.0 < self.p < 1.0 and 0.0 < self.lam < 1.0) or self.lam <= 1.0 - self.p:
            raise UnsupportedParameterError("no-job-left-behind formulas need 1 - p < lambda < 1")

    @property
    def ratio(self) -> float:
        """Geometric ratio (1 - p) / lambda of the post-deletion queue."""
        return (1.0 - self.p) / self.lam


def _log_weights(theta: float, L: int) -> np.ndarray:
    """log of theta**i / sum_{j<=L} theta**j for i = 0..L, overflow-safe."""
    i = np.arange(L + 1, dtype=float)
    a = i * math.log(theta)
    top = a.max()
    return a - (top + math.log(np.exp(a - top).sum()))


def threshold_distribution(model: ThresholdModel) -> np.ndarray:
    """Stationary probabilities of queue lengths 0..L."""
    return np.exp(_log_weights(model.theta, model.L))


def threshold_steady_state(model: ThresholdModel, i: int) -> float:
    """Probability that the queue holds ``i`` jobs under the L-threshold rule."""
    if i < 0:
        raise ValueError("queue length must be nonnegative")
    if i > model.L:
        return 0.0
    theta, L = model.theta, model.L
    if (L + 1) * abs(math.log(theta)) < 700:
        return theta**i * (1.0 - theta) / (1.0 - theta ** (L + 1))
    return float(np.exp(_log_weights(theta, L)[i]))


def threshold_queue_mean(model: ThresholdModel) -> float:
    theta, L = model.theta, model.L
    if (L + 1) * abs(math.log(theta)) < 700:
        tL = theta**L
        return theta / ((theta - 1.0) * (theta * tL - 1.0)) * (1.0 - tL + L * tL * (theta - 1.0))
    mu = threshold_distribution(model)
    return float(np.dot(np.arange(L + 1), mu))


def threshold_deletion_rate(model: ThresholdModel) -> float:
    """Continuous-time deletion rate: lambda times the mass at L."""
    return model.lam * threshold_steady_state(model, model.L)


def optimal_threshold(p: float, lam: float, budget: float | None = None) -> int:
    """Threshold ceil(log_theta(x / (x - (lambda - (1 - p))))) for budget x.

    With the default budget x = p this is ceil(log_theta(p / (1 - lambda))),
    the asymptotically optimal feasible online threshold.  It always sits one
    above ``smallest_feasible_threshold``.
    """
    x = p if budget is None else budget
    excess = lam - (1.0 - p)
    if excess <= 0.0 or lam >= 1.0:
        raise UnsupportedParameterError("optimal threshold needs 1 - p < lambda < 1")
    if not (excess < x):
        raise UnsupportedParameterError("budget must exceed the unavoidable rate lambda - (1 - p)")
    theta = _theta(p, lam)
    return max(1, math.ceil(math.log(x / (x - excess)) / math.log(theta)))


def smallest_feasible_threshold(p: float, lam: float, budget: float | None = None, max_L: int = 100_000) -> int:
    """Smallest L >= 1 whose deletion rate is within ``budget`` (default p), by search."""
    x = p if budget is None else budget
    for L in range(1, max_L + 1):
        if threshold_deletion_rate(ThresholdModel(p, lam, L)) <= x:
            return L
    raise UnsupportedParameterError(f"no threshold up to {max_L} meets the budget")


def nob_queue_mean(model: NOBModel) -> float:
    return (1.0 - model.p) / (model.lam - (1.0 - model.p))


def nob_steady_state(model: NOBModel, i: int) -> float:
    if i < 0:
        raise ValueError("queue length must be nonnegative")
    r = model.ratio
    return (1.0 - r) * r**i


def nob_cdf(model: NOBModel, i) -> np.ndarray:
    """P(Q <= i) for the post-deletion stationary law."""
    return 1.0 - model.ratio ** (np.asarray(i, dtype=float) + 1.0)


def nob_epoch_mean(model: NOBModel) -> float:
    """Mean number of slots between consecutive deletions."""
    return (model.lam + 1.0 - model.p) / (model.lam - (1.0 - model.p))


def nob_deletion_rate(model: NOBModel) -> float:
    """Continuous-time deletion rate lambda - (1 - p)."""
    return model.lam - (1.0 - model.p)


def post_nob_up_probability(p: float, lam: float) -> float:
    return (1.0 - p) / (lam + 1.0 - p)


def lookahead_window(p: float, lam: float, c: float) -> float:
    """Window c * ln(1 / (1 - lambda)) in continuous time units."""
    if not (0.0 <= lam < 1.0) or c <= 0.0:
        raise UnsupportedParameterError("need 0 <= lambda < 1 and c > 0")
    return c * math.log(1.0 / (1.0 - lam))


def delay_metrics(C: float, lam: float, r_d: float) -> tuple[float, float]:
    """Little's-law delays: over all jobs and over admitted jobs only."""
    if not (lam > r_d >= 0.0):
        raise ZeroDivisionError("need lambda > r_d >= 0")
    return C / lam, C / (lam - r_d)


def online_scaling(p: float, lam: float) -> float:
    """Heavy-traffic online delay scale log_{1/(1-p)}(1/(1-lambda))."""
    return math.log(1.0 / (1.0 - lam)) / math.log(1.0 / (1.0 - p))
