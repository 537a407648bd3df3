"""Deletion maps, feasibility and renewal decompositions.

A deletion sequence is a strictly increasing int array of arrival slots.
Removing a job at its arrival instant leaves every later service token in
place, so the post-deletion queue is the event stream replayed with the
deleted arrivals turned into no-ops; ``multi_delete`` does exactly that in
one vectorised pass.  ``point_delete`` keeps the literal slot-by-slot rule
and serves as the cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, InvalidDeletionError
from .paths import SamplePath, reflect


def as_deletions(M) -> np.ndarray:
    """Sorted int64 array of deletion slots; rejects duplicates and slots < 1."""
    arr = np.sort(np.asarray(list(M) if not isinstance(M, np.ndarray) else M, dtype=np.int64))
    if arr.size and arr[0] < 1:
        raise InvalidDeletionError("deletion slots must be >= 1")
    if arr.size > 1 and np.any(arr[1:] == arr[:-1]):
        raise InvalidDeletionError("duplicate deletion slot")
    return arr


def counting(M, n: int) -> int:
    """Number of deletions in slots 1..n."""
    arr = np.asarray(M, dtype=np.int64)
    return int(np.count_nonzero((arr >= 1) & (arr <= n)))


def point_delete(q, m: int) -> np.ndarray:
    """Delete the arrival in slot ``m``: lower q[n] for n >= m until q first hits 0."""
    q = np.array(q, dtype=np.int64)
    if not (1 <= m < len(q)) or q[m] <= q[m - 1]:
        raise InvalidDeletionError(f"slot {m} is not an arrival")
    out = q.copy()
    for n in range(m, len(q)):
        if q[n] <= 0:
            break
        out[n] -= 1
    return out


def _steps(q: np.ndarray) -> np.ndarray:
    d = np.diff(q)
    return np.where(d > 0, 1, -1).astype(np.int64)


def multi_delete(q, M) -> np.ndarray:
    """Post-deletion queue after removing every arrival listed in ``M``.

    Equal to folding ``point_delete`` over ``M`` in any order.
    """
    q = np.asarray(q, dtype=np.int64)
    M = as_deletions(M)
    if M.size == 0:
        return q.copy()
    if M[-1] >= len(q):
        raise InvalidDeletionError(f"slot {int(M[-1])} beyond path length {len(q) - 1}")
    steps = _steps(q)
    if np.any(steps[M - 1] != 1):
        bad = int(M[np.flatnonzero(steps[M - 1] != 1)[0]])
        raise InvalidDeletionError(f"slot {bad} is not an arrival")
    steps[M - 1] = 0
    return reflect(steps, int(q[0]))


def apply_deletions(path: SamplePath, M) -> np.ndarray:
    return multi_delete(path.q, M)


def partial_sum(q, n: int) -> int:
    """Sum of q[1..n]."""
    q = np.asarray(q, dtype=np.int64)
    if n > len(q) - 1:
        raise IndexError(f"n={n} beyond length {len(q) - 1}")
    return int(q[1 : n + 1].sum())


@dataclass(frozen=True)
class FeasibilityReport:
    discrete_rate: float
    continuous_rate: float
    bound: float
    feasible_flag: bool
    slack_sigmas: float


def check_feasible(path: SamplePath, M, horizon: int | None = None) -> FeasibilityReport:
    """Finite-horizon stand-in for the long-run deletion-rate constraint.

    Feasible when the observed fraction of deleting slots is at most the
    budget p / (lambda + 1 - p) plus three binomial standard errors.
    ``slack_sigmas`` is (bound - rate) / SE, positive when under budget.
    """
    horizon = path.n_slots if horizon is None else int(horizon)
    if horizon > path.n_slots:
        raise ValueError("horizon exceeds path length")
    if horizon < 1:
        raise ValueError("horizon must be positive")
    rate = counting(M, horizon) / horizon
    bound = path.params.discrete_budget
    se = math.sqrt(bound * (1.0 - bound) / horizon)
    return FeasibilityReport(
        discrete_rate=rate,
        continuous_rate=path.params.event_rate * rate,
        bound=bound,
        feasible_flag=rate <= bound + 3.0 * se,
        slack_sigmas=(bound - rate) / se,
    )


@dataclass(frozen=True)
class BusyPeriod:
    l: int
    u: int

    def __len__(self):
        return self.u - self.l + 1


def busy_periods(q) -> list[BusyPeriod]:
    """Maximal runs {l..u} with q[l-1] = q[u] = 0 and q > 0 strictly inside.

    A run still open at the horizon is closed at the last slot.
    """
    q = np.asarray(q)
    pos = np.concatenate(([False], q[1:] > 0, [False]))
    edges = np.flatnonzero(pos[1:] != pos[:-1])
    starts, ends = edges[0::2] + 1, edges[1::2] + 1
    last = len(q) - 1
    return [BusyPeriod(int(l), int(min(u, last))) for l, u in zip(starts, ends)]


@dataclass(frozen=True)
class EpochStats:
    boundaries: np.ndarray
    lengths: np.ndarray
    areas: np.ndarray

    @property
    def mean_length(self) -> float:
        return float(self.lengths.mean())

    def lag1_autocorrelation(self) -> float:
        from .metrics import lag1_autocorrelation

        return lag1_autocorrelation(self.lengths)


def deletion_epochs(q_after, M) -> EpochStats:
    """Epoch lengths m_{i+1} - m_i and the post-deletion area over each epoch.

    The stretch after the last deletion is incomplete and dropped.
    """
    M = as_deletions(M)
    if M.size < 2:
        raise InsufficientDataError("need at least two deletions to form an epoch")
    q_after = np.asarray(q_after, dtype=np.int64)
    csum = np.concatenate(([0], np.cumsum(q_after)))
    # area over slots m_i .. m_{i+1}-1
    areas = csum[M[1:]] - csum[M[:-1]]
    return EpochStats(boundaries=M, lengths=np.diff(M), areas=areas)


def shift_to_first_deletion(q_after, M) -> np.ndarray:
    """The post-deletion path re-indexed so that slot 0 is the first deletion."""
    M = as_deletions(M)
    if M.size == 0:
        raise InsufficientDataError("no deletions")
    return np.asarray(q_after)[M[0] :]
