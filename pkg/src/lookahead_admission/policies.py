"""Deletion policies.

Every policy maps a sample path (plus parameters) to a sorted array of
deletion slots:

* ``threshold_policy``  online: delete an arrival iff the current
  post-deletion queue is already at ``L``;
* ``nob_offline``       no-job-left-behind, one reverse scan;
* ``nob_reference``     the same set straight from its definition (slow oracle);
* ``nob_window``        no-job-left-behind restricted to a window of ``w``
  time units;
* ``sigma_window``      the epoch-wise relaxation of ``nob_window``;
* ``greedy_delete``     finite-horizon greedy area minimisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .deletion import multi_delete
from .errors import ParameterError
from .paths import SamplePath, arrival_slots, window_sizes

NO_THRESHOLD = math.inf

KINDS = ("threshold", "nob", "nob-window", "sigma-window", "greedy")


@dataclass(frozen=True)
class PolicySpec:
    """Tagged policy choice.  Only the fields relevant to ``kind`` are used."""

    kind: str
    L: float | None = None
    w: float | None = None
    horizon: int | None = None
    K: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown policy kind {self.kind!r}")
        if self.kind == "threshold" and (self.L is None or self.L < 1):
            raise ParameterError("threshold policy needs L >= 1")
        if self.kind in ("nob-window", "sigma-window") and (self.w is None or self.w < 0):
            raise ParameterError(f"{self.kind} needs a window w >= 0")
        if self.kind == "greedy" and (self.K is None or self.K < 0):
            raise ParameterError("greedy policy needs a budget K >= 0")

    @classmethod
    def threshold(cls, L):
        return cls("threshold", L=L)

    @classmethod
    def nob(cls):
        return cls("nob")

    @classmethod
    def nob_window(cls, w):
        return cls("nob-window", w=w)

    @classmethod
    def sigma_window(cls, w):
        return cls("sigma-window", w=w)

    @classmethod
    def greedy(cls, K, horizon=None):
        return cls("greedy", K=K, horizon=horizon)

    @property
    def label(self) -> str:
        return self.kind


def _q(path_or_q) -> np.ndarray:
    return path_or_q.q if isinstance(path_or_q, SamplePath) else np.asarray(path_or_q, dtype=np.int64)


def threshold_policy(path: SamplePath, L) -> np.ndarray:
    """Online threshold rule run on the live (post-deletion) queue."""
    if L < 1:
        raise ParameterError("L must be >= 1")
    if math.isinf(L):
        return np.empty(0, dtype=np.int64)
    _, deleted = _kernels.threshold_run(np.asarray(path.is_arrival), int(L))
    return np.flatnonzero(deleted).astype(np.int64)


def threshold_queue(path: SamplePath, L) -> tuple[np.ndarray, np.ndarray]:
    """Threshold deletions together with the resulting queue-length path."""
    if math.isinf(L):
        return path.q.copy(), np.empty(0, dtype=np.int64)
    q, deleted = _kernels.threshold_run(np.asarray(path.is_arrival), int(L))
    return q, np.flatnonzero(deleted).astype(np.int64)


def nob_reference(path_or_q) -> np.ndarray:
    """Arrivals after which the path never drops below its current level.

    Quadratic; the horizon is treated as if the path stayed above its last
    value forever after.
    """
    q = _q(path_or_q)
    N = len(q) - 1
    if N < 64:
        # plain lists are much faster than numpy slices on short paths
        ql = q.tolist()
        return np.asarray(
            [n for n in range(1, N + 1) if ql[n] > ql[n - 1] and (n == N or min(ql[n + 1 :]) >= ql[n])],
            dtype=np.int64,
        )
    out = []
    for n in arrival_slots(q):
        if n == N or q[n + 1 :].min() >= q[n]:
            out.append(n)
    return np.asarray(out, dtype=np.int64)


def nob_offline(path_or_q) -> np.ndarray:
    """No-job-left-behind deletions by a single reverse scan.

    Walking back from the horizon, every slot where the path reaches a new
    running minimum marks a deletion in the following slot.  Slot 0 is
    included in the scan so that an initial climb which never returns to 0
    is deleted from slot 1 on.
    """
    q = _q(path_or_q)
    if len(q) < 2:
        return np.empty(0, dtype=np.int64)
    # suffix minimum of q[n+1..N] for n = 0..N-1
    later_min = np.minimum.accumulate(q[:0:-1])[::-1]
    hits = np.flatnonzero(q[:-1] < later_min)
    return (hits + 1).astype(np.int64)


def _horizon(path: SamplePath, horizon) -> int:
    H = path.n_slots if horizon is None else int(horizon)
    if not (0 <= H <= path.n_slots):
        raise ValueError(f"horizon {H} outside 0..{path.n_slots}")
    return H


def nob_window(path: SamplePath, w: float, horizon: int | None = None, clip: bool = False) -> np.ndarray:
    """No-job-left-behind judged only on the next ``w`` time units.

    Decides slots 1..horizon (default: the whole path).  An arrival in slot
    n is deleted unless the no-deletion path falls below q[n] within slots
    n+1..n+W(n).  Raises InsufficientHorizonError when a window runs past
    the generated path; ``clip=True`` cuts such windows at the last slot
    instead, which is the offline horizon convention.
    """
    if w < 0:
        raise ParameterError("window must be nonnegative")
    H = _horizon(path, horizon)
    W = window_sizes(path.times, w, upto=H, clip=clip)
    drop = _kernels.next_lower(np.asarray(path.q))
    arr = arrival_slots(path.q[: H + 1])
    return arr[drop[arr] > arr + W[arr]]


def sigma_window(path: SamplePath, w: float, horizon: int | None = None, clip: bool = False) -> np.ndarray:
    """Epoch-wise relaxation of the windowed policy.

    Epochs are those of ``nob_offline`` on slots 1..horizon, the last one
    closed at horizon + 1.  If epoch [m_i, m_{i+1}) fits inside the window
    of its first slot only m_i is deleted, otherwise every arrival in the
    epoch is.  Arrivals before the first deletion are kept.
    """
    if w < 0:
        raise ParameterError("window must be nonnegative")
    H = _horizon(path, horizon)
    M = nob_offline(path.q[: H + 1])
    if M.size == 0:
        return M
    W = window_sizes(path.times, w, upto=H, clip=clip)
    ends = np.append(M[1:], H + 1)
    long_epochs = (ends - M) > W[M]
    span = np.zeros(H + 2, dtype=np.int64)
    np.add.at(span, M[long_epochs], 1)
    np.add.at(span, ends[long_epochs], -1)
    inside = np.cumsum(span)[: H + 1] > 0
    keep = inside & path.is_arrival[: H + 1]
    keep[M] = True
    return np.flatnonzero(keep).astype(np.int64)


def marginal_decrease(q, N: int) -> np.ndarray:
    """Area reduction over 1..N from deleting at each slot (0 where not an arrival)."""
    q = np.asarray(q, dtype=np.int64)
    idx = np.arange(N + 2)
    zero_at = np.where(np.append(q[: N + 1], 0) == 0, idx, N + 1)
    next_zero = np.minimum.accumulate(zero_at[::-1])[::-1]
    gain = np.zeros(N + 1, dtype=np.int64)
    arr = arrival_slots(q[: N + 1])
    gain[arr] = next_zero[arr] - arr
    return gain


def greedy_delete(path_or_q, N: int | None = None, K: int = 0) -> np.ndarray:
    """Greedy finite-horizon deletion of ``K`` jobs.

    Each step deletes the arrival with the largest drop in sum(q[1..N]),
    which is the first arrival of a longest busy period; ties go to the
    earliest slot.  Stops early when no arrival is left in 1..N.
    """
    q0 = _q(path_or_q)
    N = len(q0) - 1 if N is None else int(N)
    if N > len(q0) - 1:
        raise ValueError("horizon exceeds path length")
    if K < 0:
        raise ParameterError("K must be nonnegative")
    chosen: list[int] = []
    q = q0
    for _ in range(K):
        gain = marginal_decrease(q, N)
        if not gain.any():
            break
        chosen.append(int(np.argmax(gain)))
        q = multi_delete(q0, chosen)
    return np.asarray(sorted(chosen), dtype=np.int64)


def apply_policy(spec: PolicySpec, path: SamplePath, horizon: int | None = None, clip: bool = False) -> np.ndarray:
    """Deletions of ``spec`` on slots 1..horizon of ``path``.

    Window policies may read slots past ``horizon``; the others see only the
    first ``horizon`` slots.
    """
    H = _horizon(path, horizon)
    if spec.kind == "threshold":
        M = threshold_policy(path, spec.L)
        return M[M <= H]
    if spec.kind == "nob":
        return nob_offline(path.q[: H + 1])
    if spec.kind == "nob-window":
        return nob_window(path, spec.w, horizon=horizon, clip=clip)
    if spec.kind == "sigma-window":
        return sigma_window(path, spec.w, horizon=horizon, clip=clip)
    return greedy_delete(path.q[: H + 1], spec.horizon, spec.K)
