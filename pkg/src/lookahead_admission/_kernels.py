"""Compiled inner loops.  Inputs are slot-indexed numpy arrays."""

import numpy as np
from numba import njit


@njit(cache=True)
def threshold_run(is_arrival, L):
    n = len(is_arrival) - 1
    q = np.zeros(n + 1, dtype=np.int64)
    deleted = np.zeros(n + 1, dtype=np.bool_)
    c = 0
    for k in range(1, n + 1):
        if is_arrival[k]:
            if c >= L:
                deleted[k] = True
            else:
                c += 1
        elif c > 0:
            c -= 1
        q[k] = c
    return q, deleted


@njit(cache=True)
def next_lower(q):
    """For each slot n, the first t > n with q[t] < q[n] (len(q) if none)."""
    n = len(q)
    out = np.full(n, n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    top = 0
    for t in range(n):
        while top > 0 and q[t] < q[stack[top - 1]]:
            top -= 1
            out[stack[top]] = t
        stack[top] = t
        top += 1
    return out


@njit(cache=True)
def pooling_run(n_stations, lam, p, L, scheduler, n_events, seed):
    """Merged-stream simulation of N local queues plus a central server.

    scheduler 0 = longest-queue-first fetch, 1 = distributed threshold with a
    FIFO central queue.  Returns (elapsed time, integral of total local
    queue, integral of central queue, per-station redirect counts, central
    tokens that found no job to serve).
    """
    np.random.seed(seed)
    rate_arr = n_stations * lam
    rate_tok = n_stations * (1.0 - p)
    rate_cen = n_stations * p
    total = rate_arr + rate_tok + rate_cen
    cut_arr = rate_arr / total
    cut_tok = (rate_arr + rate_tok) / total

    local = np.zeros(n_stations, dtype=np.int64)
    redirects = np.zeros(n_stations, dtype=np.int64)
    local_sum = 0
    central = 0
    t = 0.0
    local_area = 0.0
    central_area = 0.0
    wasted = 0
    for _ in range(n_events):
        dt = np.random.exponential(1.0 / total)
        local_area += dt * local_sum
        central_area += dt * central
        t += dt
        u = np.random.random()
        i = np.random.randint(0, n_stations)
        if u < cut_arr:
            if scheduler == 1 and local[i] >= L:
                redirects[i] += 1
                central += 1
            else:
                local[i] += 1
                local_sum += 1
        elif u < cut_tok:
            if local[i] > 0:
                local[i] -= 1
                local_sum -= 1
        else:
            if scheduler == 0:
                if local_sum > 0:
                    # argmax returns the lowest index among ties
                    j = np.argmax(local)
                    local[j] -= 1
                    local_sum -= 1
                else:
                    wasted += 1
            elif central > 0:
                central -= 1
            else:
                wasted += 1
    return t, local_area, central_area, redirects, wasted
