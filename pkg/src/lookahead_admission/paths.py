"""Initial sample paths: the no-deletion embedded random walk.

Slot ``n`` is the ``n``-th event of the merged arrival / service-token
stream.  Arrays are indexed by slot directly: ``q[0] = 0`` and index 0 of
``is_arrival`` and ``times`` is padding (``False`` and ``0.0``).

Randomness is drawn in fixed-size blocks, block ``b`` coming from its own
PCG64 stream spawned off ``SeedSequence(seed)``.  A path of ``n`` slots is
therefore a prefix of every longer path with the same seed, which is what
makes lazy extension deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientHorizonError, ParameterError

RNG_ALGORITHM = "numpy.PCG64/SeedSequence-spawn"
BLOCK_SLOTS = 1 << 16

ARRIVAL = "A"
TOKEN = "T"


@dataclass(frozen=True)
class ModelParams:
    lam: float
    p: float

    def __post_init__(self):
        if not (0.0 < self.lam < 1.0):
            raise ParameterError(f"lambda must lie in (0, 1), got {self.lam!r}")
        if not (0.0 < self.p < 1.0):
            raise ParameterError(f"p must lie in (0, 1), got {self.p!r}")

    @property
    def event_rate(self) -> float:
        """Total rate of arrivals plus service tokens."""
        return self.lam + 1.0 - self.p

    @property
    def up_probability(self) -> float:
        return self.lam / self.event_rate

    @property
    def heavy_traffic(self) -> bool:
        """True when arrivals outpace the local server (lambda > 1 - p)."""
        return self.lam > 1.0 - self.p

    @property
    def discrete_budget(self) -> float:
        """Largest admissible long-run fraction of slots hosting a deletion."""
        return self.p / self.event_rate


@dataclass(frozen=True, eq=False)
class SamplePath:
    q: np.ndarray
    is_arrival: np.ndarray
    times: np.ndarray
    params: ModelParams
    seed: int
    rng_algorithm: str = field(default=RNG_ALGORITHM)

    @property
    def n_slots(self) -> int:
        return len(self.q) - 1

    @property
    def events(self) -> list[str]:
        """Event tags for slots 1..N."""
        return [ARRIVAL if a else TOKEN for a in self.is_arrival[1:]]

    def same_as(self, other: "SamplePath") -> bool:
        return (
            self.params == other.params
            and self.seed == other.seed
            and np.array_equal(self.q, other.q)
            and np.array_equal(self.is_arrival, other.is_arrival)
            and np.array_equal(self.times, other.times)
        )


def _check_seed(seed) -> int:
    seed = int(seed)
    if not (0 <= seed < 2**64):
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _draw_blocks(seed: int, n_slots: int, up: float):
    n_blocks = -(-n_slots // BLOCK_SLOTS)
    streams = np.random.SeedSequence(seed).spawn(n_blocks)
    tags = np.empty(n_blocks * BLOCK_SLOTS, dtype=bool)
    gaps = np.empty(n_blocks * BLOCK_SLOTS, dtype=np.float64)
    for b, ss in enumerate(streams):
        rng = np.random.Generator(np.random.PCG64(ss))
        sl = slice(b * BLOCK_SLOTS, (b + 1) * BLOCK_SLOTS)
        tags[sl] = rng.random(BLOCK_SLOTS) < up
        gaps[sl] = rng.standard_exponential(BLOCK_SLOTS)
    return tags[:n_slots], gaps[:n_slots]


def reflect(steps: np.ndarray, start: int = 0) -> np.ndarray:
    """Queue lengths for a walk of +1/0/-1 steps reflected at zero.

    Returns an array of length ``len(steps) + 1`` whose first entry is ``start``.
    """
    z = np.empty(len(steps) + 1, dtype=np.int64)
    z[0] = start
    np.cumsum(steps, out=z[1:])
    z[1:] += start
    low = np.minimum.accumulate(z)
    np.minimum(low, 0, out=low)
    return z - low


def queue_from_events(is_arrival: np.ndarray) -> np.ndarray:
    steps = np.where(is_arrival[1:], 1, -1).astype(np.int64)
    return reflect(steps)


def generate_initial_path(params: ModelParams, n_slots: int, seed: int) -> SamplePath:
    """Sample ``n_slots`` events of the no-deletion queue.

    Each slot is an arrival with probability lambda / (lambda + 1 - p) and is
    separated from the previous event by an exponential gap of rate
    lambda + 1 - p.
    """
    if not isinstance(params, ModelParams):
        raise ParameterError("params must be a ModelParams instance")
    n_slots = int(n_slots)
    if n_slots < 0:
        raise ParameterError("n_slots must be nonnegative")
    seed = _check_seed(seed)

    is_arrival = np.zeros(n_slots + 1, dtype=bool)
    times = np.zeros(n_slots + 1, dtype=np.float64)
    if n_slots:
        tags, gaps = _draw_blocks(seed, n_slots, params.up_probability)
        is_arrival[1:] = tags
        np.cumsum(gaps / params.event_rate, out=times[1:])
    q = queue_from_events(is_arrival)
    for arr in (q, is_arrival, times):
        arr.flags.writeable = False
    return SamplePath(q=q, is_arrival=is_arrival, times=times, params=params, seed=seed)


def extend_path(path: SamplePath, n_slots: int) -> SamplePath:
    """Return the same path grown to ``n_slots`` slots (prefix is unchanged)."""
    if n_slots <= path.n_slots:
        return path
    return generate_initial_path(path.params, n_slots, path.seed)


def extend_to_time(path: SamplePath, t: float) -> SamplePath:
    """Grow ``path`` until its last event time strictly exceeds ``t``."""
    n = max(path.n_slots, 16)
    while path.times[-1] <= t:
        # expected slots to cover t, with 10% slack
        n = max(2 * n, int(1.1 * t * path.params.event_rate) + 64)
        path = extend_path(path, n)
    return path


def arrival_slots(path_or_q) -> np.ndarray:
    """Slots n >= 1 where the queue increases, as a sorted int array."""
    q = path_or_q.q if isinstance(path_or_q, SamplePath) else np.asarray(path_or_q)
    return np.flatnonzero(q[1:] > q[:-1]) + 1


def window_size(times, n: int, w: float) -> int:
    """Largest k with ``T[n+k] <= T[n] + w``.

    ``times`` is either a SamplePath or a slot-indexed array of event times
    (entry 0 is T_0).  Raises InsufficientHorizonError when every available
    future event still falls inside the window.
    """
    t = times.times if isinstance(times, SamplePath) else np.asarray(times, dtype=float)
    last = len(t) - 1
    if not (1 <= n <= last):
        raise IndexError(f"slot {n} outside 1..{last}")
    if w < 0:
        raise ParameterError("window must be nonnegative")
    if w == 0:
        return 0
    j = int(np.searchsorted(t, t[n] + w, side="right")) - 1
    if j >= last:
        raise InsufficientHorizonError(
            f"window of slot {n} reaches past the last generated event (slot {last})"
        )
    return j - n


def window_sizes(times: np.ndarray, w: float, upto: int | None = None, clip: bool = False) -> np.ndarray:
    """Vectorised ``window_size`` for slots 1..upto (entry 0 is unused).

    With ``clip=True`` windows running past the last event are cut at the end
    of the path instead of raising.
    """
    t = np.asarray(times, dtype=float)
    last = len(t) - 1
    upto = last if upto is None else int(upto)
    if w == 0:
        return np.zeros(upto + 1, dtype=np.int64)
    ends = np.searchsorted(t, t[1 : upto + 1] + w, side="right") - 1
    if ends.size and ends[-1] >= last and not clip:
        bad = int(np.argmax(ends >= last)) + 1
        raise InsufficientHorizonError(
            f"window of slot {bad} reaches past the last generated event (slot {last})"
        )
    out = np.zeros(upto + 1, dtype=np.int64)
    out[1:] = np.minimum(ends, last) - np.arange(1, upto + 1)
    return out


def format_path(path: SamplePath) -> str:
    """Plain-text dump, one ``index,event,q,time`` line per slot."""
    lines = [
        f"{n},{ARRIVAL if path.is_arrival[n] else TOKEN},{int(path.q[n])},{path.times[n]:.12g}"
        for n in range(1, path.n_slots + 1)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_path_text(text: str) -> tuple[list[str], list[int], list[float]]:
    events, q, times = [], [], []
    for line in text.splitlines():
        if not line.strip():
            continue
        _, ev, qn, tn = line.split(",")
        events.append(ev)
        q.append(int(qn))
        times.append(float(tn))
    return events, q, times
