import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lookahead_admission.errors import InsufficientHorizonError, ParameterError
from lookahead_admission.paths import (
    BLOCK_SLOTS,
    ModelParams,
    arrival_slots,
    extend_path,
    extend_to_time,
    format_path,
    generate_initial_path,
    parse_path_text,
    window_size,
    window_sizes,
)

GOLDEN = Path(__file__).parent / "data" / "path_lam0.9_p0.5_n20_seed42.txt"


def test_params_validation():
    for lam, p in [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0), (-0.1, 0.2)]:
        with pytest.raises(ParameterError):
            ModelParams(lam, p)
    mp = ModelParams(0.9, 0.5)
    assert mp.event_rate == pytest.approx(1.4)
    assert mp.up_probability == pytest.approx(0.9 / 1.4)
    assert mp.discrete_budget == pytest.approx(0.35714, abs=1e-5)
    assert mp.heavy_traffic
    assert not ModelParams(0.3, 0.5).heavy_traffic


def test_empty_horizon():
    path = generate_initial_path(ModelParams(0.9, 0.5), 0, 7)
    assert path.q.tolist() == [0]
    assert path.events == []
    assert path.n_slots == 0


def test_golden_path():
    path = generate_initial_path(ModelParams(0.9, 0.5), 20, 42)
    assert format_path(path) == GOLDEN.read_text()
    events, q, times = parse_path_text(GOLDEN.read_text())
    assert events == path.events
    assert q == path.q[1:].tolist()
    np.testing.assert_allclose(times, path.times[1:], rtol=1e-11)


def test_path_invariants():
    path = generate_initial_path(ModelParams(0.7, 0.4), 50_000, 3)
    q = path.q
    assert q[0] == 0 and q.min() >= 0
    d = np.diff(q)
    prev = q[:-1]
    assert np.all(np.abs(d[prev > 0]) == 1)
    assert np.all(np.isin(d[prev == 0], [0, 1]))
    assert np.all(np.diff(path.times[1:]) > 0)
    # arrivals are exactly the increases
    np.testing.assert_array_equal(arrival_slots(path), np.flatnonzero(path.is_arrival))


def test_determinism_and_prefix():
    mp = ModelParams(0.9, 0.5)
    a = generate_initial_path(mp, 1000, 5)
    b = generate_initial_path(mp, 1000, 5)
    assert a.same_as(b)
    assert not a.same_as(generate_initial_path(mp, 1000, 6))
    n = BLOCK_SLOTS + 123
    long = extend_path(a, n)
    assert long.n_slots == n
    np.testing.assert_array_equal(long.q[:1001], a.q)
    np.testing.assert_array_equal(long.times[:1001], a.times)
    assert extend_path(long, 10) is long


def test_extend_to_time():
    path = generate_initial_path(ModelParams(0.9, 0.5), 10, 1)
    far = extend_to_time(path, 500.0)
    assert far.times[-1] > 500.0
    np.testing.assert_array_equal(far.q[:11], path.q)


def test_arrival_fraction_and_gap_mean():
    mp = ModelParams(0.9, 0.5)
    path = generate_initial_path(mp, 1_000_000, 1)
    frac = path.is_arrival[1:].mean()
    assert abs(frac - 0.9 / 1.4) < 0.002
    gaps = np.diff(path.times)
    se = (1 / mp.event_rate) / math.sqrt(gaps.size)
    assert abs(gaps.mean() - 1 / mp.event_rate) < 3 * se


def test_up_frequency_conditioned_on_state():
    mp = ModelParams(0.6, 0.6)  # stable queue: visits 0 often
    path = generate_initial_path(mp, 1_000_000, 2)
    q = path.q
    up = q[1:] > q[:-1]
    target = mp.up_probability
    for mask in (q[:-1] > 0, q[:-1] == 0):
        n = mask.sum()
        se = math.sqrt(target * (1 - target) / n)
        assert abs(up[mask].mean() - target) < 3 * se


def test_arrival_slots_examples():
    assert arrival_slots(np.array([0, 1, 0, 1, 2, 1, 2])).tolist() == [1, 3, 4, 6]
    assert arrival_slots(np.array([0, 0, 0])).tolist() == []


def test_window_size_examples():
    times = np.array([0.0, 1.0, 1.5, 2.0, 4.0])
    assert window_size(times, 1, 1.2) == 2
    assert window_size(times, 1, 0.0) == 0
    assert window_size(times, 1, 0.4) == 0
    with pytest.raises(InsufficientHorizonError):
        window_size(times, 1, 5.0)
    with pytest.raises(IndexError):
        window_size(times, 0, 1.0)


def test_window_sizes_match_scalar():
    path = generate_initial_path(ModelParams(0.9, 0.5), 3000, 4)
    w = 3.7
    W = window_sizes(path.times, w, upto=2500)
    for n in range(1, 2501, 37):
        assert W[n] == window_size(path, n, w)
    with pytest.raises(InsufficientHorizonError):
        window_sizes(path.times, w)
    clipped = window_sizes(path.times, w, clip=True)
    assert clipped[-1] == 0 and np.all(clipped[1:] + np.arange(1, 3001) <= 3000)


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.integers(0, 400), st.integers(0, 2**64 - 1))
def test_generated_paths_satisfy_invariants(lam, p, n, seed):
    path = generate_initial_path(ModelParams(lam, p), n, seed)
    q = path.q
    assert len(q) == n + 1 and q[0] == 0
    expected = np.zeros(n + 1, dtype=np.int64)
    for k in range(1, n + 1):
        expected[k] = expected[k - 1] + 1 if path.is_arrival[k] else max(expected[k - 1] - 1, 0)
    np.testing.assert_array_equal(q, expected)


def test_bad_seed():
    with pytest.raises(ParameterError):
        generate_initial_path(ModelParams(0.5, 0.5), 5, -1)
    with pytest.raises(ParameterError):
        generate_initial_path(ModelParams(0.5, 0.5), -1, 0)
