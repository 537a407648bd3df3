import itertools
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lookahead_admission.deletion import (
    as_deletions,
    busy_periods,
    check_feasible,
    counting,
    deletion_epochs,
    multi_delete,
    partial_sum,
    point_delete,
    shift_to_first_deletion,
)
from lookahead_admission.errors import InsufficientDataError, InvalidDeletionError
from lookahead_admission.metrics import wasted_tokens
from lookahead_admission.paths import ModelParams, arrival_slots, generate_initial_path
from lookahead_admission.policies import nob_offline

from conftest import q_from_steps

Q7 = np.array([0, 1, 0, 1, 2, 1, 2])

steps = st.lists(st.sampled_from([1, -1]), min_size=1, max_size=30)


def test_counting():
    assert counting([3, 6], 5) == 1
    assert counting([3, 6], 6) == 2
    assert counting([], 100) == 0
    assert counting([3, 6], 0) == 0


def test_point_delete_examples():
    assert point_delete([0, 1, 2, 1, 0, 1], 1).tolist() == [0, 0, 1, 0, 0, 1]
    assert point_delete([0, 1], 1).tolist() == [0, 0]
    assert point_delete([0, 1, 0, 1], 3).tolist() == [0, 1, 0, 0]
    with pytest.raises(InvalidDeletionError):
        point_delete([0, 1, 0, 1], 2)


def test_multi_delete_examples():
    assert multi_delete(Q7, [3, 6]).tolist() == [0, 1, 0, 0, 1, 0, 0]
    assert multi_delete(Q7, [6, 3]).tolist() == [0, 1, 0, 0, 1, 0, 0]
    np.testing.assert_array_equal(multi_delete(Q7, []), Q7)


def test_multi_delete_rejects_bad_sets():
    with pytest.raises(InvalidDeletionError):
        multi_delete(Q7, [3, 3])
    with pytest.raises(InvalidDeletionError):
        multi_delete(Q7, [2])
    with pytest.raises(InvalidDeletionError):
        multi_delete(Q7, [0])
    with pytest.raises(InvalidDeletionError):
        multi_delete(Q7, [9])
    with pytest.raises(InvalidDeletionError):
        as_deletions([-1, 2])


@given(steps, st.data())
def test_order_independence_and_fold(step_list, data):
    q = q_from_steps(step_list)
    arr = arrival_slots(q).tolist()
    M = data.draw(st.lists(st.sampled_from(arr), unique=True, max_size=5)) if arr else []
    expected = multi_delete(q, M)
    assert expected.min() >= 0
    for order in itertools.permutations(M):
        folded = reduce(point_delete, order, q)
        np.testing.assert_array_equal(folded, expected)


@given(steps, st.data())
def test_more_deletions_never_increase_queue(step_list, data):
    q = q_from_steps(step_list)
    arr = arrival_slots(q).tolist()
    M = data.draw(st.lists(st.sampled_from(arr), unique=True)) if arr else []
    sub = M[: len(M) // 2]
    assert np.all(multi_delete(q, M) <= multi_delete(q, sub))


def test_partial_sum():
    q = [0, 1, 2, 1, 0, 1, 0]
    assert partial_sum(q, 6) == 5
    assert partial_sum(q, 0) == 0
    assert partial_sum([0, 0, 0], 2) == 0
    with pytest.raises(IndexError):
        partial_sum(q, 7)


@given(st.lists(st.integers(1, 200), unique=True), st.integers(0, 250))
def test_counting_properties(M, n):
    assert counting(M, n) <= n
    assert counting(M, n) <= counting(M, n + 1)


def test_busy_periods_examples():
    bp = busy_periods([0, 1, 2, 1, 0, 1, 0])
    assert [(b.l, b.u) for b in bp] == [(1, 4), (5, 6)]
    assert busy_periods([0, 0, 0]) == []
    open_end = busy_periods([0, 1, 1, 2])
    assert [(b.l, b.u) for b in open_end] == [(1, 3)]
    assert len(open_end[0]) == 3


@given(steps)
def test_busy_periods_partition_positive_slots(step_list):
    q = q_from_steps(step_list)
    covered = set()
    for b in busy_periods(q):
        assert q[b.l - 1] == 0
        # a period still open at the horizon also covers its last slot
        end = b.u if q[b.u] == 0 else b.u + 1
        covered |= set(range(b.l, end))
    assert covered == set(np.flatnonzero(q > 0).tolist())


def test_check_feasible():
    path = generate_initial_path(ModelParams(0.9, 0.5), 1000, 1)
    r = check_feasible(path, [])
    assert r.discrete_rate == 0 and r.feasible_flag
    assert r.bound == pytest.approx(0.5 / 1.4)
    M = arrival_slots(path)
    r = check_feasible(path, M, 1000)
    assert r.continuous_rate == 1.4 * r.discrete_rate
    assert not r.feasible_flag and r.slack_sigmas < 0
    with pytest.raises(ValueError):
        check_feasible(path, M, 2000)


def test_nob_discrete_rate(mid_load_path):
    M = nob_offline(mid_load_path)
    r = check_feasible(mid_load_path, M)
    assert abs(r.discrete_rate - 0.4 / 1.4) < 0.001
    assert r.feasible_flag


def test_deletion_epochs():
    q = np.array([0, 1, 0, 1, 0, 1, 1, 1])
    st_ = deletion_epochs(q, [3, 6, 7])
    assert st_.lengths.tolist() == [3, 1]
    assert st_.lengths.sum() == 7 - 3
    assert st_.areas.tolist() == [q[3:6].sum(), q[6]]
    with pytest.raises(InsufficientDataError):
        deletion_epochs(q, [3])


def test_post_nob_structure(mid_load_path):
    q0 = mid_load_path.q
    M = nob_offline(mid_load_path)
    q = multi_delete(q0, M)
    assert q.min() >= 0
    stats = deletion_epochs(q, M)
    assert abs(stats.mean_length - 3.5) < 0.05
    # renewal growth: m_i / i approaches the mean epoch length
    i = np.arange(1, M.size + 1)
    assert abs(M[-1] / i[-1] - 3.5) < 0.05
    # after the first deletion: deletion slot <=> two consecutive zeros
    shifted = shift_to_first_deletion(q, M)
    zz = np.flatnonzero((shifted[1:] == 0) & (shifted[:-1] == 0)) + 1 + M[0]
    np.testing.assert_array_equal(zz, M[1:])
    # and the server never idles from the first deletion on
    idle = wasted_tokens(q, mid_load_path.is_arrival, start=int(M[0]))
    assert idle[-1] == 0
