"""The thirteen acceptance criteria at full scale, one line of output each.

Tolerances and horizons live in ``lookahead_admission.validation`` and are
fixed there.  Run with ``pytest tests/test_acceptance.py -v`` and read the
``[PASS]`` / ``[FAIL]`` lines.
"""

import subprocess
import sys

import pytest

from lookahead_admission import analytics, validation


@pytest.fixture(scope="module")
def results():
    return {r.number: r for r in validation.run_all(quick=False)}


@pytest.mark.parametrize("number", range(1, 14))
def test_criterion(results, number, capsys):
    r = results[number]
    with capsys.disabled():
        print("\n" + r.line())
    assert r.passed, r.line()


def test_validate_quick_csv_is_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "lookahead_admission", "validate", "--quick", "--out", str(out)],
            capture_output=True, text=True,
        )
        assert proc.returncode in (0, 1), proc.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].startswith(b"criterion,name,measured,expected,tolerance,passed,detail\n")


def test_corrupted_constant_is_caught(monkeypatch):
    monkeypatch.setattr(analytics, "nob_queue_mean", lambda model: 1.1 * (1 - model.p) / (model.lam - 1 + model.p))
    assert not validation.criterion_nob_mean(quick=True).passed
