import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lppl_pm.changepoint import (
    LEFT,
    RIGHT,
    DetectorState,
    detector_update,
    run_detector,
    run_dual_detectors,
)
from lppl_pm.series import TimeSeries


def step(seed, n=100, at=50, size=5.0):
    x = 100.0 + np.random.default_rng(seed).standard_normal(n)
    x[at:] += size
    return x


def test_constant_input_never_fires():
    for direction in (LEFT, RIGHT):
        dets, hist = run_detector(np.full(200, 3.0), direction)
        assert dets == [] and np.all(hist == 0.0)


def test_up_step_fires_right_only():
    left, right = run_dual_detectors(step(0))
    assert any(50 <= d.date <= 55 for d in right)
    assert not any(50 <= d.date <= 55 for d in left)


def test_statistic_resets_on_trigger():
    state = DetectorState(RIGHT, min_baseline=2)
    for x in [0.0, 1.0, 0.0, 1.0]:
        state, _ = detector_update(state, x)
    state = DetectorState(**{**state.__dict__, "threshold": 1.0})
    state, det = detector_update(state, 10.0, date=7)
    assert det is not None and det.date == 7 and det.statistic_at_trigger >= 1.0
    assert state.statistic == 0.0


def test_update_rejects_nonfinite():
    with pytest.raises(ValueError):
        detector_update(DetectorState(LEFT), math.nan)
    with pytest.raises(ValueError):
        DetectorState("up")


def test_noise_detections_clear_threshold():
    x = np.random.default_rng(1).standard_normal(500)
    for direction in (LEFT, RIGHT):
        dets, hist = run_detector(x, direction)
        assert len(dets) > 0
        assert all(d.statistic_at_trigger > 0 for d in dets)


def test_timeseries_input_uses_dates():
    ts = TimeSeries.from_start("2021-01-01", step(3))
    left, right = run_dual_detectors(ts)
    assert all(d.date >= ts.dates[0] for d in left + right)
    with pytest.raises(ValueError):
        run_dual_detectors(np.array([]))


@given(st.lists(st.floats(-1e3, 1e3), min_size=5, max_size=120))
def test_mirror_symmetry(values):
    x = np.array(values)
    left, right = run_dual_detectors(x)
    nleft, nright = run_dual_detectors(x, negate=True)
    assert [d.date for d in left] == [d.date for d in nright]
    assert [d.date for d in right] == [d.date for d in nleft]


@given(st.lists(st.floats(-10, 10), min_size=20, max_size=80), st.integers(0, 79))
def test_causality(values, cut):
    x = np.array(values)
    cut = min(cut, x.size - 1)
    y = x.copy()
    y[cut + 1:] = -y[cut + 1:] + 3.0
    for a, b in zip(run_dual_detectors(x), run_dual_detectors(y)):
        assert [d for d in a if d.date <= cut] == [d for d in b if d.date <= cut]
