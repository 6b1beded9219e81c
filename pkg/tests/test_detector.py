import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lppl_pm.detector import (
    EventClass,
    IbAlert,
    RootCause,
    assign_groups,
    classify,
    decide,
    failure_window,
    find_extrema,
    group_alerts,
    is_ib_point,
    make_alert,
    predict_root_cause,
    trend_slope,
)
from lppl_pm.exceptions import InsufficientExtremaError, InvalidWindowError, OrderError
from lppl_pm.fitter import FitResult
from lppl_pm.model import LpplParams


def test_find_extrema_basic():
    mx, mn = find_extrema([0, 2, 1, 3, 0, 0, 1])
    assert mx == [(1, 2.0), (3, 3.0)]
    assert mn == [(2, 1.0)]


def test_plateau_and_endpoints_are_not_extrema():
    mx, mn = find_extrema([5, 1, 2, 2, 1, 5])
    assert mx == [] and mn == [(1, 1.0), (4, 1.0)]


def test_trend_slope_drops_oldest():
    # the oldest extremum is an outlier that would flip the slope
    assert trend_slope([(0, 100.0), (5, 1.0), (10, 2.0), (15, 3.0)]) == pytest.approx(0.2)
    with pytest.raises(InsufficientExtremaError):
        trend_slope([(0, 1.0), (1, 2.0)])


def wave(n=200, period=20.0, trend=0.01):
    t = np.arange(n)
    return np.sin(2 * np.pi * t / period) + trend * t


def test_rising_oscillation_is_ib():
    d = decide(wave())
    assert d.is_ib and d.sign == 1 and d.predicted_trend == -1
    assert predict_root_cause(d.sign) is RootCause.SUCTION_VALVE_OR_SEALING


def test_falling_oscillation_is_ib_with_discharge_cause():
    d = decide(wave(trend=-0.01))
    assert d.is_ib and d.sign == -1
    assert predict_root_cause(d.sign) is RootCause.DISCHARGE_VALVE


def test_converging_oscillation_is_not_ib():
    t = np.arange(200)
    c = np.exp(-t / 100) * np.sin(2 * np.pi * t / 20)
    d = decide(c)
    assert not d.is_ib and d.reason == "opposite signs"


def test_too_few_extrema():
    d = decide(np.linspace(0, 1, 50))
    assert not d.is_ib and d.reason == "insufficient extrema"


def test_flat_trend_is_not_ib():
    d = decide(np.tile([0.0, 1.0], 30))
    assert not d.is_ib and d.reason == "flat trend"


def test_is_ib_point_accepts_params_and_fits():
    p = LpplParams(90, 5.0, 0.025, 0.5, 0.01, 0.0, 7.0)
    fit = FitResult(p, 0.0, 89, True)
    assert is_ib_point(p) == is_ib_point(fit)


@pytest.mark.parametrize("mse, cls", [
    (2.6e-5, EventClass.CRITICAL),
    (6e-5, EventClass.MONITORING),
    (9.99e-5, EventClass.MONITORING),
    (10e-5, EventClass.IRRELEVANT),
    (24.9e-5, EventClass.IRRELEVANT),
])
def test_classify_boundaries(mse, cls):
    assert classify(mse) is cls


def test_classify_threshold_order():
    with pytest.raises(ValueError):
        classify(1e-5, (1e-4, 1e-5))


def test_failure_window():
    assert failure_window(0, 80, 90) == (40, 90)
    assert failure_window(10, 33) == (26, 100)
    with pytest.raises(InvalidWindowError):
        failure_window(0, 100, 50)


@given(st.integers(4, 100), st.integers(0, 800_000))
def test_failure_window_after_alert(l_max, n):
    start, end = failure_window(n, l_max)
    assert n < start < end


def _alert(date, mse=1e-5, l_max=60):
    return IbAlert(date, mse, l_max, classify(mse), failure_window(date, l_max),
                   RootCause.DISCHARGE_VALVE, -1)


def test_alert_dict_round_trip():
    a = _alert(737800)
    b = IbAlert.from_dict(a.to_dict())
    assert a == b
    with pytest.raises(InvalidWindowError):
        IbAlert(10, 1e-5, 60, EventClass.CRITICAL, (5, 90), RootCause.DISCHARGE_VALVE, -1)


def test_grouping_chains_within_gap():
    alerts = [_alert(d, mse) for d, mse in [(100, 2e-5), (103, 1.2e-4), (106, 4e-5), (110, 3e-5)]]
    assert assign_groups(alerts, 3) == [0, 0, 0, 1]
    grouped = group_alerts(alerts, 3)
    assert [g.date for g in grouped] == [100, 110]
    assert grouped[0].mse == pytest.approx(6e-5)
    assert grouped[0].event_class is EventClass.MONITORING
    assert grouped[1].group_id == 1


def test_grouping_requires_order():
    with pytest.raises(OrderError):
        assign_groups([_alert(10), _alert(5)])


def test_make_alert():
    p = LpplParams(80, 5.0, 0.025, 0.5, 0.01, 0.0, 7.0)
    fit = FitResult(p, 3e-5, 79, True)
    d = is_ib_point(fit)
    a = make_alert(fit, d, 1000)
    assert a.failure_window == (1040, 1090)
    assert a.event_class is EventClass.CRITICAL
    assert a.root_cause is predict_root_cause(d.sign)


def test_grouping_is_idempotent():
    alerts = [_alert(d, mse) for d, mse in [(100, 2e-5), (102, 9e-5), (110, 3e-5), (112, 4e-4), (130, 1e-5)]]
    once = group_alerts(alerts)
    assert group_alerts(once) == once


RANK = {EventClass.CRITICAL: 0, EventClass.MONITORING: 1, EventClass.IRRELEVANT: 2}


@given(st.floats(0, 1e-3), st.floats(0, 1e-3))
def test_classify_monotone(a, b):
    lo, hi = sorted((a, b))
    assert RANK[classify(lo)] <= RANK[classify(hi)]


@given(st.lists(st.floats(-1, 1), min_size=3, max_size=60))
def test_identity_negation_flips_slopes(values):
    c = np.array(values)
    a, b = decide(c).trends, decide(-c).trends
    assert (a.n_max, a.n_min) == (b.n_min, b.n_max)
    if a.t_max_slope is not None:
        assert b.t_min_slope == pytest.approx(-a.t_max_slope)
