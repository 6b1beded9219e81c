import numpy as np
import pytest

from lppl_pm import _kernels
from lppl_pm.exceptions import DegenerateBasisError, NoFeasibleFitError, RangeError
from lppl_pm.fitter import (
    FitConstraints,
    FitResult,
    design_matrix,
    fit_all_lengths,
    fit_best,
    fit_window,
    select_best,
    solve_linear,
    start_points,
)
from lppl_pm.model import LpplParams, TransformKind
from lppl_pm.series import TimeSeries, window
from lppl_pm.synthetic import SynthSpec, gen_lppl_series

SMALL = FitConstraints(l_range=(55, 65), n_starts=10)


def test_solve_linear_recovers_coefficients(noiseless_series):
    p, series, ib = noiseless_series
    win = window(series, ib, p.l_max)
    A, B, C1, C2, mse = solve_linear(p.m, p.omega, win)
    np.testing.assert_allclose([A, B, C1, C2], [p.A, p.B, p.C1, p.C2], atol=1e-9)
    assert mse < 1e-20


def test_solve_linear_degenerate():
    win = TimeSeries.from_start(1, np.ones(3))
    with pytest.raises(DegenerateBasisError):
        solve_linear(0.5, 6.0, win)
    # m = 0 makes x^m identical to the constant column
    win = TimeSeries.from_start(1, np.exp(np.linspace(0, 1, 40)))
    with pytest.raises(DegenerateBasisError):
        solve_linear(0.0, 6.0, win)


def test_kernel_profile_matches_lstsq(noiseless_series):
    _, series, ib = noiseless_series
    win = window(series, ib, 50)
    y = np.log(win.values)[::-1].copy()
    lnx = np.log(np.arange(1, 51.0))
    coef, sse = _kernels.solve_profile(lnx, y, 0.4, 5.5)
    A, B, C1, C2, mse = solve_linear(0.4, 5.5, win)
    np.testing.assert_allclose(coef, [A, B, C1, C2], rtol=1e-7, atol=1e-10)
    assert sse / 50 == pytest.approx(mse, rel=1e-7)


def test_design_matrix_first_row():
    X = design_matrix(0.5, 6.0, 10)
    np.testing.assert_allclose(X[0], [1, 1, 1, 0])


def test_start_points_deterministic_and_inside():
    c = FitConstraints(seed=3)
    a = start_points(c, 737000, 40)
    np.testing.assert_array_equal(a, start_points(c, 737000, 40))
    assert not np.array_equal(a, start_points(c, 737001, 40))
    assert not np.array_equal(a, start_points(c, 737000, 41))
    assert not np.array_equal(a, start_points(c.with_seed(4), 737000, 40))
    m_lo, m_hi, w_lo, w_hi = c.bounds
    assert np.all((a[:, 0] >= m_lo) & (a[:, 0] <= m_hi))
    assert np.all((a[:, 1] >= w_lo) & (a[:, 1] <= w_hi))


def test_fit_window_exact(noiseless_series):
    p, series, ib = noiseless_series
    fit = fit_window(window(series, ib, p.l_max), SMALL)
    assert fit.mse < 1e-20
    assert fit.params.m == pytest.approx(p.m, abs=1e-6)
    assert fit.params.omega == pytest.approx(p.omega, abs=1e-6)
    assert SMALL.satisfied_by(fit.params)


def test_fit_window_length_check(noiseless_series):
    _, series, ib = noiseless_series
    with pytest.raises(RangeError):
        fit_window(window(series, ib, 40), SMALL)


def test_fit_best_picks_true_regime(noiseless_series):
    p, series, ib = noiseless_series
    fit = fit_best(series, ib, SMALL)
    assert fit.l_max == p.l_max
    assert fit.end_index == ib
    assert fit.end_date == series.dates[ib]


def test_fit_is_independent_of_sweep(noiseless_series):
    _, series, ib = noiseless_series
    all_fits = fit_all_lengths(series, ib, SMALL)
    single = fit_window(window(series, ib, 58), SMALL, end_index=ib)
    assert all_fits[58] == single
    assert all_fits[58].params == single.params


def test_fit_all_lengths_needs_history(noiseless_series):
    _, series, _ = noiseless_series
    with pytest.raises(RangeError):
        fit_all_lengths(series, 50, SMALL)


def _result(l, mse):
    return FitResult(LpplParams(l, 1, 0, 0.5, 0, 0, 5), mse, 0, True)


def test_select_best_ties():
    fits = [_result(40, 1e-12), _result(50, 5e-11), _result(60, 1e-6)]
    assert select_best(fits).l_max == 50
    assert select_best(fits, FitConstraints(prefer="shortest")).l_max == 40
    assert select_best(fits, FitConstraints(tie_tol=0)).l_max == 40
    with pytest.raises(NoFeasibleFitError):
        select_best({})


def test_positive_level_constraint():
    series = TimeSeries.from_start(1, 1e-3 * np.exp(1e-3 * np.sin(np.arange(40))))
    free = fit_window(series, FitConstraints(l_range=(40, 40), n_starts=8, A_positive=False))
    assert free.params.A < 0
    try:
        fit = fit_window(series, FitConstraints(l_range=(40, 40), n_starts=8))
    except NoFeasibleFitError:
        return
    assert fit.params.A > 0 and fit.n_feasible < 8


def test_constraints_validation():
    with pytest.raises(ValueError):
        FitConstraints(m_range=(0.5, 0.5))
    with pytest.raises(ValueError):
        FitConstraints(l_range=(50, 40))
    with pytest.raises(ValueError):
        FitConstraints(prefer="middle")
    with pytest.raises(ValueError):
        FitConstraints(n_starts=0)


def test_identity_transform(noiseless_series):
    p, series, ib = noiseless_series
    lin = TimeSeries(series.dates, np.log(series.values))
    fit = fit_window(window(lin, ib, p.l_max), SMALL, TransformKind.IDENTITY)
    assert fit.mse < 1e-20


def test_ols_residual_orthogonality():
    rng = np.random.default_rng(8)
    win = TimeSeries.from_start(1, np.exp(rng.normal(0, 0.01, 60)))
    A, B, C1, C2, _ = solve_linear(0.4, 5.0, win)
    X = design_matrix(0.4, 5.0, 60)
    y = np.log(win.values)[::-1]
    r = y - X @ np.array([A, B, C1, C2])
    for col in X.T:
        assert abs(col @ r) <= 1e-8 * np.linalg.norm(col) * np.linalg.norm(r)


def test_minimality_and_feasibility():
    rng = np.random.default_rng(9)
    series = TimeSeries.from_start(1, np.exp(5 + rng.normal(0, 0.01, 50)))
    c = FitConstraints(l_range=(31, 50), n_starts=5)
    best = fit_best(series, 49, c)
    for l, fit in fit_all_lengths(series, 49, c).items():
        assert c.satisfied_by(fit.params)
        assert best.mse <= fit.mse + c.tie_tol


def test_regime_boundary_found():
    # 80 noiseless LPPL days after 40 days of white noise
    p = LpplParams(80, 5.0, 0.02, 0.45, 0.012, 0.004, 6.5)
    series, ib = gen_lppl_series(SynthSpec(p, prefix=40, seed=1))
    assert 75 <= fit_best(series, ib).l_max <= 85


def test_fit_is_deterministic(noiseless_series):
    _, series, ib = noiseless_series
    assert fit_best(series, ib, SMALL) == fit_best(series, ib, SMALL)
