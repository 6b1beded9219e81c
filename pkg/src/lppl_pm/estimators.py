"""scikit-learn style wrappers around the fitter, the IB backtest and the
changepoint baseline.

Each estimator takes a single series as ``X`` (a :class:`TimeSeries` or a
1-D array); ``y`` is accepted and ignored.
"""
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .backtest import BacktestConfig, run_backtest
from .changepoint import run_dual_detectors
from .fitter import FitConstraints, fit_best
from .model import TransformKind, curve
from .validation import check_interval, check_int, check_series, check_values


def _constraints(est):
    lo, hi = check_interval(est.l_range, "l_range", int)
    return FitConstraints(
        m_range=check_interval(est.m_range, "m_range"),
        omega_range=check_interval(est.omega_range, "omega_range"),
        l_range=(lo, hi),
        n_starts=check_int(est.n_starts, "n_starts", 1),
        max_iters=check_int(est.max_iters, "max_iters", 1),
        seed=check_int(est.seed, "seed", 0),
        prefer=est.prefer,
    )


class LpplFitter(BaseEstimator):
    """Best LPPL fit with "now" at the last sample of ``X``.

    After ``fit``: ``result_``, ``params_``, ``mse_`` and ``l_max_``.
    ``predict`` returns the fitted curve on the original scale, oldest first.
    """

    def __init__(self, l_range=(31, 100), m_range=(0.0, 1.0), omega_range=(2.0, 8.0),
                 n_starts=20, max_iters=200, seed=0, prefer="longest", transform="log"):
        self.l_range = l_range
        self.m_range = m_range
        self.omega_range = omega_range
        self.n_starts = n_starts
        self.max_iters = max_iters
        self.seed = seed
        self.prefer = prefer
        self.transform = transform

    def fit(self, X, y=None):
        series = check_series(X)
        self.result_ = fit_best(series, len(series) - 1, _constraints(self),
                                TransformKind(self.transform))
        self.params_ = self.result_.params
        self.mse_ = self.result_.mse
        self.l_max_ = self.result_.l_max
        return self

    def predict(self, X=None):
        check_is_fitted(self, "result_")
        return TransformKind(self.transform).inverse(curve(self.params_))


class IBPointDetector(BaseEstimator):
    """Walk-forward IB detection.

    After ``fit``: ``raw_alerts_``, ``alerts_`` (grouped) and ``fits_``.
    ``predict`` gives a boolean per sample of the fitted series, True on days
    with a raw alert.
    """

    def __init__(self, l_range=(31, 100), m_range=(0.0, 1.0), omega_range=(2.0, 8.0),
                 n_starts=20, max_iters=200, seed=0, prefer="longest", transform="log",
                 thresholds=(6e-5, 10e-5), gap=3, horizon=90, min_history=101, n_jobs=1):
        self.l_range = l_range
        self.m_range = m_range
        self.omega_range = omega_range
        self.n_starts = n_starts
        self.max_iters = max_iters
        self.seed = seed
        self.prefer = prefer
        self.transform = transform
        self.thresholds = thresholds
        self.gap = gap
        self.horizon = horizon
        self.min_history = min_history
        self.n_jobs = n_jobs

    def _config(self):
        return BacktestConfig(
            constraints=_constraints(self),
            transform=TransformKind(self.transform),
            thresholds=check_interval(self.thresholds, "thresholds"),
            gap=check_int(self.gap, "gap", 0),
            horizon=check_int(self.horizon, "horizon", 1),
            min_history=check_int(self.min_history, "min_history", 1),
        )

    def fit(self, X, y=None):
        series = check_series(X)
        report = run_backtest(series, self._config(), jobs=self.n_jobs)
        self.series_ = series
        self.raw_alerts_ = report.raw_alerts
        self.alerts_ = report.grouped_alerts
        self.fits_ = report.fits
        return self

    def predict(self, X=None):
        check_is_fitted(self, "raw_alerts_")
        start = int(self.series_.dates[0])
        out = np.zeros(len(self.series_), dtype=bool)
        for a in self.raw_alerts_:
            out[a.date - start] = True
        return out


class DualCusumDetector(BaseEstimator):
    """Left/right changepoint baseline.

    After ``fit``: ``left_`` and ``right_`` detection lists. ``predict``
    returns an ``(n, 2)`` int array of left and right trigger flags.
    """

    def __init__(self, threshold_percentile=75.0, drift=0.5, warmup=10, min_baseline=5,
                 negate=False):
        self.threshold_percentile = threshold_percentile
        self.drift = drift
        self.warmup = warmup
        self.min_baseline = min_baseline
        self.negate = negate

    def fit(self, X, y=None):
        values = check_values(X)
        if not 0.0 <= self.threshold_percentile <= 100.0:
            raise ValueError("threshold_percentile must lie in [0, 100]")
        self.left_, self.right_ = run_dual_detectors(
            values, self.threshold_percentile, negate=self.negate,
            warmup=check_int(self.warmup, "warmup", 0), drift=float(self.drift),
            min_baseline=check_int(self.min_baseline, "min_baseline", 2),
        )
        self.n_samples_ = values.size
        return self

    def predict(self, X=None):
        check_is_fitted(self, "left_")
        out = np.zeros((self.n_samples_, 2), dtype=np.int8)
        for col, dets in enumerate((self.left_, self.right_)):
            for d in dets:
                out[d.date, col] = 1
        return out
