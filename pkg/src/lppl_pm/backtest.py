"""Walk-forward replay of the IB detector.

Every candidate day is fitted from scratch on data up to and including that
day, so the result for a day never depends on later samples or on which
other days are evaluated.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .detector import (
    DEFAULT_GAP,
    DEFAULT_HORIZON,
    DEFAULT_THRESHOLDS,
    assign_groups,
    group_alerts,
    is_ib_point,
    make_alert,
)
from .exceptions import InsufficientHistoryError, NoFeasibleFitError
from .fitter import FitConstraints, fit_best
from .model import TransformKind


@dataclass(frozen=True)
class BacktestConfig:
    constraints: FitConstraints = field(default_factory=FitConstraints)
    transform: TransformKind = TransformKind.LOG
    thresholds: tuple = DEFAULT_THRESHOLDS
    gap: int = DEFAULT_GAP
    horizon: int = DEFAULT_HORIZON
    min_history: int = 101

    def __post_init__(self):
        object.__setattr__(self, "transform", TransformKind(self.transform))
        if self.min_history < self.constraints.l_range[1] + 1:
            raise ValueError(
                f"min_history {self.min_history} must be >= max window length + 1 "
                f"({self.constraints.l_range[1] + 1})"
            )
        t1, t2 = self.thresholds
        if not t1 < t2:
            raise ValueError("thresholds must satisfy t1 < t2")
        if self.gap < 0:
            raise ValueError("gap must be non-negative")


@dataclass(frozen=True)
class DayFit:
    """Per-day summary; ``mse`` is NaN when no feasible fit exists."""

    date: int
    mse: float
    l_max: int
    ib: bool
    sign: int
    reason: str


@dataclass
class BacktestReport:
    raw_alerts: list
    grouped_alerts: list
    fits: list

    @property
    def feasible_days(self):
        return sum(1 for f in self.fits if not math.isnan(f.mse))


def evaluate_day(series, end_index, config):
    """Fit and decide one day; returns ``(DayFit, IbAlert or None)``."""
    date = int(series.dates[end_index])
    try:
        fit = fit_best(series, end_index, config.constraints, config.transform)
    except NoFeasibleFitError:
        return DayFit(date, float("nan"), 0, False, 0, "no feasible fit"), None
    decision = is_ib_point(fit)
    day = DayFit(date, fit.mse, fit.l_max, decision.is_ib, decision.sign, decision.reason)
    if not decision.is_ib:
        return day, None
    return day, make_alert(fit, decision, date, config.thresholds, config.horizon)


def _evaluate_chunk(series, indices, config):
    return [evaluate_day(series, i, config) for i in indices]


def _chunks(indices, n):
    size = max(1, math.ceil(len(indices) / n))
    return [indices[i : i + size] for i in range(0, len(indices), size)]


def run_backtest(series, config=None, jobs=1):
    """Evaluate every day from ``min_history - 1`` to the end of ``series``.

    ``jobs > 1`` spreads days over worker processes; results are merged in
    date order and are identical to a serial run.
    """
    config = config or BacktestConfig()
    if len(series) < config.min_history:
        raise InsufficientHistoryError(
            f"series has {len(series)} points, min_history is {config.min_history}"
        )
    indices = list(range(config.min_history - 1, len(series)))
    if jobs and jobs > 1 and len(indices) > 1:
        chunks = _chunks(indices, jobs * 4)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_evaluate_chunk, series, c, config) for c in chunks]
            results = [r for fut in futures for r in fut.result()]
    else:
        results = _evaluate_chunk(series, indices, config)
    fits = [day for day, _ in results]
    raw = [alert for _, alert in results if alert is not None]
    ids = assign_groups(raw, config.gap)
    raw = [replace(a, group_id=g) for a, g in zip(raw, ids)]
    grouped = group_alerts(raw, config.gap, config.thresholds)
    return BacktestReport(raw_alerts=raw, grouped_alerts=grouped, fits=fits)
