"""Left/right one-sided CUSUM detectors, reinitialized on trigger.

The right detector accumulates upward deviations from a running baseline and
the left detector accumulates downward ones. Each has its own trigger level:
a percentile of the peaks of its own past excursions, so detections are
causal. On a trigger the statistic returns to zero and the baseline keeps
only ``min_baseline`` samples worth of memory, so it adapts quickly to a new
level without forgetting the old one at once.
"""
import math
from dataclasses import dataclass, replace

import numpy as np

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class DetectorState:
    direction: str
    statistic: float = 0.0
    baseline_estimate: float = 0.0
    samples_seen: int = 0
    threshold: float = math.inf
    m2: float = 0.0
    drift: float = 0.5
    min_baseline: int = 5

    def __post_init__(self):
        if self.direction not in (LEFT, RIGHT):
            raise ValueError(f"direction must be 'left' or 'right', got {self.direction!r}")

    @property
    def running_std(self):
        if self.samples_seen < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.samples_seen - 1))

    def reset(self):
        return replace(self, statistic=0.0, baseline_estimate=0.0, samples_seen=0, m2=0.0)

    def reinitialized(self):
        """Zero statistic; baseline memory cut to ``min_baseline`` samples."""
        n = min(self.samples_seen, max(2, self.min_baseline))
        m2 = self.m2 * (n - 1) / (self.samples_seen - 1) if self.samples_seen > 1 else 0.0
        return replace(self, statistic=0.0, samples_seen=n, m2=m2)


@dataclass(frozen=True)
class Detection:
    date: int
    direction: str
    statistic_at_trigger: float


def detector_update(state, x, date=None):
    """Feed one sample; returns ``(new_state, detection or None)``.

    The statistic only accumulates once ``min_baseline`` samples (at least
    two) define the baseline mean and spread. The
    baseline (Welford mean and variance) absorbs ``x`` after the statistic
    update.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("sample must be finite")
    stat = state.statistic
    if state.samples_seen >= max(2, state.min_baseline):
        dev = x - state.baseline_estimate
        if state.direction == LEFT:
            dev = -dev
        stat = max(0.0, stat + dev - state.drift * state.running_std)
    n = state.samples_seen + 1
    delta = x - state.baseline_estimate
    mean = state.baseline_estimate + delta / n
    m2 = state.m2 + delta * (x - mean)
    new = replace(state, statistic=stat, baseline_estimate=mean, samples_seen=n, m2=m2)
    if stat > 0.0 and stat >= state.threshold:
        return new.reinitialized(), Detection(date, state.direction, stat)
    return new, None


def run_detector(values, direction, dates=None, threshold_percentile=75.0,
                 warmup=10, drift=0.5, min_baseline=5):
    """Stream ``values`` through one detector.

    Before each sample the trigger level is set to the given percentile of
    all statistic values seen so far; no detection fires before ``warmup``
    samples of history exist. Returns ``(detections, statistics)``.
    """
    values = np.asarray(values, dtype=np.float64)
    if dates is None:
        dates = np.arange(values.size)
    state = DetectorState(direction, drift=drift, min_baseline=min_baseline)
    peaks = []
    history = []
    peak = 0.0
    detections = []
    for x, d in zip(values, dates):
        if len(history) >= warmup and peaks:
            threshold = float(np.percentile(peaks, threshold_percentile))
        else:
            threshold = math.inf
        state, det = detector_update(replace(state, threshold=threshold), x, int(d))
        stat = det.statistic_at_trigger if det is not None else state.statistic
        history.append(stat)
        if det is not None:
            detections.append(det)
        peak = max(peak, stat)
        if state.statistic == 0.0 and peak > 0.0:
            peaks.append(peak)
            peak = 0.0
    return detections, np.array(history)


def run_dual_detectors(series, threshold_percentile=75.0, negate=False, warmup=10,
                       drift=0.5, min_baseline=5):
    """Independent left and right detectors over ``series``.

    ``series`` is a :class:`TimeSeries` or a 1-D array (dates are then the
    sample indices). ``negate`` mirrors the values first.
    """
    if hasattr(series, "values") and hasattr(series, "dates"):
        values, dates = np.asarray(series.values, dtype=np.float64), series.dates
    else:
        values = np.asarray(series, dtype=np.float64)
        dates = np.arange(values.size)
    if values.size == 0:
        raise ValueError("series is empty")
    if negate:
        values = -values
    args = (dates, threshold_percentile, warmup, drift, min_baseline)
    left, _ = run_detector(values, LEFT, *args)
    right, _ = run_detector(values, RIGHT, *args)
    return left, right
