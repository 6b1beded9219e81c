"""Initial-breakdown (IB) decision, alert classification and grouping.

A fitted curve marks an IB point when its local maxima and its local minima
trend in the same direction. The series is then expected to reverse that
direction, which also hints at the failing part.
"""
import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import InsufficientExtremaError, InvalidWindowError, OrderError
from .model import LpplParams, curve
from .series import from_ordinal, to_ordinal

DEFAULT_THRESHOLDS = (6e-5, 10e-5)
DEFAULT_HORIZON = 90
DEFAULT_GAP = 3


class EventClass(str, enum.Enum):
    CRITICAL = "Critical"
    MONITORING = "Monitoring"
    IRRELEVANT = "Irrelevant"


class RootCause(str, enum.Enum):
    SUCTION_VALVE_OR_SEALING = "SuctionValveOrSealing"
    DISCHARGE_VALVE = "DischargeValve"


@dataclass(frozen=True)
class ExtremaTrends:
    n_max: int
    n_min: int
    t_max_slope: float = None
    t_min_slope: float = None


@dataclass(frozen=True)
class IbDecision:
    is_ib: bool
    sign: int
    reason: str
    trends: ExtremaTrends

    @property
    def predicted_trend(self):
        """Direction the series is expected to take after the IB point."""
        return -self.sign


def find_extrema(samples):
    """Interior strict local maxima and minima by 3-point comparison.

    Returns ``(maxima, minima)`` as lists of ``(index, value)``. Plateaus and
    endpoints are never extrema.
    """
    c = np.asarray(samples, dtype=np.float64)
    if c.size < 3:
        return [], []
    mid, left, right = c[1:-1], c[:-2], c[2:]
    idx = np.arange(1, c.size - 1)
    maxima = [(int(i), float(c[i])) for i in idx[(mid > left) & (mid > right)]]
    minima = [(int(i), float(c[i])) for i in idx[(mid < left) & (mid < right)]]
    return maxima, minima


def trend_slope(extrema):
    """OLS slope over all but the oldest extremum.

    ``extrema`` are ``(index, value)`` pairs in chronological order; at least
    three are required.
    """
    if len(extrema) <= 2:
        raise InsufficientExtremaError(f"need more than 2 extrema, got {len(extrema)}")
    pts = sorted(extrema)[1:]
    x = np.array([p[0] for p in pts], dtype=np.float64)
    y = np.array([p[1] for p in pts], dtype=np.float64)
    dx = x - x.mean()
    return float(np.dot(dx, y - y.mean()) / np.dot(dx, dx))


def extrema_trends(samples):
    maxima, minima = find_extrema(samples)
    t_max = trend_slope(maxima) if len(maxima) > 2 else None
    t_min = trend_slope(minima) if len(minima) > 2 else None
    return ExtremaTrends(len(maxima), len(minima), t_max, t_min)


def decide(samples):
    """IB decision on chronologically sampled curve values."""
    trends = extrema_trends(samples)
    if trends.n_max <= 2 or trends.n_min <= 2:
        return IbDecision(False, 0, "insufficient extrema", trends)
    s_max = int(np.sign(trends.t_max_slope))
    s_min = int(np.sign(trends.t_min_slope))
    if s_max == 0 or s_min == 0:
        return IbDecision(False, 0, "flat trend", trends)
    if s_max != s_min:
        return IbDecision(False, 0, "opposite signs", trends)
    return IbDecision(True, s_max, "", trends)


def is_ib_point(fit):
    """IB decision for a :class:`FitResult`, :class:`LpplParams` or sampled curve."""
    if isinstance(fit, LpplParams):
        return decide(curve(fit))
    if hasattr(fit, "params"):
        return decide(curve(fit.params))
    return decide(fit)


def classify(mse, thresholds=DEFAULT_THRESHOLDS):
    t1, t2 = thresholds
    if not t1 < t2:
        raise ValueError(f"thresholds must satisfy t1 < t2, got {thresholds}")
    if mse < t1:
        return EventClass.CRITICAL
    if mse < t2:
        return EventClass.MONITORING
    return EventClass.IRRELEVANT


def failure_window(n, l_max, horizon=DEFAULT_HORIZON):
    """Predicted failure interval ``[n + l_max // 2, n + horizon]`` in days."""
    if l_max < 2:
        raise ValueError(f"l_max must be >= 2, got {l_max}")
    half = int(l_max) // 2
    if horizon <= half:
        raise InvalidWindowError(f"horizon {horizon} does not exceed l_max/2 = {half}")
    return (int(n) + half, int(n) + int(horizon))


def predict_root_cause(common_sign):
    """Falling predicted trend -> suction valve/sealing; rising -> discharge valve."""
    if common_sign > 0:
        return RootCause.SUCTION_VALVE_OR_SEALING
    if common_sign < 0:
        return RootCause.DISCHARGE_VALVE
    raise ValueError("common sign must be +1 or -1")


@dataclass(frozen=True)
class IbAlert:
    date: int
    mse: float
    l_max: int
    event_class: EventClass
    failure_window: tuple
    root_cause: RootCause
    sign: int
    group_id: int = None
    params: LpplParams = field(default=None, compare=False)

    def __post_init__(self):
        start, end = self.failure_window
        if not self.date < start < end:
            raise InvalidWindowError(
                f"alert at {self.date} has invalid failure window {self.failure_window}"
            )

    def to_dict(self):
        d = {
            "date": from_ordinal(self.date),
            "mse": self.mse,
            "l_max": self.l_max,
            "class": self.event_class.value,
            "window": [from_ordinal(self.failure_window[0]), from_ordinal(self.failure_window[1])],
            "root_cause": self.root_cause.value,
            "sign": self.sign,
            "group_id": self.group_id,
        }
        if self.params is not None:
            d["params"] = self.params.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        params = d.get("params")
        return cls(
            date=to_ordinal(d["date"]),
            mse=float(d["mse"]),
            l_max=int(d["l_max"]),
            event_class=EventClass(d["class"]),
            failure_window=(to_ordinal(d["window"][0]), to_ordinal(d["window"][1])),
            root_cause=RootCause(d["root_cause"]),
            sign=int(d["sign"]),
            group_id=d.get("group_id"),
            params=LpplParams(**params) if params else None,
        )


def make_alert(fit, decision, date, thresholds=DEFAULT_THRESHOLDS, horizon=DEFAULT_HORIZON):
    """Alert for an IB decision on ``fit`` evaluated at ordinal ``date``."""
    if not decision.is_ib:
        raise ValueError("decision is not an IB point")
    return IbAlert(
        date=int(date),
        mse=fit.mse,
        l_max=fit.l_max,
        event_class=classify(fit.mse, thresholds),
        failure_window=failure_window(date, fit.l_max, horizon),
        root_cause=predict_root_cause(decision.sign),
        sign=decision.sign,
        params=fit.params,
    )


def assign_groups(alerts, gap=DEFAULT_GAP):
    """Group id per alert: a new group starts when the gap to the previous alert exceeds ``gap``."""
    ids = []
    for i, alert in enumerate(alerts):
        if i and alert.date < alerts[i - 1].date:
            raise OrderError("alerts are not sorted by date")
        if i == 0:
            ids.append(0)
        elif alert.date - alerts[i - 1].date <= gap:
            ids.append(ids[-1])
        else:
            ids.append(ids[-1] + 1)
    return ids


def group_alerts(alerts, gap=DEFAULT_GAP, thresholds=DEFAULT_THRESHOLDS):
    """Merge runs of close alerts into their first member.

    The representative carries the mean mse of its group and is reclassified
    on that mean.
    """
    alerts = list(alerts)
    ids = assign_groups(alerts, gap)
    out = []
    for gid in sorted(set(ids)):
        members = [a for a, g in zip(alerts, ids) if g == gid]
        mse = float(np.mean([a.mse for a in members]))
        out.append(replace(members[0], mse=mse, event_class=classify(mse, thresholds), group_id=gid))
    return out
