"""Scoring of grouped alerts against maintenance and diagnosis logs."""
import csv
import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

from .detector import IbAlert, RootCause
from .exceptions import DataError, OrderError, ParseError
from .series import from_ordinal, to_ordinal

EVENT_FIELDS = ("kind", "start", "end", "diagnosis", "note")


class EventKind(str, enum.Enum):
    MAINTENANCE = "maintenance"
    EXPERT_OBSERVATION = "expert_observation"


class Diagnosis(str, enum.Enum):
    SUCTION_VALVE_OR_SEALING = "SuctionValveOrSealing"
    DISCHARGE_VALVE = "DischargeValve"
    OTHER = "Other"

    def matches(self, root_cause):
        if self is Diagnosis.OTHER:
            return False
        return self.value == RootCause(root_cause).value


@dataclass(frozen=True)
class GroundTruthEvent:
    """A maintenance date (``end`` is None) or an observation interval."""

    kind: EventKind
    start: int
    end: int = None
    diagnosis: Diagnosis = Diagnosis.OTHER
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", EventKind(self.kind))
        object.__setattr__(self, "diagnosis", Diagnosis(self.diagnosis))
        if self.end is not None and self.end < self.start:
            raise DataError(f"event ends before it starts: {self.start} > {self.end}")

    @property
    def last_day(self):
        return self.start if self.end is None else self.end

    def overlaps(self, interval):
        lo, hi = interval
        return self.start <= hi and self.last_day >= lo


@dataclass(frozen=True)
class MatchLabel:
    """``TP`` carries the alert and every event it absorbed, ``FP`` only the
    alert, ``FN`` only the missed event."""

    label: str
    alert: IbAlert = None
    events: tuple = field(default=())

    def __post_init__(self):
        if self.label == "TP":
            ok = self.alert is not None and len(self.events) >= 1
        elif self.label == "FP":
            ok = self.alert is not None and not self.events
        elif self.label == "FN":
            ok = self.alert is None and len(self.events) == 1
        else:
            raise ValueError(f"unknown label {self.label!r}")
        if not ok:
            raise ValueError(f"malformed {self.label} label")

    @property
    def event(self):
        return self.events[0] if self.events else None


def _check_sorted(items, key, what):
    for a, b in zip(items, items[1:]):
        if key(b) < key(a):
            raise OrderError(f"{what} are not sorted by date")


def match_alerts(alerts, events):
    """Label every alert TP/FP and every unmatched event FN.

    An event is claimed by the earliest alert whose failure window contains
    one of its days and whose root cause agrees with the diagnosis. Each event
    is claimed at most once; one alert may claim several events.
    """
    alerts, events = list(alerts), list(events)
    _check_sorted(alerts, lambda a: a.date, "alerts")
    _check_sorted(events, lambda e: e.start, "events")
    claimed = {}
    for j, event in enumerate(events):
        for i, alert in enumerate(alerts):
            if event.overlaps(alert.failure_window) and event.diagnosis.matches(alert.root_cause):
                claimed.setdefault(i, []).append(j)
                break
    taken = {j for js in claimed.values() for j in js}
    labels = []
    for i, alert in enumerate(alerts):
        if i in claimed:
            labels.append(MatchLabel("TP", alert, tuple(events[j] for j in claimed[i])))
        else:
            labels.append(MatchLabel("FP", alert))
    labels.extend(MatchLabel("FN", None, (e,)) for j, e in enumerate(events) if j not in taken)
    return labels


def counts(labels):
    out = {"TP": 0, "FP": 0, "FN": 0}
    for lab in labels:
        out[lab.label] += 1
    return out


def precision_recall(labels):
    """``(precision, recall)``; a zero denominator gives None, not 0."""
    c = counts(labels)
    tp, fp, fn = c["TP"], c["FP"], c["FN"]
    precision = tp / (tp + fp) if tp + fp else None
    recall = tp / (tp + fn) if tp + fn else None
    return precision, recall


def format_kpis(labels):
    c = counts(labels)
    p, r = precision_recall(labels)
    fmt = lambda v: "n/a" if v is None else f"{v:.3f}"
    return f"TP={c['TP']} FP={c['FP']} FN={c['FN']} precision={fmt(p)} recall={fmt(r)}"


def load_events(path):
    """Read ``kind,start,end,diagnosis,note`` rows; events come back sorted."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != EVENT_FIELDS:
            raise ParseError(f"expected header {','.join(EVENT_FIELDS)}", line=1)
        events = []
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            if len(row) != len(EVENT_FIELDS):
                raise ParseError(f"expected {len(EVENT_FIELDS)} fields, got {len(row)}", line=lineno)
            kind, start, end, diagnosis, note = (c.strip() for c in row)
            try:
                events.append(GroundTruthEvent(
                    kind=kind,
                    start=to_ordinal(start),
                    end=to_ordinal(end) if end else None,
                    diagnosis=diagnosis,
                    note=note,
                ))
            except ParseError as exc:
                raise ParseError(str(exc), line=lineno) from exc
            except ValueError as exc:
                raise DataError(str(exc), line=lineno) from exc
    return sorted(events, key=lambda e: (e.start, e.last_day))


def save_events(events, path):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EVENT_FIELDS)
        for e in events:
            end = "" if e.end is None else from_ordinal(e.end)
            w.writerow([e.kind.value, from_ordinal(e.start), end, e.diagnosis.value, e.note])


def alerts_to_json(alerts):
    return json.dumps([a.to_dict() for a in alerts], indent=2, sort_keys=True) + "\n"


def save_alerts(alerts, path):
    Path(path).write_text(alerts_to_json(alerts))


def load_alerts(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid alerts JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, list):
        raise ParseError("alerts JSON must be a list")
    try:
        alerts = [IbAlert.from_dict(d) for d in data]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed alert record: {exc}") from exc
    return sorted(alerts, key=lambda a: a.date)
