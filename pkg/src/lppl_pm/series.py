"""Daily time-series model, CSV ingestion and windowing.

Dates are held as proleptic Gregorian ordinals (0001-01-01 is 1); ISO strings
only appear at the I/O boundary.
"""
import csv
import datetime as dt
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import DataError, GapError, ParseError, RangeError

GAP_POLICIES = ("reject", "forward_fill", "linear_interp")


def to_ordinal(date):
    """ISO ``YYYY-MM-DD`` string (or ``datetime.date``) to ordinal day."""
    if isinstance(date, dt.date):
        return date.toordinal()
    try:
        return dt.date.fromisoformat(str(date).strip()).toordinal()
    except ValueError as exc:
        raise ParseError(f"invalid calendar date {date!r}") from exc


def from_ordinal(ordinal):
    """Ordinal day to ISO string."""
    return dt.date.fromordinal(int(ordinal)).isoformat()


@dataclass(frozen=True)
class SamplePoint:
    date: int
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise DataError(f"non-finite value {self.value!r}")
        if self.value <= 0:
            raise DataError(f"non-positive value {self.value!r}")


class TimeSeries:
    """Immutable uniformly sampled daily series.

    Parameters
    ----------
    dates : array-like of int
        Ordinal days, strictly increasing by exactly one.
    values : array-like of float
        Finite, strictly positive measurements.
    """

    __slots__ = ("_dates", "_values")

    def __init__(self, dates, values):
        dates = np.array(dates, dtype=np.int64).ravel()
        values = np.array(values, dtype=np.float64).ravel()
        if dates.shape != values.shape:
            raise DataError(
                f"dates and values differ in length ({dates.size} != {values.size})"
            )
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise DataError(f"non-finite value at position {bad}")
        if np.any(values <= 0):
            bad = int(np.flatnonzero(values <= 0)[0])
            raise DataError(f"non-positive value {values[bad]!r} at position {bad}")
        if dates.size > 1:
            steps = np.diff(dates)
            if np.any(steps <= 0):
                raise ParseError("dates are not strictly increasing")
            if np.any(steps != 1):
                raise GapError("dates are not on a contiguous daily grid")
        dates.setflags(write=False)
        values.setflags(write=False)
        self._dates = dates
        self._values = values

    @classmethod
    def from_start(cls, start, values):
        """Series of ``values`` on consecutive days beginning at ``start``."""
        start = to_ordinal(start) if not isinstance(start, (int, np.integer)) else int(start)
        values = np.asarray(values, dtype=np.float64)
        return cls(np.arange(start, start + values.size), values)

    @property
    def dates(self):
        return self._dates

    @property
    def values(self):
        return self._values

    @property
    def points(self):
        return [SamplePoint(int(d), float(v)) for d, v in zip(self._dates, self._values)]

    def __len__(self):
        return self._values.size

    def __getitem__(self, index):
        if isinstance(index, slice):
            return TimeSeries(self._dates[index], self._values[index])
        return SamplePoint(int(self._dates[index]), float(self._values[index]))

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return np.array_equal(self._dates, other._dates) and np.array_equal(
            self._values, other._values
        )

    def __hash__(self):
        return hash((self._dates.tobytes(), self._values.tobytes()))

    def __repr__(self):
        if not len(self):
            return "TimeSeries([])"
        return (
            f"TimeSeries(n={len(self)}, {from_ordinal(self._dates[0])}"
            f"..{from_ordinal(self._dates[-1])})"
        )

    def truncate(self, end_index):
        """Points up to and including ``end_index``."""
        return self[: end_index + 1]


def window(series, end_index, length):
    """The ``length`` points ending at (and including) ``end_index``."""
    n = len(series)
    if not 0 <= end_index < n:
        raise RangeError(f"end_index {end_index} outside series of length {n}")
    if not 0 < length <= end_index + 1:
        raise RangeError(
            f"window length {length} does not fit before end_index {end_index}"
        )
    return series[end_index - length + 1 : end_index + 1]


def _fill_gaps(dates, values, gap_policy, lines):
    steps = np.diff(dates)
    if dates.size < 2 or np.all(steps == 1):
        return dates, values
    if gap_policy == "reject":
        i = int(np.flatnonzero(steps != 1)[0])
        raise GapError(
            f"{steps[i] - 1} missing day(s) after {from_ordinal(dates[i])}",
            line=lines[i + 1],
        )
    full = np.arange(dates[0], dates[-1] + 1)
    if gap_policy == "forward_fill":
        pos = np.searchsorted(dates, full, side="right") - 1
        return full, values[pos]
    return full, np.interp(full, dates, values)


def load_series(path, gap_policy="reject"):
    """Read a ``date,value`` CSV into a validated daily :class:`TimeSeries`.

    ``gap_policy`` is one of ``reject`` (default), ``forward_fill`` or
    ``linear_interp``.
    """
    if gap_policy not in GAP_POLICIES:
        raise ValueError(f"gap_policy must be one of {GAP_POLICIES}, got {gap_policy!r}")
    dates, values, lines = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("empty file", line=1)
        if [h.strip().lower() for h in header] != ["date", "value"]:
            raise ParseError(f"expected header 'date,value', got {','.join(header)!r}", line=1)
        for row in reader:
            lineno = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 fields, got {len(row)}", line=lineno)
            try:
                ordinal = dt.date.fromisoformat(row[0].strip()).toordinal()
            except ValueError:
                raise ParseError(f"invalid date {row[0]!r}", line=lineno) from None
            try:
                value = float(row[1])
            except ValueError:
                raise ParseError(f"invalid number {row[1]!r}", line=lineno) from None
            if not math.isfinite(value):
                raise DataError(f"non-finite value {row[1]!r}", line=lineno)
            if value <= 0:
                raise DataError(f"non-positive value {row[1]!r}", line=lineno)
            if dates and ordinal <= dates[-1]:
                raise ParseError(f"date {row[0].strip()} does not increase", line=lineno)
            dates.append(ordinal)
            values.append(value)
            lines.append(lineno)
    if not dates:
        raise ParseError("no data rows")
    d, v = _fill_gaps(np.array(dates, dtype=np.int64), np.array(values), gap_policy, lines)
    return TimeSeries(d, v)


def save_series(series, path):
    """Write ``series`` as ``date,value`` CSV; values use ``repr`` so reloads are exact."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "value"])
        for d, v in zip(series.dates, series.values):
            writer.writerow([from_ordinal(d), repr(float(v))])
    return path
