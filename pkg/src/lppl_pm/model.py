"""First-order log-periodic power law and its fit error.

With the critical time pinned to "now", the argument is the day offset
``x = t_c - t`` and a window of ``l_max`` days covers ``x = l_max, ..., 1``
(oldest first)::

    W(x) = A + x**m * (B + C1 * cos(omega * ln x) + C2 * sin(omega * ln x))
"""
import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import DataError, DomainError, ShapeError


class TransformKind(str, enum.Enum):
    LOG = "log"
    IDENTITY = "identity"

    def apply(self, values):
        values = np.asarray(values, dtype=np.float64)
        if self is TransformKind.LOG:
            if np.any(values <= 0):
                raise DataError("log transform requires strictly positive values")
            return np.log(values)
        return values.copy()

    def inverse(self, values):
        values = np.asarray(values, dtype=np.float64)
        return np.exp(values) if self is TransformKind.LOG else values.copy()


@dataclass(frozen=True)
class LpplParams:
    """Parameters of one LPPL fit; ``l_max`` is the window length in days."""

    l_max: int
    A: float
    B: float
    m: float
    C1: float
    C2: float
    omega: float

    def __post_init__(self):
        if int(self.l_max) != self.l_max or self.l_max < 1:
            raise ValueError(f"l_max must be a positive integer, got {self.l_max!r}")
        object.__setattr__(self, "l_max", int(self.l_max))
        for name in ("A", "B", "m", "C1", "C2", "omega"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_phase(cls, l_max, A, B, m, C, phi, omega):
        """Build from amplitude/phase form ``C cos(omega ln x + phi)``."""
        return cls(l_max, A, B, m, C * math.cos(phi), -C * math.sin(phi), omega)

    @property
    def amplitude(self):
        return math.hypot(self.C1, self.C2)

    @property
    def phase(self):
        return math.atan2(-self.C2, self.C1)

    def negated(self):
        """Parameters of the mirrored curve ``-W``."""
        return LpplParams(self.l_max, -self.A, -self.B, self.m, -self.C1, -self.C2, self.omega)

    def to_dict(self):
        return asdict(self)


def eval_lppl(params, x):
    """Evaluate the LPPL at day offset(s) ``x > 0`` (natural log)."""
    xa = np.asarray(x, dtype=np.float64)
    if np.any(~(xa > 0)):
        raise DomainError("LPPL argument x must be strictly positive")
    lx = np.log(xa)
    val = params.A + xa ** params.m * (
        params.B
        + params.C1 * np.cos(params.omega * lx)
        + params.C2 * np.sin(params.omega * lx)
    )
    return float(val) if np.ndim(val) == 0 else val


def offsets(l_max):
    """Day offsets ``l_max, ..., 1`` in chronological order."""
    return np.arange(l_max, 0, -1, dtype=np.float64)


def curve(params):
    """The fitted curve over its window, oldest day first, "now" last."""
    return eval_lppl(params, offsets(params.l_max))


def fit_mse(params, win, transform=TransformKind.LOG):
    """Mean squared residual between the transformed window and the curve."""
    values = win.values if hasattr(win, "values") else np.asarray(win, dtype=np.float64)
    if len(values) != params.l_max:
        raise ShapeError(f"window has {len(values)} points but l_max is {params.l_max}")
    resid = TransformKind(transform).apply(values) - curve(params)
    return float(np.mean(resid * resid))
