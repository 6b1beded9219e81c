"""Ground-truth generators: hazard-rate solutions, degradation path and
seeded LPPL series with a known IB day."""
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, SingularExponentError
from .model import LpplParams, TransformKind, eval_lppl, offsets
from .series import TimeSeries, to_ordinal


@dataclass(frozen=True)
class HazardParams:
    """Parameters of ``dh/dt = G * h**delta``.

    ``h0`` is the hazard at ``t0`` for ``delta == 1`` and the amplitude of the
    degradation path otherwise; ``tc`` is required when ``delta > 1``.
    """

    delta: float
    G: float
    h0: float
    t0: float = 0.0
    tc: float = None

    def __post_init__(self):
        if self.G < 0:
            raise ValueError("G must be non-negative")
        if not self.h0 > 0:
            raise ValueError("h0 must be positive")
        if self.delta > 1 and self.tc is None:
            raise ValueError("tc is required when delta > 1")

    @property
    def eta(self):
        if self.delta == 1:
            raise DomainError("eta is undefined for delta == 1")
        return 1.0 / (1.0 - self.delta)

    @classmethod
    def critical(cls, delta, h0, t0, tc):
        """delta > 1 branch with G chosen so that h(t) = h0 * (tc - t)**eta.

        With this G the degradation path is exactly minus the integral of
        :func:`hazard` from ``t0``.
        """
        if not delta > 1:
            raise DomainError("critical branch requires delta > 1")
        eta = 1.0 / (1.0 - delta)
        G = h0 ** (1.0 / eta) / (delta - 1.0)
        return cls(delta=delta, G=G, h0=h0, t0=t0, tc=tc)


def hazard(hp, t):
    """Closed-form solution of the hazard-rate ODE on its branch."""
    t = np.asarray(t, dtype=np.float64)
    d = hp.delta
    if d == 1:
        out = hp.h0 * np.exp(hp.G * (t - hp.t0))
    elif d < 1:
        base = (1.0 - d) * (t - hp.t0) * hp.G
        if np.any(base < 0):
            raise DomainError("t must not precede t0 when delta < 1")
        out = base ** (1.0 / (1.0 - d))
    else:
        if np.any(t >= hp.tc):
            raise DomainError(f"t must be < tc = {hp.tc} when delta > 1")
        out = ((d - 1.0) * (hp.tc - t) * hp.G) ** (1.0 / (1.0 - d))
    return float(out) if out.ndim == 0 else out


def degradation_path(hp, times):
    """``P(t) = h0/(eta+1) * (tc - t)**(eta+1)``, shifted so ``P(t0) = 0``."""
    if not hp.delta > 1:
        raise DomainError("degradation path requires delta > 1")
    if hp.delta == 2:
        raise SingularExponentError("delta == 2 gives eta + 1 == 0")
    t = np.asarray(times, dtype=np.float64)
    if np.any(t >= hp.tc):
        raise DomainError(f"times must be < tc = {hp.tc}")
    k = hp.eta + 1.0
    out = hp.h0 / k * ((hp.tc - t) ** k - (hp.tc - hp.t0) ** k)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic series.

    The last ``length`` days follow the LPPL (offsets ``length .. 1``) plus
    Gaussian noise of ``noise_sigma`` in the transformed space. An optional
    ``prefix`` of pure noise (``prefix_sigma``) around the oldest LPPL level
    precedes it.
    """

    params: LpplParams
    noise_sigma: float = 0.0
    length: int = None
    seed: int = 0
    prefix: int = 0
    prefix_sigma: float = 0.02
    start: int = field(default_factory=lambda: to_ordinal("2019-08-23"))
    transform: TransformKind = TransformKind.LOG

    def __post_init__(self):
        if self.length is None:
            object.__setattr__(self, "length", self.params.l_max)
        object.__setattr__(self, "transform", TransformKind(self.transform))
        if self.noise_sigma < 0 or self.prefix_sigma < 0:
            raise ValueError("noise levels must be non-negative")
        if self.length < self.params.l_max:
            raise ValueError("length must be >= params.l_max")
        if self.prefix < 0:
            raise ValueError("prefix must be non-negative")

    @property
    def total_length(self):
        return self.prefix + self.length


def gen_lppl_series(spec):
    """Generate ``(series, ib_index)``; the IB day is the last LPPL day."""
    rng = np.random.default_rng(spec.seed)
    signal = eval_lppl(spec.params, offsets(spec.length))
    eps = rng.standard_normal(spec.length) * spec.noise_sigma if spec.noise_sigma else 0.0
    lppl_part = signal + eps
    parts = []
    if spec.prefix:
        level = signal[0]
        parts.append(level + rng.standard_normal(spec.prefix) * spec.prefix_sigma)
    parts.append(lppl_part)
    w = np.concatenate(parts)
    values = spec.transform.inverse(w)
    series = TimeSeries.from_start(int(spec.start), values)
    return series, spec.total_length - 1


def random_lppl_params(rng, l_max, m_range=(0.2, 0.8), omega_range=(2.5, 7.5), level=5.0):
    """Random parameters with a visible oscillation, for recovery studies."""
    m = rng.uniform(*m_range)
    omega = rng.uniform(*omega_range)
    C = rng.uniform(0.005, 0.02)
    phi = rng.uniform(-math.pi, math.pi)
    B = rng.uniform(-2.0, 2.0) * C
    return LpplParams.from_phase(int(l_max), level, B, m, C, phi, omega)
