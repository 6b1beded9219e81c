"""Constrained multi-start LPPL fitting over the window length.

For a candidate critical time ("now" = ``end_index``) every window length in
``l_range`` is fitted independently. Within a window, the linear coefficients
(A, B, C1, C2) are solved by least squares at each trial (m, omega), so the
nonlinear search is two dimensional. Each random start is polished by a
bounded Levenberg-Marquardt loop (see :mod:`lppl_pm._kernels`).
"""
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .exceptions import DegenerateBasisError, NoFeasibleFitError, RangeError
from .model import LpplParams, TransformKind, fit_mse
from .series import window

# Largest acceptable condition number of the column-normalised design matrix.
MAX_CONDITION = 1e10


@dataclass(frozen=True)
class FitConstraints:
    """Search box and multi-start settings.

    ``m_range`` and ``omega_range`` are open intervals, kept interior by
    ``margin``; ``l_range`` is inclusive. Window lengths whose mse lies within
    ``tie_tol`` of the best are treated as tied and resolved by ``prefer``
    (``"longest"`` or ``"shortest"``).
    """

    m_range: tuple = (0.0, 1.0)
    omega_range: tuple = (2.0, 8.0)
    l_range: tuple = (31, 100)
    A_positive: bool = True
    n_starts: int = 20
    max_iters: int = 200
    seed: int = 0
    margin: float = 1e-6
    tie_tol: float = 1e-10
    prefer: str = "longest"

    def __post_init__(self):
        for name in ("m_range", "omega_range"):
            lo, hi = (float(v) for v in getattr(self, name))
            if not hi - lo > 2 * self.margin:
                raise ValueError(f"{name} {(lo, hi)} is empty")
            object.__setattr__(self, name, (lo, hi))
        lo, hi = (int(v) for v in self.l_range)
        if lo < 5 or hi < lo:
            raise ValueError(f"l_range {(lo, hi)} must satisfy 5 <= lo <= hi")
        object.__setattr__(self, "l_range", (lo, hi))
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.prefer not in ("longest", "shortest"):
            raise ValueError("prefer must be 'longest' or 'shortest'")
        if self.tie_tol < 0:
            raise ValueError("tie_tol must be non-negative")

    @property
    def bounds(self):
        """Closed interior box ``(m_lo, m_hi, w_lo, w_hi)`` used by the optimizer."""
        (m_lo, m_hi), (w_lo, w_hi) = self.m_range, self.omega_range
        e = self.margin
        return m_lo + e, m_hi - e, w_lo + e, w_hi - e

    def lengths(self):
        return range(self.l_range[0], self.l_range[1] + 1)

    def satisfied_by(self, params):
        m_lo, m_hi = self.m_range
        w_lo, w_hi = self.omega_range
        ok = m_lo < params.m < m_hi and w_lo < params.omega < w_hi
        ok = ok and self.l_range[0] <= params.l_max <= self.l_range[1]
        if self.A_positive:
            ok = ok and params.A > 0
        return ok

    def with_seed(self, seed):
        return replace(self, seed=int(seed))


@dataclass(frozen=True)
class FitResult:
    params: LpplParams
    mse: float
    end_index: int
    converged: bool
    end_date: int = None
    n_feasible: int = field(default=0, compare=False)

    @property
    def l_max(self):
        return self.params.l_max


def design_matrix(m, omega, length):
    """Basis ``[1, x^m, x^m cos(omega ln x), x^m sin(omega ln x)]`` for x = 1..length."""
    x = np.arange(1, length + 1, dtype=np.float64)
    lx = np.log(x)
    xm = x**m
    return np.column_stack([np.ones_like(x), xm, xm * np.cos(omega * lx), xm * np.sin(omega * lx)])


def _fit_target(win, transform):
    """Transformed window values ordered by offset x = 1 ("now") .. L."""
    return np.ascontiguousarray(TransformKind(transform).apply(win.values)[::-1])


def solve_linear(m, omega, win, transform=TransformKind.LOG):
    """Ordinary least squares for (A, B, C1, C2) at fixed (m, omega).

    Returns ``(A, B, C1, C2, mse)``. Raises :class:`DegenerateBasisError` if
    the design matrix is rank deficient or badly conditioned.
    """
    y = _fit_target(win, transform)
    X = design_matrix(m, omega, y.size)
    norms = np.linalg.norm(X, axis=0)
    if y.size < X.shape[1] or np.any(norms == 0):
        raise DegenerateBasisError(f"{y.size} points cannot determine 4 coefficients")
    cond = np.linalg.cond(X / norms)
    if not cond < MAX_CONDITION:
        raise DegenerateBasisError(f"design matrix condition number {cond:.3g}")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    A, B, C1, C2 = (float(c) for c in coef)
    return A, B, C1, C2, float(np.mean(resid * resid))


def start_points(constraints, end_date, length):
    """Seeded multi-start points for one (end date, window length) pair.

    A counter-based Philox stream keyed by the master seed, with the end date
    and window length in the counter, so every window draws the same starts
    regardless of execution order. Start ``s`` always takes the s-th pair of
    draws.
    """
    bitgen = np.random.Philox(key=constraints.seed, counter=[0, 0, int(length), int(end_date)])
    u = np.random.Generator(bitgen).random((constraints.n_starts, 2))
    m_lo, m_hi, w_lo, w_hi = constraints.bounds
    return np.column_stack([m_lo + (m_hi - m_lo) * u[:, 0], w_lo + (w_hi - w_lo) * u[:, 1]])


def _lnx(length):
    return np.log(np.arange(1, length + 1, dtype=np.float64))


def fit_window(win, constraints=None, transform=TransformKind.LOG, end_index=None):
    """Best constrained LPPL fit on one window, "now" being its last point."""
    constraints = constraints or FitConstraints()
    length = len(win)
    lo, hi = constraints.l_range
    if not lo <= length <= hi:
        raise RangeError(f"window length {length} outside l_range {constraints.l_range}")
    end_date = int(win.dates[-1])
    y = _fit_target(win, transform)
    starts = start_points(constraints, end_date, length)
    m_lo, m_hi, w_lo, w_hi = constraints.bounds
    res = _kernels.multi_start(_lnx(length), y, starts, m_lo, m_hi, w_lo, w_hi,
                               constraints.max_iters)
    sse = res[:, 2]
    feasible = np.isfinite(sse)
    if constraints.A_positive:
        feasible &= res[:, 3] > 0
    if not feasible.any():
        raise NoFeasibleFitError(f"no feasible start for window of length {length}")
    # argmin returns the first minimum, i.e. the lowest start id on ties
    best = int(np.argmin(np.where(feasible, sse, np.inf)))
    m, w, _, A, B, C1, C2, conv, _ = res[best]
    params = LpplParams(length, A, B, m, C1, C2, w)
    return FitResult(
        params=params,
        mse=fit_mse(params, win, transform),
        end_index=length - 1 if end_index is None else int(end_index),
        converged=bool(conv),
        end_date=end_date,
        n_feasible=int(feasible.sum()),
    )


def fit_all_lengths(series, end_index, constraints=None, transform=TransformKind.LOG):
    """``{l: FitResult}`` for every feasible window length in ``l_range``."""
    constraints = constraints or FitConstraints()
    hi = constraints.l_range[1]
    if end_index + 1 < hi:
        raise RangeError(
            f"end_index {end_index} leaves {end_index + 1} points, {hi} are required"
        )
    out = {}
    for length in constraints.lengths():
        try:
            out[length] = fit_window(window(series, end_index, length), constraints,
                                     transform, end_index=end_index)
        except NoFeasibleFitError:
            continue
    return out


def select_best(results, constraints=None):
    """Minimal-mse fit; lengths within ``tie_tol`` of the minimum tie on mse."""
    constraints = constraints or FitConstraints()
    if not results:
        raise NoFeasibleFitError("no window length produced a feasible fit")
    fits = list(results.values()) if isinstance(results, dict) else list(results)
    best_mse = min(f.mse for f in fits)
    tied = [f for f in fits if f.mse <= best_mse + constraints.tie_tol]
    if constraints.prefer == "longest":
        return max(tied, key=lambda f: (f.l_max, -f.mse))
    return min(tied, key=lambda f: (f.l_max, f.mse))


def fit_best(series, end_index, constraints=None, transform=TransformKind.LOG):
    """Best fit over all window lengths ending at ``end_index``."""
    constraints = constraints or FitConstraints()
    return select_best(fit_all_lengths(series, end_index, constraints, transform), constraints)
