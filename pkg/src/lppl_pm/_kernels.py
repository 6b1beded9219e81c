"""Compiled inner loops for the LPPL fit.

The four linear coefficients (A, B, C1, C2) are eliminated by least squares
for every trial (m, omega), and Levenberg-Marquardt runs on the remaining
two nonlinear parameters using the Kaufman variable-projection Jacobian.

All loops are sequential, so a window of length L gives bit-identical
numbers whether it is fitted alone or as part of a sweep over lengths.
"""
import numba as nb
import numpy as np

# Smallest admissible Cholesky pivot of the unit-diagonal Gram matrix.
PIVOT_TOL = 1e-13

FTOL = 1e-13
XTOL = 1e-11
MAX_TRIES = 12


@nb.njit(cache=True)
def _cholesky(G, fac, dscale):
    """Jacobi-scaled Cholesky of a 4x4 Gram matrix; False if near singular."""
    for i in range(4):
        if not G[i, i] > 0.0:
            return False
        dscale[i] = 1.0 / np.sqrt(G[i, i])
    for j in range(4):
        s = G[j, j] * dscale[j] * dscale[j]
        for k in range(j):
            s -= fac[j, k] * fac[j, k]
        if not s > PIVOT_TOL:
            return False
        fac[j, j] = np.sqrt(s)
        for i in range(j + 1, 4):
            s = G[i, j] * dscale[i] * dscale[j]
            for k in range(j):
                s -= fac[i, k] * fac[j, k]
            fac[i, j] = s / fac[j, j]
    return True


@nb.njit(cache=True)
def _cho_solve(fac, dscale, rhs, out):
    z = np.empty(4)
    for i in range(4):
        s = rhs[i] * dscale[i]
        for k in range(i):
            s -= fac[i, k] * z[k]
        z[i] = s / fac[i, i]
    for i in range(3, -1, -1):
        s = z[i]
        for k in range(i + 1, 4):
            s -= fac[k, i] * out[k]
        out[i] = s / fac[i, i]
    for i in range(4):
        out[i] *= dscale[i]


@nb.njit(cache=True)
def _evaluate(lnx, y, n, m, omega, xm, cs, sn, resid, coef, fac, dscale):
    """Profile the linear coefficients at (m, omega); return the SSE.

    Fills the basis buffers, residuals, coefficients and the Cholesky factor.
    Returns inf when the basis is degenerate.
    """
    G = np.zeros((4, 4))
    b = np.zeros(4)
    for i in range(n):
        p = np.exp(m * lnx[i])
        ph = omega * lnx[i]
        c = p * np.cos(ph)
        s = p * np.sin(ph)
        xm[i] = p
        cs[i] = c
        sn[i] = s
        yi = y[i]
        G[0, 0] += 1.0
        G[1, 0] += p
        G[2, 0] += c
        G[3, 0] += s
        G[1, 1] += p * p
        G[2, 1] += c * p
        G[3, 1] += s * p
        G[2, 2] += c * c
        G[3, 2] += s * c
        G[3, 3] += s * s
        b[0] += yi
        b[1] += p * yi
        b[2] += c * yi
        b[3] += s * yi
    for i in range(4):
        for j in range(i + 1, 4):
            G[i, j] = G[j, i]
    if not _cholesky(G, fac, dscale):
        return np.inf
    _cho_solve(fac, dscale, b, coef)
    sse = 0.0
    for i in range(n):
        r = y[i] - (coef[0] + coef[1] * xm[i] + coef[2] * cs[i] + coef[3] * sn[i])
        resid[i] = r
        sse += r * r
    return sse


@nb.njit(cache=True)
def solve_profile(lnx, y, m, omega):
    """Least-squares coefficients and SSE at fixed (m, omega)."""
    n = y.shape[0]
    xm = np.empty(n)
    cs = np.empty(n)
    sn = np.empty(n)
    resid = np.empty(n)
    coef = np.zeros(4)
    fac = np.zeros((4, 4))
    dscale = np.empty(4)
    sse = _evaluate(lnx, y, n, m, omega, xm, cs, sn, resid, coef, fac, dscale)
    return coef, sse


@nb.njit(cache=True)
def _jacobian(lnx, n, xm, cs, sn, resid, y, coef, fac, dscale, J):
    """Kaufman variable-projection Jacobian of the residual w.r.t. (m, omega)."""
    vm = np.empty(n)
    vw = np.empty(n)
    tm = np.zeros(4)
    tw = np.zeros(4)
    for i in range(n):
        # d(fit)/dm = ln x * (fit - A); d(fit)/domega = ln x * x^m (C2 cos - C1 sin)
        fit_minus_a = y[i] - resid[i] - coef[0]
        vm[i] = lnx[i] * fit_minus_a
        vw[i] = lnx[i] * (coef[3] * cs[i] - coef[2] * sn[i])
        tm[0] += vm[i]
        tm[1] += xm[i] * vm[i]
        tm[2] += cs[i] * vm[i]
        tm[3] += sn[i] * vm[i]
        tw[0] += vw[i]
        tw[1] += xm[i] * vw[i]
        tw[2] += cs[i] * vw[i]
        tw[3] += sn[i] * vw[i]
    zm = np.empty(4)
    zw = np.empty(4)
    _cho_solve(fac, dscale, tm, zm)
    _cho_solve(fac, dscale, tw, zw)
    for i in range(n):
        pm = zm[0] + zm[1] * xm[i] + zm[2] * cs[i] + zm[3] * sn[i]
        pw = zw[0] + zw[1] * xm[i] + zw[2] * cs[i] + zw[3] * sn[i]
        J[i, 0] = -(vm[i] - pm)
        J[i, 1] = -(vw[i] - pw)


@nb.njit(cache=True)
def _local_fit(lnx, y, m0, w0, m_lo, m_hi, w_lo, w_hi, max_iters, out):
    """Bounded Levenberg-Marquardt from one start.

    ``out`` receives (m, omega, sse, A, B, C1, C2, converged, iterations).
    """
    n = y.shape[0]
    xm = np.empty(n)
    cs = np.empty(n)
    sn = np.empty(n)
    resid = np.empty(n)
    coef = np.zeros(4)
    fac = np.zeros((4, 4))
    dscale = np.empty(4)
    t_xm = np.empty(n)
    t_cs = np.empty(n)
    t_sn = np.empty(n)
    t_resid = np.empty(n)
    t_coef = np.zeros(4)
    t_fac = np.zeros((4, 4))
    t_dscale = np.empty(4)
    J = np.empty((n, 2))

    m = min(max(m0, m_lo), m_hi)
    w = min(max(w0, w_lo), w_hi)
    sse = _evaluate(lnx, y, n, m, w, xm, cs, sn, resid, coef, fac, dscale)
    converged = False
    it = 0
    lam = 1e-3
    floor = 1e-30 * n
    if np.isfinite(sse):
        while it < max_iters:
            it += 1
            if sse <= floor:
                converged = True
                break
            _jacobian(lnx, n, xm, cs, sn, resid, y, coef, fac, dscale, J)
            h00 = 0.0
            h01 = 0.0
            h11 = 0.0
            g0 = 0.0
            g1 = 0.0
            for i in range(n):
                h00 += J[i, 0] * J[i, 0]
                h01 += J[i, 0] * J[i, 1]
                h11 += J[i, 1] * J[i, 1]
                g0 += J[i, 0] * resid[i]
                g1 += J[i, 1] * resid[i]
            accepted = False
            stalled = False
            for _ in range(MAX_TRIES):
                a00 = h00 * (1.0 + lam) + 1e-300
                a11 = h11 * (1.0 + lam) + 1e-300
                det = a00 * a11 - h01 * h01
                if not det > 0.0:
                    lam *= 4.0
                    continue
                dm = -(a11 * g0 - h01 * g1) / det
                dw = -(a00 * g1 - h01 * g0) / det
                # a parameter sitting on its bound and pushed outward is frozen
                m_out = (m <= m_lo and dm < 0.0) or (m >= m_hi and dm > 0.0)
                w_out = (w <= w_lo and dw < 0.0) or (w >= w_hi and dw > 0.0)
                if m_out and w_out:
                    stalled = True
                    break
                if m_out:
                    dm = 0.0
                    dw = -g1 / a11
                elif w_out:
                    dw = 0.0
                    dm = -g0 / a00
                mn = min(max(m + dm, m_lo), m_hi)
                wn = min(max(w + dw, w_lo), w_hi)
                step = np.sqrt((mn - m) ** 2 + (wn - w) ** 2)
                if step <= XTOL * (1.0 + np.sqrt(m * m + w * w)):
                    stalled = True
                    break
                sse_n = _evaluate(lnx, y, n, mn, wn, t_xm, t_cs, t_sn, t_resid,
                                  t_coef, t_fac, t_dscale)
                if sse_n < sse:
                    gain = sse - sse_n
                    m = mn
                    w = wn
                    sse = sse_n
                    for i in range(n):
                        xm[i] = t_xm[i]
                        cs[i] = t_cs[i]
                        sn[i] = t_sn[i]
                        resid[i] = t_resid[i]
                    for i in range(4):
                        coef[i] = t_coef[i]
                        dscale[i] = t_dscale[i]
                        for k in range(4):
                            fac[i, k] = t_fac[i, k]
                    lam = max(lam / 3.0, 1e-12)
                    accepted = True
                    if gain <= FTOL * sse:
                        stalled = True
                    break
                lam *= 4.0
            if stalled or not accepted:
                converged = True
                break
    out[0] = m
    out[1] = w
    out[2] = sse
    out[3] = coef[0]
    out[4] = coef[1]
    out[5] = coef[2]
    out[6] = coef[3]
    out[7] = 1.0 if converged else 0.0
    out[8] = it


@nb.njit(cache=True)
def multi_start(lnx, y, starts, m_lo, m_hi, w_lo, w_hi, max_iters):
    """Run the local fit from every row of ``starts``; one result row each."""
    k = starts.shape[0]
    res = np.empty((k, 9))
    for s in range(k):
        _local_fit(lnx, y, starts[s, 0], starts[s, 1], m_lo, m_hi, w_lo, w_hi,
                   max_iters, res[s])
    return res
