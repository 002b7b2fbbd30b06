"""Compiled inner loops of the backward Euler / Newton step.

Notation: w_old is W^{n-1}, delta = W^n - W^{n-1} and jumps[j] = delta[j+1] - delta[j].
Boundary data are passed as scalars: has0/has1 flag a feedback law at x = 0 / x = 1,
rob = 1 + c + w_d and gain = c for that end, bweight = 1 + mu/(nu k).
"""

import numpy as np
from numba import njit

from .linalg import PIVOT_RTOL, _thomas

OK, NOT_CONVERGED, BREAKDOWN = 0, 1, 2


@njit(cache=True)
def old_residual(w_old, inv_h, nu, adv, has0, rob0, c0, has1, rob1, c1):
    """Residual contributions that depend on W^{n-1} only."""
    n = w_old.size
    r = np.zeros(n)
    for j in range(n - 1):
        a = w_old[j]
        b = w_old[j + 1]
        dw = b - a
        d6 = dw / 6.0
        r[j] += d6 * (2.0 * a + b)
        r[j + 1] += d6 * (a + 2.0 * b)
        flux = nu * dw * inv_h[j]
        half = 0.5 * adv * dw
        r[j] += half - flux
        r[j + 1] += half + flux
    if has0:
        w = w_old[0]
        r[0] += rob0 * w + 2.0 / (9.0 * c0) * w * w * w
    if has1:
        w = w_old[n - 1]
        r[n - 1] += rob1 * w + 2.0 / (9.0 * c1) * w * w * w
    return r


@njit(cache=True)
def increment_residual(
    delta, jumps, w_old, r_old, m_off, m_diag, inv_h, diff_coef, adv,
    has0, rob0, c0, has1, rob1, c1, bweight, dirichlet,
):
    n = delta.size
    r = r_old.copy()
    for i in range(n):
        r[i] += m_diag[i] * delta[i]
    for j in range(n - 1):
        va = delta[j]
        vb = delta[j + 1]
        ua = w_old[j]
        ub = w_old[j + 1]
        dv = jumps[j]
        # mass off-diagonals
        r[j] += m_off[j] * vb
        r[j + 1] += m_off[j] * va
        # (mu/k + nu) A delta + (1 + w_d) B delta
        flux = diff_coef * dv * inv_h[j]
        half = 0.5 * adv * dv
        r[j] += half - flux
        r[j + 1] += half + flux
        # J_N(w_old) delta + N(delta)
        du6 = (ub - ua) / 6.0
        dv6 = dv / 6.0
        r[j] += du6 * (2.0 * va + vb) + dv6 * (2.0 * ua + ub) + dv6 * (2.0 * va + vb)
        r[j + 1] += du6 * (va + 2.0 * vb) + dv6 * (ua + 2.0 * ub) + dv6 * (va + 2.0 * vb)
    if has0:
        wo = w_old[0]
        d = delta[0]
        cube_diff = d * (3.0 * wo * wo + 3.0 * wo * d + d * d)
        r[0] += bweight * (rob0 * d + 2.0 / (9.0 * c0) * cube_diff)
    if has1:
        wo = w_old[n - 1]
        d = delta[n - 1]
        cube_diff = d * (3.0 * wo * wo + 3.0 * wo * d + d * d)
        r[n - 1] += bweight * (rob1 * d + 2.0 / (9.0 * c1) * cube_diff)
    if dirichlet:
        r[0] = w_old[0] + delta[0]
    return r


@njit(cache=True)
def jacobian_bands(
    w, m_off, m_diag, inv_h, diff_coef, adv, has0, rob0, c0, has1, rob1, c1, bweight, dirichlet
):
    """Bands (lower, diag, upper) of the step Jacobian at W^n = w."""
    n = w.size
    lower = np.empty(n - 1)
    upper = np.empty(n - 1)
    diag = m_diag.copy()
    for j in range(n - 1):
        a = w[j]
        b = w[j + 1]
        s = diff_coef * inv_h[j]
        diag[j] += s - 0.5 * adv + (b - 4.0 * a) / 6.0
        diag[j + 1] += s + 0.5 * adv + (4.0 * b - a) / 6.0
        upper[j] = m_off[j] - s + 0.5 * adv + (a + 2.0 * b) / 6.0
        lower[j] = m_off[j] - s - 0.5 * adv - (2.0 * a + b) / 6.0
    if has0:
        diag[0] += bweight * (rob0 + 2.0 / (3.0 * c0) * w[0] * w[0])
    if has1:
        diag[n - 1] += bweight * (rob1 + 2.0 / (3.0 * c1) * w[n - 1] * w[n - 1])
    if dirichlet:
        diag[0] = 1.0
        if n > 1:
            upper[0] = 0.0
    return lower, diag, upper


@njit(cache=True)
def newton_step(
    w_old, m_off, m_diag, inv_h, nu, diff_coef, adv,
    has0, rob0, c0, has1, rob1, c1, bweight, dirichlet, tol, max_iters, history,
):
    """Newton's method for one step, started from delta = 0.

    Returns (delta, iterations, final residual max-norm, status). `history`
    (length >= max_iters + 1) receives the residual max-norm before each
    update and after the last one; unused entries are left untouched.
    """
    n = w_old.size
    r_old = old_residual(w_old, inv_h, nu, adv, has0, rob0, c0, has1, rob1, c1)
    delta = np.zeros(n)
    jumps = np.zeros(n - 1)
    r = increment_residual(
        delta, jumps, w_old, r_old, m_off, m_diag, inv_h, diff_coef, adv,
        has0, rob0, c0, has1, rob1, c1, bweight, dirichlet,
    )
    rn = np.max(np.abs(r))
    history[0] = rn
    for it in range(1, max_iters + 1):
        lower, diag, upper = jacobian_bands(
            w_old + delta, m_off, m_diag, inv_h, diff_coef, adv,
            has0, rob0, c0, has1, rob1, c1, bweight, dirichlet,
        )
        corr, row, piv = _thomas(lower, diag, upper, r, PIVOT_RTOL)
        if row >= 0:
            return delta, it, rn, BREAKDOWN
        for i in range(n):
            delta[i] -= corr[i]
        for j in range(n - 1):
            jumps[j] -= corr[j + 1] - corr[j]
        r = increment_residual(
            delta, jumps, w_old, r_old, m_off, m_diag, inv_h, diff_coef, adv,
            has0, rob0, c0, has1, rob1, c1, bweight, dirichlet,
        )
        rn = np.max(np.abs(r))
        history[it] = rn
        if not np.isfinite(rn):
            return delta, it, rn, NOT_CONVERGED
        if rn <= tol:
            return delta, it, rn, OK
    return delta, max_iters, rn, NOT_CONVERGED
