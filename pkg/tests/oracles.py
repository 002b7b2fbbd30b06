"""Reference computations that share no code with the package under test."""

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import solve_banded


def hat(nodes, j, x):
    """Hat function j evaluated at x."""
    y = np.zeros_like(x, dtype=float)
    if j > 0:
        a, b = nodes[j - 1], nodes[j]
        m = (x >= a) & (x <= b)
        y[m] = (x[m] - a) / (b - a)
    if j < len(nodes) - 1:
        a, b = nodes[j], nodes[j + 1]
        m = (x >= a) & (x <= b)
        y[m] = (b - x[m]) / (b - a)
    return y


def hat_slope(nodes, j, x):
    """Derivative of hat j at x (interior of cells; x on a node takes the right cell)."""
    y = np.zeros_like(x, dtype=float)
    if j > 0:
        a, b = nodes[j - 1], nodes[j]
        m = (x > a) & (x < b)
        y[m] = 1.0 / (b - a)
    if j < len(nodes) - 1:
        a, b = nodes[j], nodes[j + 1]
        m = (x > a) & (x < b)
        y[m] = -1.0 / (b - a)
    return y


def gauss_integrate(g, nodes, npts=6):
    """Integrate g over [0, 1] cell by cell with npts-point Gauss rules."""
    xi, wq = np.polynomial.legendre.leggauss(npts)
    total = 0.0
    for a, b in zip(nodes[:-1], nodes[1:]):
        x = 0.5 * (b - a) * xi + 0.5 * (a + b)
        total += 0.5 * (b - a) * np.sum(wq * g(x))
    return total


def dense_matrix(nodes, form):
    """Dense Galerkin matrix [form(j, i)] by quadrature; form returns an integrand."""
    n = len(nodes)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = gauss_integrate(form(j, i), nodes)
    return out


def fd_bbmb(w0, mu, nu, w_d, c0, c1, mode, n, t_eval, rtol=1e-9, atol=1e-11):
    """Method-of-lines solution on n uniform intervals with ghost-point Neumann data.

    Solves (I - mu D2) w_t = nu D2 w - (1 + w_d + w) D1 w, where the ghost values
    carry w_x(0) = K0(w(0)), w_x(1) = K1(w(1)) (or zero data), and the ghost
    values of w_t carry the time derivatives of those laws. Returns the grid
    and the solution at t_eval (array of shape (len(t_eval), n + 1)).
    """
    h = 1.0 / n
    x = np.linspace(0.0, 1.0, n + 1)
    dirichlet = mode == "dirichlet_left_control_right"
    left_ctrl = mode == "both_neumann_control"
    right_ctrl = mode in ("both_neumann_control", "dirichlet_left_control_right")

    def K0(s):
        return ((c0 + 1 + w_d) * s + 2 / (9 * c0) * s**3) / nu

    def dK0(s):
        return ((c0 + 1 + w_d) + 2 / (3 * c0) * s**2) / nu

    def K1(s):
        return -((c1 + 1 + w_d) * s + 2 / (9 * c1) * s**3) / nu

    def dK1(s):
        return -((c1 + 1 + w_d) + 2 / (3 * c1) * s**2) / nu

    def rhs(t, w):
        w = w.copy()
        if dirichlet:
            w[0] = 0.0
        g0 = K0(w[0]) if left_ctrl else 0.0
        g1 = K1(w[-1]) if right_ctrl else 0.0
        ext = np.empty(n + 3)
        ext[1:-1] = w
        ext[0] = w[1] - 2 * h * g0
        ext[-1] = w[-2] + 2 * h * g1
        d2 = (ext[2:] - 2 * ext[1:-1] + ext[:-2]) / h**2
        d1 = (ext[2:] - ext[:-2]) / (2 * h)
        f = nu * d2 - (1 + w_d + w) * d1
        # banded (I - mu D2_t)
        ab = np.zeros((3, n + 1))
        ab[1, :] = 1 + 2 * mu / h**2
        ab[0, 1:] = -mu / h**2
        ab[2, :-1] = -mu / h**2
        ab[0, 1] = -2 * mu / h**2
        ab[2, -2] = -2 * mu / h**2
        if left_ctrl:
            ab[1, 0] += mu * 2 * h * dK0(w[0]) / h**2
        if right_ctrl:
            ab[1, -1] -= mu * 2 * h * dK1(w[-1]) / h**2
        if dirichlet:
            ab[1, 0] = 1.0
            ab[0, 1] = 0.0
            f[0] = 0.0
        return solve_banded((1, 1), ab, f)

    y0 = np.asarray(w0(x), dtype=float)
    if dirichlet:
        y0[0] = 0.0
    sol = solve_ivp(rhs, (0.0, t_eval[-1]), y0, method="BDF", t_eval=t_eval, rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(sol.message)
    return x, sol.y.T


def trapezoid_l2(x, w):
    return float(np.sqrt(np.trapezoid(w**2, x)))
