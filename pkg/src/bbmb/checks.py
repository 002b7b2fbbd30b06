"""Fast self-checks of the discretization, run by ``bbmb check``.

Each check returns ``(passed, detail)``. Everything here finishes in well
under a second per check, so the suite is cheap enough to run after
installing on a new machine.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from . import feedback, fem1d, norms, stepper
from .feedback import BoundaryMode, ModelParams
from .fem1d import NodalField
from .linalg import TriDiag, thomas_solve
from .mesh import Mesh, uniform_mesh

_RNG_SEED = 20240611
_EX1 = dict(mu=0.5, nu=0.5, w_d=3.0)


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def _meshes():
    return [uniform_mesh(1), uniform_mesh(3), Mesh([0.0, 0.1, 0.45, 0.5, 1.0])]


def _max_abs(x) -> float:
    return float(np.max(np.abs(x))) if np.size(x) else 0.0


def check_operator_identities():
    worst = 0.0
    for m in _meshes():
        mass = fem1d.assemble_mass(m)
        stiff = fem1d.assemble_stiffness(m)
        conv = fem1d.assemble_convection(m)
        ones = np.ones(m.n_nodes)
        edge = np.zeros((m.n_nodes, m.n_nodes))
        edge[0, 0], edge[-1, -1] = -1.0, 1.0
        worst = max(
            worst,
            abs(ones @ (mass @ ones) - 1.0),
            _max_abs(stiff @ ones),
            _max_abs(conv @ ones),
            _max_abs(conv.to_dense() + conv.to_dense().T - edge),
            _max_abs(mass.lower - mass.upper),
            _max_abs(stiff.lower - stiff.upper),
        )
    return worst <= 1e-12, f"max deviation {worst:.2e}"


def _fd_jacobian(fun, w, eps=1e-6):
    cols = []
    for j in range(w.size):
        e = np.zeros_like(w)
        e[j] = eps
        cols.append((fun(w + e) - fun(w - e)) / (2 * eps))
    return np.column_stack(cols)


def check_convection_jacobian():
    rng = np.random.default_rng(_RNG_SEED)
    w = rng.uniform(-2, 2, 5)
    exact = fem1d.nonlinear_convection_jacobian(w).to_dense()
    err = _max_abs(exact - _fd_jacobian(fem1d.nonlinear_convection, w))
    return err <= 1e-6, f"max |J - J_fd| = {err:.2e}"


def check_step_jacobian():
    rng = np.random.default_rng(_RNG_SEED + 1)
    m = uniform_mesh(4)
    ops = fem1d.assemble_operators(m)
    worst = 0.0
    for mode in BoundaryMode:
        p = ModelParams(**_EX1, mode=mode)
        w_old = rng.uniform(-1, 1, m.n_nodes)
        w = rng.uniform(-1, 1, m.n_nodes)
        exact = stepper.jacobian(w, p, 0.1, ops).to_dense()
        fd = _fd_jacobian(lambda v: stepper.residual(v, w_old, p, 0.1, ops), w)
        worst = max(worst, _max_abs(exact - fd) / max(1.0, _max_abs(exact)))
    return worst <= 1e-6, f"max relative |J - J_fd| = {worst:.2e}"


def check_discrete_laplacian():
    rng = np.random.default_rng(_RNG_SEED + 2)
    m = Mesh([0.0, 0.2, 0.5, 0.7, 1.0])
    ops = fem1d.assemble_operators(m)
    v = NodalField(m, rng.normal(size=m.n_nodes))
    lap = fem1d.discrete_laplacian_apply(v, ops.mass, ops.stiffness)
    lhs = -(ops.mass @ lap.values)
    s = v.slopes
    rhs = ops.stiffness @ v.values
    rhs[0] += s[0]
    rhs[-1] -= s[-1]
    err = _max_abs(lhs - rhs)
    return err <= 1e-12, f"identity defect {err:.2e}"


def check_projection_identity():
    m = Mesh([0.0, 0.3, 0.35, 0.8, 1.0])
    vals = np.array([1.0, -2.0, 0.5, 3.0, -1.0])
    f = NodalField(m, vals)
    slopes = f.slopes

    def df(x):
        idx = np.clip(np.searchsorted(m.nodes, x, side="right") - 1, 0, m.n_cells - 1)
        return slopes[idx]

    err = _max_abs(fem1d.auxiliary_projection(f, df, m).values - vals)
    return err <= 1e-12, f"max nodal error {err:.2e}"


def check_thomas():
    rng = np.random.default_rng(_RNG_SEED + 3)
    n = 50
    lower, upper = rng.uniform(-1, 1, n - 1), rng.uniform(-1, 1, n - 1)
    diag = 3.0 + rng.uniform(0, 1, n)
    m = TriDiag(lower, diag, upper)
    rhs = rng.normal(size=n)
    x = thomas_solve(m, rhs)
    res = _max_abs(m @ x - rhs)
    bound = 1e-10 * m.norm_inf() * _max_abs(x)
    return res <= bound, f"residual {res:.2e} (bound {bound:.2e})"


def check_norm_inequalities():
    rng = np.random.default_rng(_RNG_SEED + 4)
    m = uniform_mesh(7)
    worst_agmon = worst_pw = -np.inf
    for _ in range(50):
        w = NodalField(m, rng.normal(size=m.n_nodes))
        worst_agmon = max(worst_agmon, norms.linf_norm(w) - np.sqrt(2) * norms.tnorm(w))
        grad2 = norms.h1_seminorm(w) ** 2
        for i in (0, -1):
            worst_pw = max(worst_pw, norms.l2_norm(w) ** 2 - (2 * w.values[i] ** 2 + grad2))
    ok = worst_agmon <= 1e-12 and worst_pw <= 1e-12
    return ok, f"Agmon slack {-worst_agmon:.3g}, Poincare-Wirtinger slack {-worst_pw:.3g}"


def check_feedback_laws():
    p = ModelParams(**_EX1, mode=BoundaryMode.BOTH_NEUMANN_CONTROL)
    s = np.linspace(-3, 3, 61)
    k0 = feedback.k0(s, p)
    k1 = feedback.k1(s, p)
    ok = bool(np.all(np.diff(k0) > 0) and np.all(np.diff(k1) < 0))
    ok &= abs(feedback.alpha_bound(p) - 1 / 6) < 1e-15
    return ok, "K0 increasing, K1 decreasing, alpha bound 1/6 at mu = nu = 0.5, w_d = 3"


def check_origin_fixed_point():
    m = uniform_mesh(6)
    ops = fem1d.assemble_operators(m)
    z = np.zeros(m.n_nodes)
    worst = max(
        _max_abs(stepper.residual(z, z, ModelParams(**_EX1, mode=mode), 1e-4, ops))
        for mode in BoundaryMode
    )
    return worst == 0.0, f"residual at the origin {worst:.1e}"


def _short_run(mode, n_cells=20, steps=200):
    p = ModelParams(**_EX1, mode=mode)
    m = uniform_mesh(n_cells)
    w0 = fem1d.auxiliary_projection(
        lambda x: 20.0 * (0.5 - x) ** 3 - 3.0, lambda x: -60.0 * (0.5 - x) ** 2, m
    )
    if mode is BoundaryMode.DIRICHLET_LEFT_CONTROL_RIGHT:
        w0 = NodalField(m, np.concatenate([[0.0], w0.values[1:]]))
    cfg = stepper.StepperConfig(dt=1e-3, t_end=steps * 1e-3, record_every=1, store_fields=True)
    return stepper.run_simulation(w0, p, cfg)


def check_lyapunov_decay():
    r = _short_run(BoundaryMode.BOTH_NEUMANN_CONTROL)
    lyap = r.column("lyapunov")
    ok = feedback.is_monotone_nonincreasing(lyap)
    return ok, f"Lyapunov {lyap[0]:.4g} -> {lyap[-1]:.4g} over {lyap.size - 1} steps"


def check_dirichlet_constraint():
    r = _short_run(BoundaryMode.DIRICHLET_LEFT_CONTROL_RIGHT)
    worst = max(abs(f.values[0]) for f in r.fields)
    return worst == 0.0, f"max |W(0)| = {worst:.1e}"


def check_determinism():
    a = _short_run(BoundaryMode.BOTH_NEUMANN_CONTROL, steps=50)
    b = _short_run(BoundaryMode.BOTH_NEUMANN_CONTROL, steps=50)
    same = all(np.array_equal(x.values, y.values) for x, y in zip(a.fields, b.fields))
    return same, "repeated runs bitwise identical" if same else "repeated runs differ"


CHECKS: dict[str, Callable[[], tuple[bool, str]]] = {
    "operator identities": check_operator_identities,
    "convection Jacobian vs finite differences": check_convection_jacobian,
    "step Jacobian vs finite differences": check_step_jacobian,
    "discrete Laplacian identity": check_discrete_laplacian,
    "projection reproduces piecewise linears": check_projection_identity,
    "tridiagonal solver residual": check_thomas,
    "Agmon and Poincare-Wirtinger inequalities": check_norm_inequalities,
    "feedback law monotonicity": check_feedback_laws,
    "origin is a fixed point": check_origin_fixed_point,
    "Lyapunov value non-increasing": check_lyapunov_decay,
    "Dirichlet value held at zero": check_dirichlet_constraint,
    "bitwise determinism": check_determinism,
}


def run_checks() -> list[CheckResult]:
    out = []
    for name, fn in CHECKS.items():
        try:
            passed, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(passed), detail))
    return out
