"""Backward Euler time stepping with Newton's method.

Each step solves, for W = W^n given W_old = W^{n-1},

    M (W - W_old)/k + mu A (W - W_old)/k + nu A W + (1 + w_d) B W + N(W)
        + sum over controlled ends i of
          [ r_i W(i) + 2/(9 c_i) W(i)^3 ]
          + (mu/nu) [ r_i (W(i) - W_old(i))/k + 2/(9 c_i) (W(i)^3 - W_old(i)^3)/k ]  = 0

with r_i = 1 + c_i + w_d. Newton iterates on the increment W - W_old rather
than on W itself: the boundary rows carry coefficients of order 1/k, and
W's own rounding would otherwise put a floor around 1e-10 under the residual.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels, norms
from .fem1d import NodalField, Operators, _values, assemble_operators
from .feedback import BoundaryMode, EnergySample, ModelParams, energy_sample
from .linalg import TriDiag, thomas_solve

__all__ = [
    "NewtonDivergence",
    "SimulationResult",
    "StepperConfig",
    "advance_step",
    "jacobian",
    "residual",
    "run_simulation",
    "thomas_solve",
]


class NewtonDivergence(RuntimeError):
    def __init__(self, residual_norm, iterations, t=None):
        where = "" if t is None else f" at t={t:.6g}"
        super().__init__(
            f"Newton failed{where}: residual {residual_norm:.3e} after {iterations} iterations"
        )
        self.residual_norm = residual_norm
        self.iterations = iterations
        self.t = t


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    t_end: float
    newton_tol: float = 1e-10
    newton_max_iters: int = 25
    record_every: int = 1
    store_fields: bool = False
    keep_newton_history: bool = False

    def __post_init__(self):
        if not (self.dt > 0 and self.t_end > 0 and self.newton_tol > 0):
            raise ValueError("dt, t_end and newton_tol must be positive")
        if self.newton_max_iters < 1 or self.record_every < 1:
            raise ValueError("newton_max_iters and record_every must be >= 1")

    @property
    def n_steps(self) -> int:
        n = int(round(self.t_end / self.dt))
        if n < 1 or abs(n * self.dt - self.t_end) > 1e-9 * self.t_end:
            raise ValueError(f"t_end={self.t_end} is not a whole number of steps dt={self.dt}")
        return n


class _StepSystem:
    """Per-run constants of one backward Euler step, laid out for the kernels.

    With w = w_old + d the residual is split as

        R(d) = R_old + M d / k + (mu/k + nu) A d + (1 + w_d) B d
               + J_N(w_old) d + N(d) + boundary(d),

    where R_old collects everything depending on w_old alone. N is quadratic,
    so the split is exact. Stiffness-like products are formed from the
    jumps of d, which Newton carries as separate unknowns: d is nearly
    uniform when the state drifts as a whole, and its own rounding times
    mu/(k h) would otherwise exceed the 1e-10 residual tolerance.
    """

    def __init__(self, p: ModelParams, dt: float, ops: Operators):
        mass = ops.mass
        self.m_off = np.ascontiguousarray(mass.upper / dt)
        self.m_diag = np.ascontiguousarray(mass.diag / dt)
        self.inv_h = 1.0 / ops.mesh.cell_widths
        self.nu = p.nu
        self.diff_coef = p.mu / dt + p.nu
        self.adv = 1.0 + p.w_d
        ends = p.mode.controlled_ends
        has0, has1 = 0 in ends, 1 in ends
        self.end0 = (has0, p.robin(0) if has0 else 0.0, p.gain(0) if has0 else 1.0)
        self.end1 = (has1, p.robin(1) if has1 else 0.0, p.gain(1) if has1 else 1.0)
        # weight of the boundary increment terms: 1 from the feedback, mu/(nu k) from its time derivative
        self.bweight = 1.0 + p.mu / (p.nu * dt)
        self.dirichlet = p.mode is BoundaryMode.DIRICHLET_LEFT_CONTROL_RIGHT

    def residual(self, w_new, w_old):
        r_old = _kernels.old_residual(w_old, self.inv_h, self.nu, self.adv, *self.end0, *self.end1)
        delta = w_new - w_old
        return _kernels.increment_residual(
            delta, np.diff(delta), w_old, r_old, self.m_off, self.m_diag, self.inv_h,
            self.diff_coef, self.adv, *self.end0, *self.end1, self.bweight, self.dirichlet,
        )

    def jacobian(self, w) -> TriDiag:
        lower, diag, upper = _kernels.jacobian_bands(
            w, self.m_off, self.m_diag, self.inv_h, self.diff_coef, self.adv,
            *self.end0, *self.end1, self.bweight, self.dirichlet,
        )
        return TriDiag(lower, diag, upper)

    def newton(self, w_old, tol, max_iters, history=None, out=None):
        hist = np.full(max_iters + 1, np.nan) if out is None else out
        delta, it, rn, status = _kernels.newton_step(
            w_old, self.m_off, self.m_diag, self.inv_h, self.nu, self.diff_coef, self.adv,
            *self.end0, *self.end1, self.bweight, self.dirichlet, tol, max_iters, hist,
        )
        if history is not None:
            history.extend(hist[: it + 1 if status != _kernels.BREAKDOWN else it].tolist())
        if status != _kernels.OK:
            raise NewtonDivergence(float(rn), int(it))
        return delta, int(it), float(rn)


def _system(p, dt, ops, mesh):
    return _StepSystem(p, dt, assemble_operators(mesh) if ops is None else ops)


def _float_array(w):
    return np.ascontiguousarray(_values(w), dtype=float)


def residual(w_new, w_old, p: ModelParams, dt: float, ops: Operators | None = None) -> np.ndarray:
    """Residual of the fully discrete scheme at candidate W^n = `w_new`.

    `dt` may also be a StepperConfig. In Dirichlet-left mode row 0 is the
    constraint W^n(0) = 0.
    """
    dt = getattr(dt, "dt", dt)
    mesh = w_new.mesh if isinstance(w_new, NodalField) else None
    if ops is None and mesh is None:
        raise ValueError("pass ops when using plain arrays")
    return _system(p, dt, ops, mesh).residual(_float_array(w_new), _float_array(w_old))


def jacobian(w_new, p: ModelParams, dt: float, ops: Operators | None = None) -> TriDiag:
    dt = getattr(dt, "dt", dt)
    mesh = w_new.mesh if isinstance(w_new, NodalField) else None
    if ops is None and mesh is None:
        raise ValueError("pass ops when using plain arrays")
    return _system(p, dt, ops, mesh).jacobian(_float_array(w_new))


def advance_step(w_old: NodalField, p: ModelParams, cfg: StepperConfig, ops=None, history=None):
    """One backward Euler step, Newton started from `w_old`.

    Returns ``(w_new, iterations)``. If `history` is a list, the max-norm of
    the residual before each Newton update and after the last is appended.
    """
    sys = _system(p, cfg.dt, ops, w_old.mesh)
    wo = _float_array(w_old)
    delta, iters, _ = sys.newton(wo, cfg.newton_tol, cfg.newton_max_iters, history)
    return NodalField(w_old.mesh, wo + delta), iters


@dataclass
class SimulationResult:
    params: ModelParams
    config: StepperConfig
    times: np.ndarray
    l2: np.ndarray
    linf: np.ndarray
    tnorm: np.ndarray
    energy_samples: list[EnergySample]
    newton_iters: np.ndarray  # per time step
    newton_residuals: np.ndarray  # final residual per time step
    final_state: NodalField
    fields: list[NodalField] | None = None
    sample_iters: np.ndarray = field(default=None)  # iterations of the step producing each sample
    # row n-1: residual max-norms of step n before each update and after the last, NaN-padded
    newton_history: np.ndarray | None = None

    @property
    def max_newton_iters(self) -> int:
        return int(self.newton_iters.max()) if self.newton_iters.size else 0

    @property
    def mean_newton_iters(self) -> float:
        return float(self.newton_iters.mean()) if self.newton_iters.size else 0.0

    def column(self, name: str) -> np.ndarray:
        """Energy-sample attribute as an array, e.g. ``column("lyapunov")``."""
        return np.array([getattr(s, name) for s in self.energy_samples])


def run_simulation(w0h: NodalField, p: ModelParams, cfg: StepperConfig, ops=None) -> SimulationResult:
    """Integrate from W^0 = `w0h` up to ``cfg.t_end``.

    Samples are taken at step 0, every ``cfg.record_every`` steps, and at the
    final step.

    Raises
    ------
    NewtonDivergence
        With ``t`` set to the time level that failed.
    """
    mesh = w0h.mesh
    ops = assemble_operators(mesh) if ops is None else ops
    sys = _StepSystem(p, cfg.dt, ops)
    n_steps = cfg.n_steps
    mass, stiff = ops.mass, ops.stiffness

    times, l2, linf, tn, samples, fields, s_iters = [], [], [], [], [], [], []
    iters = np.zeros(n_steps, dtype=int)
    res = np.zeros(n_steps)
    hist = np.full((n_steps, cfg.newton_max_iters + 1), np.nan) if cfg.keep_newton_history else None

    def record(n, w, w_prev, it):
        f = NodalField(mesh, w)
        t = n * cfg.dt
        times.append(t)
        l2.append(norms.l2_norm(f, mass))
        linf.append(norms.linf_norm(f))
        tn.append(norms.tnorm(f, stiff))
        samples.append(energy_sample(t, w, w_prev, cfg.dt, p, mass, stiff))
        s_iters.append(it)
        if cfg.store_fields:
            fields.append(f)

    w = np.array(w0h.values, dtype=float)
    record(0, w, None, 0)
    for n in range(1, n_steps + 1):
        try:
            out = None if hist is None else hist[n - 1]
            delta, it, rn = sys.newton(w, cfg.newton_tol, cfg.newton_max_iters, out=out)
        except NewtonDivergence as exc:
            raise NewtonDivergence(exc.residual_norm, exc.iterations, t=n * cfg.dt) from None
        w_prev, w = w, w + delta
        iters[n - 1], res[n - 1] = it, rn
        if n % cfg.record_every == 0 or n == n_steps:
            record(n, w, w_prev, it)

    return SimulationResult(
        params=p,
        config=cfg,
        times=np.array(times),
        l2=np.array(l2),
        linf=np.array(linf),
        tnorm=np.array(tn),
        energy_samples=samples,
        newton_iters=iters,
        newton_residuals=res,
        final_state=NodalField(mesh, w),
        fields=fields if cfg.store_fields else None,
        sample_iters=np.array(s_iters, dtype=int),
        newton_history=hist,
    )
