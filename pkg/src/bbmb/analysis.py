"""Post-processing: norms, decay-rate fits, refined-mesh convergence studies,
the mu -> 0 sweep and the continuous-dependence check."""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .fem1d import NodalField, assemble_operators, auxiliary_projection
from .feedback import ModelParams, energy_e4, control_values
from .mesh import Mesh, is_nested, refine, uniform_mesh
from .norms import h1_seminorm, l2_norm, linf_norm, tnorm
from .stepper import SimulationResult, StepperConfig, run_simulation

__all__ = [
    "ContinuousDependenceReport",
    "ConvergenceRow",
    "MuSweepResult",
    "continuous_dependence_check",
    "convergence_study",
    "errors_against_reference",
    "fill_orders",
    "fit_decay_rate",
    "h1_seminorm",
    "l2_norm",
    "linf_norm",
    "mu_sweep",
    "prolongate",
    "tnorm",
]


def fit_decay_rate(times, values, transient_fraction: float = 0.1) -> float:
    """Least-squares slope of -log(values) against time.

    The first `transient_fraction` of the samples is dropped before fitting,
    so a series ``exp(-a t)`` gives back ``a``.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape or t.size < 2:
        raise ValueError("need at least two samples of matching shape")
    start = int(np.floor(transient_fraction * t.size))
    t, y = t[start:], y[start:]
    if t.size < 2:
        raise ValueError("fewer than two samples left after dropping the transient")
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ValueError("values inside the fit window must be positive and finite")
    slope, _ = np.polyfit(t, -np.log(y), 1)
    return float(slope)


@dataclass
class ConvergenceRow:
    h: float
    e_l2: float
    e_linf: float
    e_tnorm: float
    e_v0: float
    e_v1: float
    order_l2: float | None = None
    order_linf: float | None = None
    order_tnorm: float | None = None
    order_v0: float | None = None
    order_v1: float | None = None

    ERRORS = ("l2", "linf", "tnorm", "v0", "v1")


def _order(e_prev, e_cur, h_prev, h_cur):
    if e_prev <= 0 or e_cur <= 0:
        return float("nan")
    return float(np.log(e_prev / e_cur) / np.log(h_prev / h_cur))


def fill_orders(rows: list[ConvergenceRow]) -> list[ConvergenceRow]:
    """Observed orders of each row against the one before it (log2 ratio for halved h)."""
    for prev, cur in zip(rows, rows[1:]):
        for name in ConvergenceRow.ERRORS:
            order = _order(getattr(prev, f"e_{name}"), getattr(cur, f"e_{name}"), prev.h, cur.h)
            setattr(cur, f"order_{name}", order)
    return rows


def prolongate(w: NodalField, fine: Mesh) -> NodalField:
    """Interpolate `w` onto a mesh nested inside its own; exact for such meshes."""
    if not is_nested(w.mesh, fine):
        raise ValueError("target mesh is not a refinement of the field's mesh")
    return NodalField(fine, w(fine.nodes))


def errors_against_reference(w_h: NodalField, w_ref: NodalField, p: ModelParams) -> ConvergenceRow:
    """Errors of `w_h` measured on the (finer, nested) reference mesh."""
    diff = prolongate(w_h, w_ref.mesh) - w_ref
    v_h = control_values(w_h, p)
    v_ref = control_values(w_ref, p)
    return ConvergenceRow(
        h=w_h.mesh.h_max,
        e_l2=l2_norm(diff),
        e_linf=linf_norm(diff),
        e_tnorm=tnorm(diff),
        e_v0=abs(v_h[0] - v_ref[0]),
        e_v1=abs(v_h[1] - v_ref[1]),
    )


def _simulate(args):
    w0, p, cfg = args
    return run_simulation(w0, p, cfg)


def _run_all(tasks, max_workers):
    if max_workers is None or max_workers <= 1 or len(tasks) <= 1:
        return [_simulate(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(_simulate, tasks))


def _as_mesh(m):
    return m if isinstance(m, Mesh) else uniform_mesh(m)


def convergence_study(
    p: ModelParams,
    cfg: StepperConfig,
    meshes,
    ref_factor: int,
    t_eval: float,
    initial,
    max_workers: int | None = 1,
) -> list[ConvergenceRow]:
    """Spatial convergence against a refined-mesh reference solution.

    Parameters
    ----------
    meshes : sequence of Mesh or int
        Mesh family with strictly decreasing h; integers mean uniform meshes.
    ref_factor : int
        The reference mesh is the finest mesh refined this many times (>= 4).
    t_eval : float
        Time at which errors are measured; every run uses ``cfg.dt``.
    initial : pair of callables ``(f, df)``, or callable ``mesh -> NodalField``
        A pair is an analytic initial state and its derivative, projected
        onto each mesh; a single callable builds W^0 itself.

    Notes
    -----
    Coarse solutions are interpolated onto the reference mesh (exact, since
    the meshes are nested) and the norms are taken there.
    """
    meshes = [_as_mesh(m) for m in meshes]
    if not meshes:
        raise ValueError("need at least one mesh")
    hs = [m.h_max for m in meshes]
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValueError("mesh sizes must be strictly decreasing")
    if ref_factor < 4:
        raise ValueError("ref_factor must be at least 4")
    ref_mesh = refine(meshes[-1], ref_factor)
    for m in meshes:
        if not is_nested(m, ref_mesh):
            raise ValueError(f"{m} is not nested in the reference mesh")

    if callable(initial):
        build = initial
    else:
        f, df = initial

        def build(m):
            return auxiliary_projection(f, df, m)

    run_cfg = dataclasses.replace(cfg, t_end=t_eval, record_every=10**9, store_fields=False)
    all_meshes = meshes + [ref_mesh]
    tasks = [(build(m), p, run_cfg) for m in all_meshes]
    results = _run_all(tasks, max_workers)
    ref = results[-1].final_state
    rows = [errors_against_reference(r.final_state, ref, p) for r in results[:-1]]
    return fill_orders(rows)


@dataclass
class MuSweepResult:
    mus: list[float]
    results: list[SimulationResult]
    deviations: np.ndarray  # sup_t |l2_mu(t) - l2_0(t)| per entry

    @property
    def trajectories(self):
        return [(r.times, r.l2) for r in self.results]


def mu_sweep(base: ModelParams, cfg: StepperConfig, mus, w0h: NodalField, max_workers=1) -> MuSweepResult:
    """Run the same scenario for every mu in `mus` (0 must be among them).

    Deviation of each entry is the sup over recorded times of its L2 norm
    minus the L2 norm of the mu = 0 run.
    """
    mus = [float(m) for m in mus]
    if 0.0 not in mus:
        raise ValueError("mus must include 0 (the Burgers limit)")
    tasks = [(w0h, dataclasses.replace(base, mu=m), cfg) for m in mus]
    results = _run_all(tasks, max_workers)
    ref = results[mus.index(0.0)].l2
    dev = np.array([float(np.max(np.abs(r.l2 - ref))) for r in results])
    return MuSweepResult(mus, results, dev)


@dataclass
class ContinuousDependenceReport:
    times: np.ndarray
    distance: np.ndarray  # D(t) = ||z||^2 + mu ||z_x||^2 + E4(t)
    kappa: float
    identical: bool  # trajectories bitwise equal at every recorded time

    @property
    def d0(self) -> float:
        return float(self.distance[0])

    @property
    def sup_distance(self) -> float:
        return float(self.distance.max())

    @property
    def ratio(self) -> float:
        if self.d0 == 0.0:
            return 0.0 if self.sup_distance == 0.0 else float("inf")
        return self.sup_distance / self.d0

    @property
    def passed(self) -> bool:
        return self.sup_distance <= self.kappa * self.d0


def continuous_dependence_check(
    w10: NodalField, w20: NodalField, p: ModelParams, cfg: StepperConfig, kappa: float = 100.0
) -> ContinuousDependenceReport:
    if w10.mesh != w20.mesh:
        raise ValueError("initial fields must share a mesh")
    run_cfg = dataclasses.replace(cfg, store_fields=True)
    r1 = run_simulation(w10, p, run_cfg)
    r2 = run_simulation(w20, p, run_cfg)
    ops = assemble_operators(w10.mesh)
    dist = []
    identical = True
    for a, b in zip(r1.fields, r2.fields):
        z = (a - b).values
        identical &= bool(np.array_equal(a.values, b.values))
        d = z @ (ops.mass @ z) + p.mu * (z @ (ops.stiffness @ z)) + energy_e4(z, a, p)
        dist.append(float(d))
    return ContinuousDependenceReport(r1.times, np.array(dist), kappa, identical)
