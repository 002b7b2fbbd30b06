"""Nonlinear Neumann feedback laws, decay-rate bounds and energy monitors.

All quantities refer to the shifted state ``w = u - w_d`` whose target is 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fem1d import _values


class BoundaryMode(str, Enum):
    BOTH_NEUMANN_CONTROL = "both_neumann_control"
    UNCONTROLLED_ZERO_NEUMANN = "uncontrolled_zero_neumann"
    DIRICHLET_LEFT_CONTROL_RIGHT = "dirichlet_left_control_right"

    @property
    def controlled_ends(self) -> tuple[int, ...]:
        """Boundary indices (0 -> x=0, 1 -> x=1) carrying a feedback law."""
        return {
            BoundaryMode.BOTH_NEUMANN_CONTROL: (0, 1),
            BoundaryMode.UNCONTROLLED_ZERO_NEUMANN: (),
            BoundaryMode.DIRICHLET_LEFT_CONTROL_RIGHT: (1,),
        }[self]


@dataclass(frozen=True)
class ModelParams:
    mu: float
    nu: float
    w_d: float
    c0: float = 1.0
    c1: float = 1.0
    mode: BoundaryMode = BoundaryMode.BOTH_NEUMANN_CONTROL

    def __post_init__(self):
        object.__setattr__(self, "mode", BoundaryMode(self.mode))
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if not (self.c0 > 0 and self.c1 > 0):
            raise ValueError("control gains c0, c1 must be positive")
        if self.mu < 0:
            raise ValueError(f"mu must be nonnegative, got {self.mu}")
        if self.w_d < 0:
            raise ValueError(f"w_d must be nonnegative, got {self.w_d}")

    def gain(self, i: int) -> float:
        return self.c0 if i == 0 else self.c1

    def robin(self, i: int) -> float:
        """Linear boundary coefficient 1 + c_i + w_d."""
        return 1.0 + self.gain(i) + self.w_d


def k0(w0_val, p: ModelParams):
    """Left control v0 = w_x(0) as a function of w(0)."""
    c = p.c0
    return ((c + 1.0 + p.w_d) * w0_val + 2.0 / (9.0 * c) * w0_val**3) / p.nu


def k1(w1_val, p: ModelParams):
    """Right control v1 = w_x(1) as a function of w(1)."""
    c = p.c1
    return -((c + 1.0 + p.w_d) * w1_val + 2.0 / (9.0 * c) * w1_val**3) / p.nu


def alpha_bound(p: ModelParams) -> float:
    """Largest guaranteed exponential decay rate for the controlled problem.

    Only the ends that carry a feedback law enter the minimum.
    """
    ends = p.mode.controlled_ends
    if not ends:
        raise ValueError("alpha_bound needs at least one controlled boundary")
    mu, nu = p.mu, p.nu
    terms = [nu / (mu + 1.0), nu / (2.0 * mu + nu)]
    for i in ends:
        r = p.robin(i)
        terms.append(nu * r / (nu + r * mu))
    return 0.5 * min(terms)


def beta_constant(p: ModelParams, alpha: float) -> float:
    bound = alpha_bound(p)
    if alpha < 0 or alpha > bound * (1.0 + 1e-14):
        raise ValueError(f"alpha={alpha} outside [0, {bound}]")
    mu, nu = p.mu, p.nu
    terms = [2.0 * (nu - alpha * (mu + 1.0)), 1.0 - 2.0 * alpha * mu / nu]
    for i in p.mode.controlled_ends:
        r = p.robin(i)
        terms.append(r - 2.0 * alpha * (r * mu / nu + 1.0))
    return min(terms)


def _ends(p, ends):
    return p.mode.controlled_ends if ends is None else ends


def _boundary_sum(p, w_vals, quartic, ends):
    total = 0.0
    for i in _ends(p, ends):
        wi = w_vals[i]
        total += (p.robin(i) + quartic / p.gain(i) * wi**2) * wi**2
    return total


def energy_e1(w, p: ModelParams, ends=None) -> float:
    """Boundary energy sum_i ((c_i+1+w_d) + w(i)^2/(3 c_i)) w(i)^2.

    `ends` defaults to the controlled ends of ``p.mode``.
    """
    v = _values(w)
    return _boundary_sum(p, (v[0], v[-1]), 1.0 / 3.0, ends)


def energy_e2(w, p: ModelParams, ends=None) -> float:
    v = _values(w)
    return _boundary_sum(p, (v[0], v[-1]), 1.0 / 9.0, ends)


def energy_e3(w_t_boundary, w_boundary, p: ModelParams, ends=None) -> float:
    """sum_i ((1+c_i+w_d) + 2 w(i)^2/(3 c_i)) w_t(i)^2 from boundary values."""
    total = 0.0
    for i in _ends(p, ends):
        total += (p.robin(i) + 2.0 / (3.0 * p.gain(i)) * w_boundary[i] ** 2) * w_t_boundary[i] ** 2
    return total


def energy_e4(z, w1, p: ModelParams, ends=None) -> float:
    """Boundary part of the distance functional between two trajectories.

    `z` is the difference w1 - w2 and `w1` the first trajectory.
    """
    zv, wv = _values(z), _values(w1)
    zb, wb = (zv[0], zv[-1]), (wv[0], wv[-1])
    total = 0.0
    for i in _ends(p, ends):
        total += (p.robin(i) + wb[i] ** 2 / (3.0 * p.gain(i))) * zb[i] ** 2
    return p.mu / p.nu * total


def control_values(w, p: ModelParams) -> tuple[float, float]:
    """(v0, v1) actually applied; an uncontrolled end reports 0."""
    v = _values(w)
    ends = p.mode.controlled_ends
    v0 = float(k0(v[0], p)) if 0 in ends else 0.0
    v1 = float(k1(v[-1], p)) if 1 in ends else 0.0
    return v0, v1


@dataclass(frozen=True)
class EnergySample:
    t: float
    e1: float
    e2: float
    e3: float
    lyapunov: float
    v0: float
    v1: float


def lyapunov(w, p: ModelParams, mass, stiffness) -> float:
    """||w||^2 + mu ||w_x||^2 + (mu/nu) E1(w)."""
    v = _values(w)
    return float(v @ (mass @ v) + p.mu * (v @ (stiffness @ v)) + p.mu / p.nu * energy_e1(v, p))


def energy_sample(t, w, w_prev, dt, p: ModelParams, mass, stiffness) -> EnergySample:
    """Monitor values at time t; E3 uses the backward difference (w - w_prev)/dt.

    Pass ``w_prev=None`` at the initial time, where E3 is reported as 0.
    """
    v = _values(w)
    wb = (v[0], v[-1])
    if w_prev is None:
        e3 = 0.0
    else:
        vp = _values(w_prev)
        wt = ((v[0] - vp[0]) / dt, (v[-1] - vp[-1]) / dt)
        e3 = energy_e3(wt, wb, p)
    v0, v1 = control_values(v, p)
    return EnergySample(
        t=float(t),
        e1=energy_e1(v, p),
        e2=energy_e2(v, p),
        e3=float(e3),
        lyapunov=lyapunov(v, p, mass, stiffness),
        v0=v0,
        v1=v1,
    )


def is_monotone_nonincreasing(values, rtol: float = 1e-6) -> bool:
    values = np.asarray(values, dtype=float)
    return bool(np.all(values[1:] <= values[:-1] * (1.0 + rtol)))
