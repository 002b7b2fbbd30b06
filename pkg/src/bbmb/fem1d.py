"""Piecewise-linear Galerkin operators on a 1D mesh.

Every routine here works with hat-function coefficients, i.e. nodal values.
Mass, stiffness and linear convection matrices use exact element formulas;
the quadratic convection term ``(w w_x, phi_i)`` is also integrated in closed
form, since its integrand is a cubic polynomial on each cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import TriDiag, thomas_solve
from .mesh import Mesh

# lambda in (w_x - P w_x, chi_x) + lambda (w - P w, chi) = 0; 1 makes P the H1 projection
PROJECTION_LAMBDA = 1.0

_GAUSS4 = np.polynomial.legendre.leggauss(4)


@dataclass(frozen=True, eq=False)
class NodalField:
    """Continuous piecewise-linear function given by its nodal values."""

    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.mesh.n_nodes,):
            raise ValueError(
                f"expected {self.mesh.n_nodes} nodal values, got shape {values.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def interpolate(cls, f, mesh: Mesh) -> NodalField:
        return cls(mesh, np.asarray(f(mesh.nodes), dtype=float) * np.ones(mesh.n_nodes))

    @classmethod
    def zeros(cls, mesh: Mesh) -> NodalField:
        return cls(mesh, np.zeros(mesh.n_nodes))

    def __call__(self, x):
        return np.interp(x, self.mesh.nodes, self.values)

    @property
    def slopes(self) -> np.ndarray:
        """Derivative on each cell."""
        return np.diff(self.values) / self.mesh.cell_widths

    @property
    def boundary(self) -> tuple[float, float]:
        return float(self.values[0]), float(self.values[-1])

    def __add__(self, other):
        return NodalField(self.mesh, self.values + _values(other))

    def __sub__(self, other):
        return NodalField(self.mesh, self.values - _values(other))

    def __mul__(self, s):
        return NodalField(self.mesh, float(s) * self.values)

    __rmul__ = __mul__

    def __neg__(self):
        return NodalField(self.mesh, -self.values)


def _values(w):
    return w.values if isinstance(w, NodalField) else np.asarray(w, dtype=float)


def assemble_mass(mesh: Mesh) -> TriDiag:
    h = mesh.cell_widths
    diag = np.zeros(mesh.n_nodes)
    diag[:-1] += h / 3.0
    diag[1:] += h / 3.0
    off = h / 6.0
    return TriDiag(off.copy(), diag, off.copy())


def assemble_stiffness(mesh: Mesh) -> TriDiag:
    inv_h = 1.0 / mesh.cell_widths
    diag = np.zeros(mesh.n_nodes)
    diag[:-1] += inv_h
    diag[1:] += inv_h
    return TriDiag(-inv_h, diag, -inv_h.copy())


def assemble_convection(mesh: Mesh) -> TriDiag:
    """B[i, j] = integral of phi_j' phi_i; independent of the cell widths."""
    n = mesh.n_nodes
    diag = np.zeros(n)
    diag[0] = -0.5
    diag[-1] = 0.5
    return TriDiag(np.full(n - 1, -0.5), diag, np.full(n - 1, 0.5))


def nonlinear_convection(w) -> np.ndarray:
    """Load vector N_i(w) = integral of w w_x phi_i over [0, 1].

    On a cell with end values (a, b) the two local contributions are
    (b - a)(2a + b)/6 and (b - a)(a + 2b)/6.
    """
    v = _values(w)
    a, b = v[:-1], v[1:]
    d = (b - a) / 6.0
    out = np.zeros_like(v)
    out[:-1] += d * (2.0 * a + b)
    out[1:] += d * (a + 2.0 * b)
    return out


def nonlinear_convection_jacobian(w) -> TriDiag:
    v = _values(w)
    a, b = v[:-1], v[1:]
    diag = np.zeros_like(v)
    diag[:-1] += (b - 4.0 * a) / 6.0
    diag[1:] += (4.0 * b - a) / 6.0
    upper = (a + 2.0 * b) / 6.0
    lower = -(2.0 * a + b) / 6.0
    return TriDiag(lower, diag, upper)


def discrete_laplacian_apply(v: NodalField, mass: TriDiag, stiffness: TriDiag) -> NodalField:
    """Return Delta_h v, defined through the mass-weighted identity

        (-Delta_h v, w) = (v_x, w_x) + v_x(0) w(0) - v_x(1) w(1)   for all w in V_h,

    with v_x(0), v_x(1) the slopes of v on the first and last cell.
    """
    s = v.slopes
    rhs = stiffness @ v.values
    rhs[0] += s[0]
    rhs[-1] -= s[-1]
    return NodalField(v.mesh, -thomas_solve(mass, rhs))


def load_vector(f, mesh: Mesh, derivative: bool = False) -> np.ndarray:
    """Integrals of f phi_i (or f phi_i' when `derivative`) by 4-point Gauss per cell."""
    xi, wq = _GAUSS4
    s = 0.5 * (xi + 1.0)
    x0 = mesh.nodes[:-1, None]
    h = mesh.cell_widths[:, None]
    fx = np.asarray(f(x0 + s[None, :] * h), dtype=float) * np.ones((mesh.n_cells, s.size))
    if derivative:
        left = -(fx * wq).sum(axis=1) / 2.0
        right = -left
    else:
        left = (fx * (1.0 - s) * wq).sum(axis=1) * h[:, 0] / 2.0
        right = (fx * s * wq).sum(axis=1) * h[:, 0] / 2.0
    out = np.zeros(mesh.n_nodes)
    out[:-1] += left
    out[1:] += right
    return out


def auxiliary_projection(f, df, mesh: Mesh, lam: float = PROJECTION_LAMBDA) -> NodalField:
    """Elliptic projection P f in V_h.

    Solves ``(f' - (Pf)', chi') + lam (f - Pf, chi) = 0`` for all chi in V_h,
    i.e. ``(A + lam M) Pf = b`` with loads computed from `f` and `df`.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    lhs = assemble_stiffness(mesh) + lam * assemble_mass(mesh)
    rhs = load_vector(df, mesh, derivative=True) + lam * load_vector(f, mesh)
    return NodalField(mesh, thomas_solve(lhs, rhs))


@dataclass(frozen=True, eq=False)
class Operators:
    """Matrices that depend only on the mesh, assembled once per simulation."""

    mesh: Mesh
    mass: TriDiag
    stiffness: TriDiag
    convection: TriDiag


def assemble_operators(mesh: Mesh) -> Operators:
    return Operators(mesh, assemble_mass(mesh), assemble_stiffness(mesh), assemble_convection(mesh))
