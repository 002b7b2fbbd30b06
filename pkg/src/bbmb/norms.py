"""Norms of piecewise-linear fields, all exact for V_h."""

from __future__ import annotations

import numpy as np

from .fem1d import NodalField, assemble_mass, assemble_stiffness


def _quad(w: NodalField, op) -> float:
    v = w.values
    return float(max(v @ (op @ v), 0.0))


def l2_norm(w: NodalField, mass=None) -> float:
    mass = assemble_mass(w.mesh) if mass is None else mass
    return float(np.sqrt(_quad(w, mass)))


def h1_seminorm(w: NodalField, stiffness=None) -> float:
    stiffness = assemble_stiffness(w.mesh) if stiffness is None else stiffness
    return float(np.sqrt(_quad(w, stiffness)))


def tnorm(w: NodalField, stiffness=None) -> float:
    """sqrt(w(0)^2 + w(1)^2 + ||w_x||^2), equivalent to the H1 norm."""
    stiffness = assemble_stiffness(w.mesh) if stiffness is None else stiffness
    a, b = w.boundary
    return float(np.sqrt(a * a + b * b + _quad(w, stiffness)))


def linf_norm(w: NodalField) -> float:
    return float(np.max(np.abs(w.values)))
