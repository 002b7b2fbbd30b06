"""Partitions of the unit interval for piecewise-linear finite elements."""

from __future__ import annotations

import numpy as np

MESH_ATOL = 1e-12


class Mesh:
    """An ordered partition ``0 = x_0 < x_1 < ... < x_N = 1``.

    The node array is copied and frozen on construction, so a mesh can be
    shared freely between simulations.
    """

    __slots__ = ("nodes",)

    def __init__(self, nodes):
        nodes = np.array(nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("a mesh needs at least two nodes")
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise ValueError("mesh must start at 0 and end at 1")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("mesh nodes must be strictly increasing")
        nodes.setflags(write=False)
        self.nodes = nodes

    @property
    def n_cells(self) -> int:
        return self.nodes.size - 1

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def cell_widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def h_max(self) -> float:
        return float(self.cell_widths.max())

    def is_uniform(self, atol: float = MESH_ATOL) -> bool:
        h = self.cell_widths
        return bool(np.all(np.abs(h - 1.0 / self.n_cells) <= atol))

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return self.nodes.shape == other.nodes.shape and bool(
            np.all(np.abs(self.nodes - other.nodes) <= MESH_ATOL)
        )

    def __hash__(self):
        return hash(self.n_cells)

    def __repr__(self):
        return f"Mesh(n_cells={self.n_cells}, h_max={self.h_max:.6g})"


def uniform_mesh(n_cells: int) -> Mesh:
    if int(n_cells) != n_cells or n_cells < 1:
        raise ValueError(f"n_cells must be a positive integer, got {n_cells!r}")
    n_cells = int(n_cells)
    nodes = np.arange(n_cells + 1, dtype=float) / n_cells
    return Mesh(nodes)


def refine(mesh: Mesh, factor: int) -> Mesh:
    """Split every cell of `mesh` into `factor` equal subcells."""
    if int(factor) != factor or factor < 1:
        raise ValueError(f"factor must be a positive integer, got {factor!r}")
    factor = int(factor)
    if factor == 1:
        return mesh
    x = mesh.nodes
    s = np.arange(factor, dtype=float) / factor
    inner = x[:-1, None] + s[None, :] * np.diff(x)[:, None]
    nodes = np.append(inner.ravel(), 1.0)
    # keep coarse nodes bitwise identical so nested evaluation is exact
    nodes[::factor] = x
    return Mesh(nodes)


def is_nested(coarse: Mesh, fine: Mesh) -> bool:
    """True when every node of `coarse` is also a node of `fine`."""
    idx = np.clip(np.searchsorted(fine.nodes, coarse.nodes), 1, fine.n_nodes - 1)
    gap = np.minimum(
        np.abs(fine.nodes[idx] - coarse.nodes), np.abs(fine.nodes[idx - 1] - coarse.nodes)
    )
    return bool(np.all(gap <= MESH_ATOL))
