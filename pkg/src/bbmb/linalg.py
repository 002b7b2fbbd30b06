"""Tridiagonal matrices and the Thomas algorithm."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

# relative pivot size below which elimination is declared broken down
PIVOT_RTOL = 1e-14


class TridiagonalBreakdown(np.linalg.LinAlgError):
    """Raised when Thomas elimination meets a (numerically) zero pivot."""

    def __init__(self, row, pivot):
        super().__init__(f"zero pivot {pivot:.3e} at row {row} in tridiagonal elimination")
        self.row = row
        self.pivot = pivot


@dataclass(frozen=True, eq=False)
class TriDiag:
    """Banded storage for an n x n tridiagonal matrix.

    ``lower[i]`` is entry (i+1, i), ``upper[i]`` is entry (i, i+1).
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if len(self.lower) != n - 1 or len(self.upper) != n - 1:
            raise ValueError("off-diagonal bands must have length n-1")

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n - 1), np.zeros(n), np.zeros(n - 1))

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a, dtype=float)
        return cls(np.diag(a, -1).copy(), np.diag(a).copy(), np.diag(a, 1).copy())

    @property
    def n(self) -> int:
        return len(self.diag)

    @property
    def T(self) -> TriDiag:
        return TriDiag(self.upper, self.diag, self.lower)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.lower, -1) + np.diag(self.upper, 1)

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        y[:-1] += self.upper * x[1:]
        y[1:] += self.lower * x[:-1]
        return y

    def __matmul__(self, x):
        return self.matvec(x)

    def __add__(self, other):
        if not isinstance(other, TriDiag):
            return NotImplemented
        return TriDiag(self.lower + other.lower, self.diag + other.diag, self.upper + other.upper)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, s):
        s = float(s)
        return TriDiag(s * self.lower, s * self.diag, s * self.upper)

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    def norm_inf(self) -> float:
        """Maximum absolute row sum."""
        rows = np.abs(self.diag).copy()
        rows[:-1] += np.abs(self.upper)
        rows[1:] += np.abs(self.lower)
        return float(rows.max())


@njit(cache=True)
def _thomas(a, b, c, d, rtol):
    # a: sub-diagonal (n-1), b: diagonal (n), c: super-diagonal (n-1)
    n = b.shape[0]
    cp = np.empty(n)
    dp = np.empty(n)
    x = np.empty(n)
    scale = 0.0
    for i in range(n):
        v = abs(b[i])
        if i > 0:
            v += abs(a[i - 1])
        if i < n - 1:
            v += abs(c[i])
        if v > scale:
            scale = v
    tol = rtol * scale
    piv = b[0]
    if abs(piv) <= tol:
        return x, 0, piv
    cp[0] = c[0] / piv if n > 1 else 0.0
    dp[0] = d[0] / piv
    for i in range(1, n):
        piv = b[i] - a[i - 1] * cp[i - 1]
        if abs(piv) <= tol:
            return x, i, piv
        if i < n - 1:
            cp[i] = c[i] / piv
        dp[i] = (d[i] - a[i - 1] * dp[i - 1]) / piv
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x, -1, 0.0


def thomas_solve(m: TriDiag, rhs) -> np.ndarray:
    """Solve ``m @ x = rhs`` by tridiagonal Gaussian elimination without pivoting.

    Raises
    ------
    TridiagonalBreakdown
        If a pivot is zero relative to the matrix infinity norm.
    """
    rhs = np.ascontiguousarray(rhs, dtype=float)
    if rhs.shape != (m.n,):
        raise ValueError(f"rhs has shape {rhs.shape}, expected ({m.n},)")
    x, row, piv = _thomas(
        np.ascontiguousarray(m.lower, dtype=float),
        np.ascontiguousarray(m.diag, dtype=float),
        np.ascontiguousarray(m.upper, dtype=float),
        rhs,
        PIVOT_RTOL,
    )
    if row >= 0:
        raise TridiagonalBreakdown(row, piv)
    return x
