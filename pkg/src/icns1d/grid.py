"""Uniform truncated grid, sampled fields, discrete calculus and norms.

The whole-line problem is truncated to [-L, L] with n equispaced nodes.
Derivatives are second-order central in the interior with one-sided
second-order stencils at the two boundary nodes, and all integrals are
composite trapezoid sums so that norms and conservation ledgers agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Nodes x_i = -L + i*dx, i = 0..n-1, dx = 2L/(n-1)."""

    half_width: float
    n: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if self.n < 16:
            raise ValueError(f"n must be at least 16, got {self.n}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n)


@dataclass
class Field:
    """Real samples on a grid; value semantics (copy on construction)."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.shape != (self.grid.n,):
            raise ValueError(f"field length {v.shape} does not match grid n={self.grid.n}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite samples")
        self.values = v

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field":
        return cls(grid, np.asarray(fn(grid.x), dtype=float))

    def copy(self) -> "Field":
        return Field(self.grid, self.values)


def ddx_array(values: np.ndarray, dx: float) -> np.ndarray:
    """First derivative: central interior, one-sided second order at the ends."""
    v = values
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * dx)
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx)
    out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * dx)
    return out


def d2dx2_array(values: np.ndarray, dx: float) -> np.ndarray:
    """Second derivative: central interior, one-sided second order at the ends."""
    v = values
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (dx * dx)
    out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (dx * dx)
    out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / (dx * dx)
    return out


def ddx(f: Field) -> Field:
    if f.grid.n < 3:
        raise ValueError("ddx needs at least 3 nodes")
    return Field(f.grid, ddx_array(f.values, f.grid.dx))


def d2dx2(f: Field) -> Field:
    if f.grid.n < 4:
        raise ValueError("d2dx2 needs at least 4 nodes")
    return Field(f.grid, d2dx2_array(f.values, f.grid.dx))


def integrate(f: Field) -> float:
    """Composite trapezoid of f over [-L, L]."""
    return float(np.trapezoid(f.values, dx=f.grid.dx))


def cumulative_integral(f: Field) -> np.ndarray:
    """Trapezoid antiderivative from -L: out[i] = integral_{-L}^{x_i} f dz.

    The last entry equals integrate(f) exactly (same quadrature rule).
    """
    v = f.values
    out = np.empty_like(v)
    out[0] = 0.0
    np.cumsum(0.5 * f.grid.dx * (v[1:] + v[:-1]), out=out[1:])
    return out


def lp_norm(f: Field, p) -> float:
    """Discrete L^p norm by trapezoid; p = inf gives max |f|."""
    if p == math.inf or p == "inf":
        return float(np.max(np.abs(f.values)))
    p = float(p)
    if p < 1:
        raise ValueError(f"lp_norm requires p >= 1 or p = inf, got {p}")
    return float(np.trapezoid(np.abs(f.values) ** p, dx=f.grid.dx) ** (1.0 / p))
