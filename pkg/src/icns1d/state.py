"""State containers shared by the solvers, transforms and diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .grid import Field


class Regime(Enum):
    """Viscosity-exponent regime selecting the transform for psi."""

    SUB_LINEAR = "sub_linear"  # 0 < delta < 1
    LINEAR = "linear"  # delta = 1


@dataclass
class FluidState:
    """Primitive unknowns (rho, u) at one time instant."""

    rho: Field
    u: Field
    t: float = 0.0

    def __post_init__(self):
        if self.rho.grid != self.u.grid:
            raise ValueError("rho and u must live on the same grid")
        if self.t < 0:
            raise ValueError("time must be non-negative")

    @property
    def grid(self):
        return self.rho.grid

    def copy(self) -> "FluidState":
        return FluidState(rho=self.rho.copy(), u=self.u.copy(), t=self.t)


@dataclass
class ReformulatedState:
    """Transformed unknowns (phi, u, psi) at one time instant.

    phi is the pressure-like power of rho, psi the spatial log/power
    derivative of rho appropriate to the regime.
    """

    phi: Field
    u: Field
    psi: Field
    regime: Regime
    t: float = 0.0

    def __post_init__(self):
        if not (self.phi.grid == self.u.grid == self.psi.grid):
            raise ValueError("phi, u, psi must live on the same grid")
        if np.any(self.phi.values <= 0):
            raise ValueError("phi must be strictly positive")

    @property
    def grid(self):
        return self.phi.grid

    def copy(self) -> "ReformulatedState":
        return ReformulatedState(
            phi=self.phi.copy(), u=self.u.copy(), psi=self.psi.copy(), regime=self.regime, t=self.t
        )
