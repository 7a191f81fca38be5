"""Model constants for the barotropic gas with density-power viscosity.

Pressure law P = A * rho**gamma and shear viscosity mu = alpha * rho**delta,
with 0 < delta <= 1 so the viscosity degenerates at vacuum.  The admissibility
flag records whether (gamma, delta) lies in the regime for which the global
regularity theory holds; non-admissible pairs remain runnable for exploration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Physical constants, immutable after construction."""

    A: float
    gamma: float
    delta: float
    alpha: float

    def __post_init__(self):
        if not self.A > 0:
            raise ValueError(f"A must be positive, got {self.A}")
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not 0 < self.delta <= 1:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    def admissible(self) -> bool:
        """True iff (gamma, delta) lies in the globally well-behaved regime."""
        if self.delta < 1:
            return self.gamma >= self.delta + 0.5
        return self.gamma > 1.5

    @property
    def sub_linear(self) -> bool:
        """True for 0 < delta < 1, False for the delta = 1 regime."""
        return self.delta < 1


@dataclass(frozen=True)
class DerivedConstants:
    """Coefficients of the transformed momentum system.

    a = (A*gamma/(gamma-1)) ** ((1-delta)/(gamma-1))
    e = (delta-1) / (2*(gamma-1)),  e < 0 for delta < 1 and e = 0 for delta = 1.

    They satisfy a * phi**(2e) = rho**(delta-1) exactly, which is how the
    degenerate viscous coefficient appears in the transformed variables.
    """

    a: float
    e: float


def make_params(A: float, gamma: float, delta: float, alpha: float) -> ModelParams:
    """Validate and build ModelParams; raises ValueError naming the violated bound."""
    return ModelParams(A=float(A), gamma=float(gamma), delta=float(delta), alpha=float(alpha))


def derived_constants(p: ModelParams) -> DerivedConstants:
    base = p.A * p.gamma / (p.gamma - 1.0)
    a = base ** ((1.0 - p.delta) / (p.gamma - 1.0))
    e = (p.delta - 1.0) / (2.0 * (p.gamma - 1.0))
    return DerivedConstants(a=a, e=e)


def pressure(p: ModelParams, rho):
    """P = A * rho**gamma for rho >= 0 (scalar or array)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("pressure requires rho >= 0")
    out = p.A * rho**p.gamma
    return float(out) if out.ndim == 0 else out


def viscosity(p: ModelParams, rho):
    """mu = alpha * rho**delta for rho >= 0 (scalar or array)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("viscosity requires rho >= 0")
    out = p.alpha * rho**p.delta
    return float(out) if out.ndim == 0 else out


def sound_speed(p: ModelParams, rho):
    """Isentropic sound speed c = sqrt(A*gamma*rho**(gamma-1))."""
    rho = np.asarray(rho, dtype=float)
    return np.sqrt(p.A * p.gamma * rho ** (p.gamma - 1.0))
