"""Far-field-vacuum initial data families and compatibility checks.

Density profiles rho0(x) = 1/(1 + |x|^(2*sigma)) decay to vacuum as |x| grows
but stay strictly positive.  The decay exponent sigma must sit in a window
that depends on (gamma, delta) for the regularity theory to apply; outside
the window construction still succeeds but carries a warning.

The vacuum floor is applied to the sampled density as an additive far-field
shift (rho0 + eps), the discrete counterpart of perturbing the data away from
vacuum before taking the limit; see the solver module for how the floor acts
during evolution.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .grid import Field, Grid, ddx, d2dx2, lp_norm
from .params import ModelParams
from .state import FluidState

_PROFILES = ("zero", "bump", "compact_bump", "lorentz")


@dataclass(frozen=True)
class InitFamilySpec:
    """Decay exponent and named velocity profile.

    Profiles (amplitude c, width w):
      zero          u0 = 0
      bump          u0 = c * exp(-(x/w)**2)
      compact_bump  u0 = c * (1 - (x/w)**2)**3 on |x| < w, else 0
      lorentz       u0 = c / (1 + (x/w)**2)
    """

    sigma: float
    velocity_profile: str = "zero"
    velocity_amplitude: float = 1.0
    velocity_width: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.velocity_profile not in _PROFILES:
            raise ValueError(
                f"unknown velocity profile {self.velocity_profile!r}; choose from {_PROFILES}"
            )
        if not self.velocity_width > 0:
            raise ValueError(f"velocity width must be positive, got {self.velocity_width}")


@dataclass(frozen=True)
class SigmaWindow:
    """Open interval (lo, hi) of admissible decay exponents; hi may be inf."""

    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return not self.lo < self.hi

    def contains(self, sigma: float) -> bool:
        return self.lo < sigma < self.hi


@dataclass
class CompatibilityReport:
    """L2 sizes of the two weighted derivative constraints on u0."""

    g1_norm: float
    g2_norm: float
    sigma_window_ok: bool
    norms_finite: bool


def sigma_window(p: ModelParams) -> SigmaWindow:
    lo = max(0.75, 1.0 / (4.0 * (p.gamma - 1.0)))
    hi = 1.0 / (4.0 * (1.0 - p.delta)) if p.delta < 1 else math.inf
    return SigmaWindow(lo=lo, hi=hi)


def density_profile(sigma: float, x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.abs(x) ** (2.0 * sigma))


def velocity_profile(spec: InitFamilySpec, x: np.ndarray) -> np.ndarray:
    c, w = spec.velocity_amplitude, spec.velocity_width
    if spec.velocity_profile == "zero":
        return np.zeros_like(x)
    if spec.velocity_profile == "bump":
        return c * np.exp(-((x / w) ** 2))
    if spec.velocity_profile == "compact_bump":
        s = x / w
        return np.where(np.abs(s) < 1.0, c * (1.0 - s**2) ** 3, 0.0)
    return c / (1.0 + (x / w) ** 2)


def build_initial_state(
    spec: InitFamilySpec, p: ModelParams, g: Grid, vacuum_floor: float = 0.0
) -> FluidState:
    """Sample the family on the grid, shifted off vacuum by the floor.

    Emits a warning (and proceeds) when sigma falls outside the admissible
    window for (gamma, delta).
    """
    window = sigma_window(p)
    if not window.contains(spec.sigma):
        warnings.warn(
            f"sigma={spec.sigma} outside admissible window ({window.lo}, {window.hi}) "
            f"for gamma={p.gamma}, delta={p.delta}",
            stacklevel=2,
        )
    if vacuum_floor < 0:
        raise ValueError("vacuum_floor must be non-negative")
    rho0 = density_profile(spec.sigma, g.x) + vacuum_floor
    u0 = velocity_profile(spec, g.x)
    return FluidState(rho=Field(g, rho0), u=Field(g, u0), t=0.0)


def check_compatibility(state: FluidState, p: ModelParams) -> CompatibilityReport:
    """Report the discrete L2 norms of g1 = rho0^((delta-1)/2) * u0_x and
    g2 = alpha * rho0^(delta-1) * u0_xx, the weights linking u0's derivatives
    to the density decay rate.  For delta = 1 both weights are unity.
    """
    rho = state.rho.values
    if np.any(rho <= 0):
        idx = int(np.argmin(rho))
        raise ValueError(f"density not strictly positive at node {idx} (x={state.rho.grid.x[idx]})")
    ux = ddx(state.u)
    uxx = d2dx2(state.u)
    w1 = rho ** ((p.delta - 1.0) / 2.0)
    w2 = rho ** (p.delta - 1.0)
    g1 = Field(state.u.grid, w1 * ux.values)
    g2 = Field(state.u.grid, p.alpha * w2 * uxx.values)
    n1 = lp_norm(g1, 2)
    n2 = lp_norm(g2, 2)
    return CompatibilityReport(
        g1_norm=n1,
        g2_norm=n2,
        sigma_window_ok=sigma_window(p).contains(_sigma_of(state)),
        norms_finite=bool(np.isfinite(n1) and np.isfinite(n2)),
    )


def _sigma_of(state: FluidState) -> float:
    # Recover sigma from the sampled profile where possible; states imported
    # from snapshots may not follow the family, in which case the window flag
    # is evaluated against the best-fit decay at the domain edge.
    g = state.rho.grid
    rho_edge = state.rho.values[-1]
    x_edge = g.x[-1]
    if rho_edge <= 0 or rho_edge >= 1:
        return math.inf
    return float(math.log(1.0 / rho_edge - 1.0) / (2.0 * math.log(x_edge))) if x_edge > 1 else math.inf
