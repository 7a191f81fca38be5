"""Time evolution of the primitive and transformed systems on the truncated grid.

Scheme
------
Transport is advanced with a two-stage second-order strong-stability method
(Heun); the viscous term is advanced inside each stage by backward Euler with
the diffusion coefficient frozen at the stage start, one symmetric
tridiagonal solve per stage.  The implicit treatment is what makes the
transformed system tractable for 0 < delta < 1, where the diffusion
coefficient grows without bound toward the far-field vacuum.

The primitive stage updates (rho, rho*u) in conservative flux form: the
blended central / local Lax-Friedrichs interface fluxes telescope, so the
interior trapezoid mass and momentum change per step exactly equals the
boundary flux, which the FluxLedger accumulates.  Pure central fluxes
(flux_blend = 0) are the opt-in mode for convergence studies on smooth runs.

Boundary conditions: u = 0 and rho held at its initial boundary value at
x = +-L, matching the far-field decay of the continuous problem.  Density is
kept at or above the vacuum floor; clamp events are counted and are expected
to be zero on well-resolved runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from . import diagnostics
from .errors import SolverError
from .grid import Field, Grid
from .params import ModelParams, derived_constants, sound_speed
from .reformulate import (
    from_reformulated,
    momentum_diffusion_coefficient,
    to_reformulated,
)
from .state import FluidState, ReformulatedState
from . import kernels

__all__ = [
    "SolverConfig",
    "FluxLedger",
    "TimeSeries",
    "cfl_dt",
    "step_primitive",
    "step_reformulated",
    "run",
]


@dataclass
class SolverConfig:
    formulation: str = "primitive"
    cfl: float = 0.5
    vacuum_floor: float = 1e-8
    t_end: float = 1.0
    output_stride: int = 4
    flux_blend: float = 0.1
    fixed_dt: Optional[float] = None

    def __post_init__(self):
        if self.formulation not in ("primitive", "reformulated"):
            raise ValueError(f"unknown formulation {self.formulation!r}")
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.vacuum_floor > 0:
            raise ValueError(f"vacuum_floor must be positive, got {self.vacuum_floor}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")
        if int(self.output_stride) < 1:
            raise ValueError(f"output_stride must be >= 1, got {self.output_stride}")
        self.output_stride = int(self.output_stride)
        if not 0 <= self.flux_blend <= 1:
            raise ValueError(f"flux_blend must lie in [0, 1], got {self.flux_blend}")
        if self.fixed_dt is not None and not self.fixed_dt > 0:
            raise ValueError(f"fixed_dt must be positive, got {self.fixed_dt}")


@dataclass
class FluxLedger:
    """Accumulated net boundary outflux (right minus left interface) and
    the count of vacuum-floor clamp events."""

    mass: float = 0.0
    momentum: float = 0.0
    clamps: int = 0

    def snapshot(self) -> dict:
        return {"mass": self.mass, "momentum": self.momentum}


@dataclass
class TimeSeries:
    """Per-run record sequence plus the matching state snapshots."""

    params: ModelParams
    config: SolverConfig
    grid: Grid
    records: list = dc_field(default_factory=list)
    snapshots: Optional[list] = None

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])


def cfl_dt(s: FluidState, p: ModelParams, c: SolverConfig) -> float:
    """Advective time step cfl * dx / max(|u| + c_s); no parabolic restriction
    because the viscous solve is implicit."""
    speed = float(np.max(np.abs(s.u.values) + sound_speed(p, s.rho.values)))
    dx = s.grid.dx
    if speed <= 0.0:
        return c.cfl * dx
    return c.cfl * dx / speed


# ---------------------------------------------------------------------------
# primitive formulation
# ---------------------------------------------------------------------------


def _viscous_solve_primitive(rho, m, p, dt, dx, u_left, u_right):
    """Backward-Euler solve of rho*u - dt*(mu(rho) u_x)_x = m with Dirichlet u."""
    n = rho.shape[0]
    mu = p.alpha * rho**p.delta
    mu_half = 0.5 * (mu[:-1] + mu[1:])
    r = dt / (dx * dx)
    lower = np.zeros(n)
    diag = np.empty(n)
    upper = np.zeros(n)
    rhs = m.copy()
    lower[1:] = -r * mu_half
    upper[:-1] = -r * mu_half
    diag[1:-1] = rho[1:-1] + r * (mu_half[:-1] + mu_half[1:])
    diag[0] = 1.0
    diag[-1] = 1.0
    upper[0] = 0.0
    lower[-1] = 0.0
    rhs[0] = u_left
    rhs[-1] = u_right
    u = kernels.thomas(lower, diag, upper, rhs)
    return u, mu_half


def _stage_primitive(rho, m, p, c, dt, dx, t_stage, rho_bc, u_bc, sources):
    """One forward-Euler transport stage plus the implicit viscous solve.

    Returns (rho_new, m_new, u_new, mass_outflux, mom_outflux).  Outflux is
    dt * (F at the rightmost interface - F at the leftmost interface), the
    exact interior trapezoid deficit of the stage.
    """
    u = m / rho
    cs = sound_speed(p, rho)
    speed = np.abs(u) + cs
    theta = c.flux_blend

    f_mass = m
    f_mom = m * u + p.A * rho**p.gamma
    F_mass = kernels.interface_flux(f_mass, rho, speed, theta)
    F_mom = kernels.interface_flux(f_mom, m, speed, theta)

    rho_new = rho.copy()
    m_new = m.copy()
    rho_new[1:-1] = rho[1:-1] - (dt / dx) * (F_mass[1:] - F_mass[:-1])
    m_new[1:-1] = m[1:-1] - (dt / dx) * (F_mom[1:] - F_mom[:-1])

    if sources is not None:
        s_rho, s_mom = sources(t_stage)
        rho_new[1:-1] += dt * s_rho[1:-1]
        m_new[1:-1] += dt * s_mom[1:-1]

    rho_new[0], rho_new[-1] = rho_bc
    clamps = int(np.count_nonzero(rho_new < c.vacuum_floor))
    if clamps:
        np.maximum(rho_new, c.vacuum_floor, out=rho_new)
    if not (np.all(np.isfinite(rho_new)) and np.all(np.isfinite(m_new))):
        raise SolverError("non-finite state in primitive transport stage")

    u_new, mu_half = _viscous_solve_primitive(rho_new, m_new, p, dt, dx, u_bc[0], u_bc[1])
    m_new = rho_new * u_new
    m_new[0] = rho_new[0] * u_bc[0]
    m_new[-1] = rho_new[-1] * u_bc[1]

    # viscous momentum flux G = -mu u_x at the outermost interfaces (post-solve)
    g_left = -mu_half[0] * (u_new[1] - u_new[0]) / dx
    g_right = -mu_half[-1] * (u_new[-1] - u_new[-2]) / dx
    mass_outflux = dt * (F_mass[-1] - F_mass[0])
    mom_outflux = dt * ((F_mom[-1] + g_right) - (F_mom[0] + g_left))
    return rho_new, m_new, mass_outflux, mom_outflux, clamps


def _bc_values_primitive(rho, u, bc, t):
    if bc is None:
        return (rho[0], rho[-1]), (0.0, 0.0)
    return bc(t)


def step_primitive(
    s: FluidState,
    p: ModelParams,
    c: SolverConfig,
    dt: float,
    *,
    ledger: Optional[FluxLedger] = None,
    sources: Optional[Callable] = None,
    bc: Optional[Callable] = None,
) -> FluidState:
    """Advance the primitive state by one Heun step of size dt."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    dx = s.grid.dx
    rho0 = s.rho.values
    m0 = rho0 * s.u.values

    rho_bc1, u_bc1 = _bc_values_primitive(rho0, s.u.values, bc, s.t + dt)
    r1, m1, fm1, fp1, cl1 = _stage_primitive(
        rho0, m0, p, c, dt, dx, s.t, rho_bc1, u_bc1, sources
    )
    r2, m2, fm2, fp2, cl2 = _stage_primitive(
        r1, m1, p, c, dt, dx, s.t + dt, rho_bc1, u_bc1, sources
    )
    rho_new = 0.5 * (rho0 + r2)
    m_new = 0.5 * (m0 + m2)

    clamp3 = int(np.count_nonzero(rho_new < c.vacuum_floor))
    if clamp3:
        np.maximum(rho_new, c.vacuum_floor, out=rho_new)
    u_new = m_new / rho_new
    u_new[0], u_new[-1] = u_bc1
    rho_new[0], rho_new[-1] = rho_bc1

    if ledger is not None:
        ledger.mass += 0.5 * (fm1 + fm2)
        ledger.momentum += 0.5 * (fp1 + fp2)
        ledger.clamps += cl1 + cl2 + clamp3

    if not (np.all(np.isfinite(rho_new)) and np.all(np.isfinite(u_new))):
        raise SolverError("non-finite state after primitive step", time=s.t + dt)
    return FluidState(rho=Field(s.grid, rho_new), u=Field(s.grid, u_new), t=s.t + dt)


# ---------------------------------------------------------------------------
# reformulated formulation
# ---------------------------------------------------------------------------


def _viscous_solve_reformulated(K, rhs, dt, dx, u_left, u_right):
    """Backward-Euler solve of u - dt*K*u_xx = rhs with Dirichlet ends."""
    n = rhs.shape[0]
    r = dt / (dx * dx)
    lower = np.zeros(n)
    diag = np.ones(n)
    upper = np.zeros(n)
    b = rhs.copy()
    lower[1:-1] = -r * K[1:-1]
    upper[1:-1] = -r * K[1:-1]
    diag[1:-1] = 1.0 + 2.0 * r * K[1:-1]
    b[0] = u_left
    b[-1] = u_right
    return kernels.thomas(lower, diag, upper, b)


def _stage_reformulated(phi, u, psi, p, c, dt, dx, phi_floor, bc_vals):
    from .grid import ddx_array

    gamma = p.gamma
    theta = c.flux_blend
    (phi_l, phi_r), (u_l, u_r), (psi_l, psi_r) = bc_vals

    ux = ddx_array(u, dx)
    phix = ddx_array(phi, dx)

    phi_new = phi.copy()
    phi_new[1:-1] = phi[1:-1] - dt * (
        kernels.advect_biased(u, phi, dx, theta)[1:-1]
        + (gamma - 1.0) * phi[1:-1] * ux[1:-1]
    )
    phi_new[0], phi_new[-1] = phi_l, phi_r
    if np.any(phi_new <= 0):
        raise SolverError("phi lost positivity in reformulated stage")
    clamps = int(np.count_nonzero(phi_new < phi_floor))
    if clamps:
        np.maximum(phi_new, phi_floor, out=phi_new)

    rhs_u = u - dt * (
        kernels.advect_biased(u, u, dx, theta) + phix - p.alpha * psi * ux
    )
    if not np.all(np.isfinite(rhs_u)):
        raise SolverError("non-finite state in reformulated transport stage")
    K = momentum_diffusion_coefficient(p, phi)
    u_new = _viscous_solve_reformulated(K, rhs_u, dt, dx, u_l, u_r)

    uxx_new = np.zeros_like(u)
    uxx_new[1:-1] = (u_new[2:] - 2.0 * u_new[1:-1] + u_new[:-2]) / (dx * dx)

    flux_psi = kernels.interface_flux(u * psi, psi, np.abs(u), theta)
    psi_new = psi.copy()
    if p.delta < 1:
        d = derived_constants(p)
        forcing = d.a * p.delta * phi ** (2.0 * d.e) * uxx_new
        psi_new[1:-1] = psi[1:-1] - dt * (
            (flux_psi[1:] - flux_psi[:-1]) / dx
            + (p.delta - 1.0) * psi[1:-1] * ux[1:-1]
            + forcing[1:-1]
        )
    else:
        psi_new[1:-1] = psi[1:-1] - dt * (
            (flux_psi[1:] - flux_psi[:-1]) / dx + uxx_new[1:-1]
        )
    psi_new[0], psi_new[-1] = psi_l, psi_r
    return phi_new, u_new, psi_new, clamps


def step_reformulated(
    r: ReformulatedState,
    p: ModelParams,
    c: SolverConfig,
    dt: float,
    *,
    ledger: Optional[FluxLedger] = None,
    bc: Optional[Callable] = None,
) -> ReformulatedState:
    """Advance the transformed state by one Heun step of size dt."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    from .reformulate import pressure_variable

    dx = r.grid.dx
    phi0, u0, psi0 = r.phi.values, r.u.values, r.psi.values
    phi_floor = pressure_variable(p, np.array(c.vacuum_floor))
    if bc is None:
        bc_vals = ((phi0[0], phi0[-1]), (0.0, 0.0), (psi0[0], psi0[-1]))
    else:
        bc_vals = bc(r.t + dt)

    p1, u1, s1, cl1 = _stage_reformulated(phi0, u0, psi0, p, c, dt, dx, phi_floor, bc_vals)
    p2, u2, s2, cl2 = _stage_reformulated(p1, u1, s1, p, c, dt, dx, phi_floor, bc_vals)
    phi_new = 0.5 * (phi0 + p2)
    u_new = 0.5 * (u0 + u2)
    psi_new = 0.5 * (psi0 + s2)
    phi_new[0], phi_new[-1] = bc_vals[0]
    u_new[0], u_new[-1] = bc_vals[1]
    psi_new[0], psi_new[-1] = bc_vals[2]

    if np.any(phi_new <= 0):
        raise SolverError("phi lost positivity after reformulated step", time=r.t + dt)
    cl3 = int(np.count_nonzero(phi_new < phi_floor))
    if cl3:
        np.maximum(phi_new, phi_floor, out=phi_new)
    if ledger is not None:
        ledger.clamps += cl1 + cl2 + cl3

    arrays = (phi_new, u_new, psi_new)
    if not all(np.all(np.isfinite(a)) for a in arrays):
        raise SolverError("non-finite state after reformulated step", time=r.t + dt)
    g = r.grid
    return ReformulatedState(
        phi=Field(g, phi_new), u=Field(g, u_new), psi=Field(g, psi_new), regime=r.regime, t=r.t + dt
    )


# ---------------------------------------------------------------------------
# run loop
# ---------------------------------------------------------------------------


def _normalize_initial(initial: FluidState, c: SolverConfig) -> FluidState:
    """Apply the far-field boundary condition to the starting state."""
    rho = initial.rho.values.copy()
    u = initial.u.values.copy()
    if c.vacuum_floor > float(np.min(rho)):
        raise ValueError(
            f"vacuum_floor {c.vacuum_floor} exceeds the minimum initial density "
            f"{float(np.min(rho))}"
        )
    u[0] = 0.0
    u[-1] = 0.0
    return FluidState(rho=Field(initial.grid, rho), u=Field(initial.grid, u), t=initial.t)


def run(
    initial: FluidState,
    p: ModelParams,
    c: SolverConfig,
    *,
    sources: Optional[Callable] = None,
    bc: Optional[Callable] = None,
    keep_snapshots: bool = True,
) -> TimeSeries:
    """Advance to t_end, recording diagnostics every output_stride steps.

    Deterministic: identical inputs give identical output.  Step failures
    propagate as SolverError carrying the failing step index and the partial
    series accumulated so far.
    """
    state = _normalize_initial(initial, c)
    series = TimeSeries(params=p, config=c, grid=state.grid, records=[], snapshots=[] if keep_snapshots else None)
    ledger = FluxLedger()

    reformulated = c.formulation == "reformulated"
    rstate = to_reformulated(state, p) if reformulated else None

    def take_record(s: FluidState):
        baseline = series.records[0] if series.records else None
        try:
            rec = diagnostics.record(
                s,
                p,
                baseline=baseline,
                boundary_flux=ledger.snapshot(),
                clamp_count=ledger.clamps,
            )
        except (ValueError, FloatingPointError) as err:
            raise SolverError(f"non-finite diagnostics: {err}", time=s.t) from err
        series.records.append(rec)
        if keep_snapshots:
            series.snapshots.append(s.copy())

    take_record(state)
    t_end = c.t_end
    t = state.t
    step_index = 0
    eps = 1e-12 * max(1.0, abs(t_end))
    try:
        while t < t_end - eps:
            cur = from_reformulated(rstate, p) if reformulated else state
            cur.t = t
            dt = c.fixed_dt if c.fixed_dt is not None else cfl_dt(cur, p, c)
            dt = min(dt, t_end - t)
            if reformulated:
                rstate = step_reformulated(rstate, p, c, dt, ledger=ledger, bc=bc)
                state = from_reformulated(rstate, p)
            else:
                state = step_primitive(state, p, c, dt, ledger=ledger, sources=sources, bc=bc)
            t += dt
            state.t = t
            step_index += 1
            if step_index % c.output_stride == 0 or t >= t_end - eps:
                take_record(state)
    except SolverError as err:
        err.step_index = step_index
        err.partial_series = series
        raise
    diagnostics.attach_interval_residuals(series, p, floor=c.vacuum_floor)
    return series
