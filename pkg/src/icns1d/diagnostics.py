"""Flow functionals and identity residuals per time sample.

Every record carries the conserved quantities (mass, momentum), kinetic and
total energy, the entropy functional built on the effective velocity, both
dissipation integrals, the sup norm of u, the non-decay floor |P(0)|/m(0),
a ledger of tracked norms, and named identity residuals.  Interval residuals
(energy balance, entropy balance, effective-velocity transport) are attached
after a run from consecutive records/snapshots.

All integrals use the grid module's trapezoid rule so conservation ledgers
and norms are mutually consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .grid import Field, cumulative_integral, ddx, d2dx2, integrate, lp_norm
from .params import ModelParams
from .reformulate import effective_velocity, log_slope_variable
from .state import FluidState

TRACKED_KEYS = (
    "psi_l2",
    "psi_l4",
    "v_inf",
    "wux_l2",
    "u_l2",
    "ux_l2",
    "uxx_l2",
    "rho_iota_u_inf",
)

RESIDUAL_KEYS = (
    "cauchy_schwarz",
    "mass_account",
    "mom_account",
    "energy_interval",
    "bd_interval",
    "eff_velocity",
)


@dataclass
class DiagnosticsRecord:
    t: float
    m: float
    p_mom: float
    e_kin: float
    e_tot: float
    bd: float
    diss_energy: float
    diss_bd: float
    u_inf: float
    nondecay_floor: float
    tracked_norms: dict = dc_field(default_factory=dict)
    residuals: dict = dc_field(default_factory=dict)
    boundary_flux: dict = dc_field(default_factory=dict)
    clamp_count: int = 0


@dataclass
class CharacteristicTrace:
    """Path of dy/dt = u(t, y) from seed x0 with the transported bound value
    xi(t, y) + (alpha/delta) * rho(t, y)**delta, non-increasing for the exact
    flow."""

    x0: float
    times: np.ndarray
    positions: np.ndarray
    values: np.ndarray
    exited: bool = False


@dataclass
class NonDecayReport:
    c_u: float
    min_u_inf: float
    satisfied: bool
    vacuous: bool


@dataclass
class LedgerEntry:
    initial: float
    running_max: float
    ratio: float


def _iota(p: ModelParams) -> float:
    # weight exponent for the |rho^iota u|_inf transport norm
    return 0.5 if p.delta < 1 else 0.75


def record(
    s: FluidState,
    p: ModelParams,
    baseline: Optional[DiagnosticsRecord] = None,
    boundary_flux: Optional[dict] = None,
    clamp_count: int = 0,
) -> DiagnosticsRecord:
    g = s.grid
    rho = s.rho.values
    u = s.u.values

    # near-blowup states overflow the quadratic intermediates; raise instead
    # of warning so the caller can fail hard with a step report
    with np.errstate(over="raise", invalid="raise"):
        return _record_body(s, p, g, rho, u, baseline, boundary_flux, clamp_count)


def _record_body(s, p, g, rho, u, baseline, boundary_flux, clamp_count):
    m = integrate(Field(g, rho))
    p_mom = integrate(Field(g, rho * u))
    e_kin = 0.5 * integrate(Field(g, rho * u * u))
    e_int = (p.A / (p.gamma - 1.0)) * integrate(Field(g, rho**p.gamma))
    e_tot = e_kin + e_int

    v = effective_velocity(s, p)
    bd = 0.5 * integrate(Field(g, rho * v.values**2)) + e_int

    ux = ddx(s.u)
    rho_x = ddx(s.rho)
    diss_energy = p.alpha * integrate(Field(g, rho**p.delta * ux.values**2))
    diss_bd = (
        p.alpha
        * p.A
        * p.gamma
        * integrate(Field(g, rho ** (p.gamma + p.delta - 3.0) * rho_x.values**2))
    )

    u_inf = float(np.max(np.abs(u)))
    if baseline is not None:
        floor = baseline.nondecay_floor
    else:
        floor = abs(p_mom) / m if m > 0 else 0.0

    psi = log_slope_variable(p, s.rho)
    uxx = d2dx2(s.u)
    iota = _iota(p)
    tracked = {
        "psi_l2": lp_norm(psi, 2),
        "psi_l4": lp_norm(psi, 4),
        "v_inf": lp_norm(v, math.inf),
        "wux_l2": lp_norm(Field(g, rho ** ((p.delta - 1.0) / 2.0) * ux.values), 2),
        "u_l2": lp_norm(s.u, 2),
        "ux_l2": lp_norm(ux, 2),
        "uxx_l2": lp_norm(uxx, 2),
        "rho_iota_u_inf": float(np.max(rho**iota * np.abs(u))),
    }

    residuals = {k: 0.0 for k in RESIDUAL_KEYS}
    residuals["cauchy_schwarz"] = math.sqrt(max(2.0 * m * e_kin, 0.0)) - abs(p_mom)
    bflux = dict(boundary_flux) if boundary_flux else {"mass": 0.0, "momentum": 0.0}
    if baseline is not None:
        residuals["mass_account"] = (m - baseline.m + bflux["mass"]) / baseline.m
        pscale = abs(baseline.p_mom) if abs(baseline.p_mom) > 0 else 1.0
        residuals["mom_account"] = (p_mom - baseline.p_mom + bflux["momentum"]) / pscale

    return DiagnosticsRecord(
        t=s.t,
        m=m,
        p_mom=p_mom,
        e_kin=e_kin,
        e_tot=e_tot,
        bd=bd,
        diss_energy=diss_energy,
        diss_bd=diss_bd,
        u_inf=u_inf,
        nondecay_floor=floor,
        tracked_norms=tracked,
        residuals=residuals,
        boundary_flux=bflux,
        clamp_count=clamp_count,
    )


def energy_identity_residual(series) -> tuple[np.ndarray, float]:
    """Per-interval defect of the energy balance
    E(t_{k+1}) - E(t_k) + trapz of the viscous dissipation, normalized by E(0).

    Returns (residual sequence, max |residual|)."""
    recs = series.records
    if len(recs) < 2:
        raise ValueError("need at least two records")
    e0 = recs[0].e_tot
    out = np.empty(len(recs) - 1)
    for k in range(len(recs) - 1):
        a, b = recs[k], recs[k + 1]
        out[k] = (b.e_tot - a.e_tot + 0.5 * (b.t - a.t) * (a.diss_energy + b.diss_energy)) / e0
    return out, float(np.max(np.abs(out)))


def bd_identity_residual(series) -> tuple[np.ndarray, float]:
    """Per-interval defect of the entropy balance, normalized by its initial value."""
    recs = series.records
    if len(recs) < 2:
        raise ValueError("need at least two records")
    b0 = recs[0].bd
    out = np.empty(len(recs) - 1)
    for k in range(len(recs) - 1):
        a, b = recs[k], recs[k + 1]
        out[k] = (b.bd - a.bd + 0.5 * (b.t - a.t) * (a.diss_bd + b.diss_bd)) / b0
    return out, float(np.max(np.abs(out)))


def effective_velocity_residual(
    s_prev: FluidState,
    s_next: FluidState,
    p: ModelParams,
    dt: float,
    floor: float = 0.0,
    margin_frac: float = 0.04,
) -> float:
    """Discrete L2 norm of v_t + u v_x + (A*gamma/alpha) rho^(gamma-delta) (v - u).

    The time derivative is the finite difference of the two states; spatial
    terms are evaluated on their average.  The norm is restricted to nodes
    with rho >= 100*floor and to the interior |x| <= (1 - margin_frac) * L:
    the transport equation divides by rho in its derivation and does not hold
    at the Dirichlet-clamped boundary nodes.
    """
    g = s_prev.grid
    v_prev = effective_velocity(s_prev, p).values
    v_next = effective_velocity(s_next, p).values
    v_mid = 0.5 * (v_prev + v_next)
    u_mid = 0.5 * (s_prev.u.values + s_next.u.values)
    rho_mid = 0.5 * (s_prev.rho.values + s_next.rho.values)

    from .grid import ddx_array

    vt = (v_next - v_prev) / dt
    vx = ddx_array(v_mid, g.dx)
    damping = (p.A * p.gamma / p.alpha) * rho_mid ** (p.gamma - p.delta)
    res = vt + u_mid * vx + damping * (v_mid - u_mid)

    mask = (s_prev.rho.values >= 100.0 * floor) & (s_next.rho.values >= 100.0 * floor)
    mask &= np.abs(g.x) <= (1.0 - margin_frac) * g.half_width
    res = np.where(mask, res, 0.0)
    return float(np.sqrt(np.trapezoid(res**2, dx=g.dx)))


def attach_interval_residuals(series, p: ModelParams, floor: float = 0.0) -> None:
    """Store interval residuals on each record (zero on the first record)."""
    recs = series.records
    if len(recs) < 2:
        return
    e_seq, _ = energy_identity_residual(series)
    b_seq, _ = bd_identity_residual(series)
    for k in range(len(recs) - 1):
        recs[k + 1].residuals["energy_interval"] = float(e_seq[k])
        recs[k + 1].residuals["bd_interval"] = float(b_seq[k])
    if series.snapshots is not None and len(series.snapshots) == len(recs):
        for k in range(len(recs) - 1):
            dt = recs[k + 1].t - recs[k].t
            recs[k + 1].residuals["eff_velocity"] = effective_velocity_residual(
                series.snapshots[k], series.snapshots[k + 1], p, dt, floor=floor
            )


def trace_characteristics(series, seeds) -> list[CharacteristicTrace]:
    """Integrate dy/dt = u(t, y) through the stored snapshots (midpoint rule,
    linear interpolation in x) and sample xi + (alpha/delta) rho**delta along
    each path."""
    if series.snapshots is None or len(series.snapshots) < 2:
        raise ValueError("characteristic tracing requires stored snapshots")
    p = series.params
    g = series.grid
    x = g.x
    L = g.half_width
    times = np.array([s.t for s in series.snapshots])
    u_list = [s.u.values for s in series.snapshots]
    val_list = []
    for s in series.snapshots:
        xi = cumulative_integral(Field(g, s.rho.values * s.u.values))
        val_list.append(xi + (p.alpha / p.delta) * s.rho.values**p.delta)

    traces = []
    for x0 in seeds:
        y = float(x0)
        ys = [y]
        vals = [float(np.interp(y, x, val_list[0]))]
        ts = [times[0]]
        exited = False
        for k in range(len(times) - 1):
            h = times[k + 1] - times[k]
            u_half = 0.5 * (u_list[k] + u_list[k + 1])
            y_mid = y + 0.5 * h * float(np.interp(y, x, u_list[k]))
            y = y + h * float(np.interp(y_mid, x, u_half))
            if abs(y) > L:
                exited = True
                break
            ys.append(y)
            vals.append(float(np.interp(y, x, val_list[k + 1])))
            ts.append(times[k + 1])
        traces.append(
            CharacteristicTrace(
                x0=float(x0),
                times=np.array(ts),
                positions=np.array(ys),
                values=np.array(vals),
                exited=exited,
            )
        )
    return traces


def nondecay_check(series, slack: float = 0.99) -> NonDecayReport:
    """Check min_t |u|_inf >= slack * |P(0)|/m(0); vacuous when P(0) = 0."""
    recs = series.records
    base = recs[0]
    c_u = base.nondecay_floor
    min_u = min(r.u_inf for r in recs)
    vacuous = abs(base.p_mom) <= 1e-14 * max(1.0, base.m)
    return NonDecayReport(
        c_u=c_u,
        min_u_inf=min_u,
        satisfied=bool(vacuous or min_u >= slack * c_u),
        vacuous=bool(vacuous),
    )


def boundedness_ledger(series) -> dict:
    """Running max of every tracked norm against its initial value."""
    recs = series.records
    out = {}
    for key in TRACKED_KEYS:
        init = recs[0].tracked_norms[key]
        peak = max(r.tracked_norms[key] for r in recs)
        denom = init if init > 0 else 1.0
        out[key] = LedgerEntry(initial=init, running_max=peak, ratio=peak / denom)
    return out
