import math

import numpy as np
import pytest

from icns1d.diagnostics import (
    DiagnosticsRecord,
    bd_identity_residual,
    boundedness_ledger,
    effective_velocity_residual,
    energy_identity_residual,
    nondecay_check,
    record,
    trace_characteristics,
)
from icns1d.grid import Field, Grid, cumulative_integral
from icns1d.initdata import InitFamilySpec, build_initial_state
from icns1d.params import make_params
from icns1d.solver import SolverConfig, TimeSeries, run
from conftest import constant_state, make_state, quick_config


@pytest.fixture(scope="module")
def ref_run():
    p = make_params(1, 2, 1, 1)
    g = Grid(50.0, 1001)
    spec = InitFamilySpec(sigma=1.0, velocity_profile="lorentz")
    c = SolverConfig(cfl=0.5, vacuum_floor=1e-8, t_end=0.5, output_stride=2)
    s0 = build_initial_state(spec, p, g, vacuum_floor=c.vacuum_floor)
    return run(s0, p, c), p


def test_record_conserved_quantities_against_quadrature_oracles():
    # oracles: adaptive quadrature of the closed forms on [-50, 50]
    #   m  = 2*atan(50)          = 3.101597985643492
    #   P  = quad (1+x^2)^-2     = 1.5707909960204665
    #   Ek = quad (1+x^2)^-3 / 2 = 0.5890486219086345
    #   E  = Ek + quad (1+x^2)^-2 = 2.159839617929101
    p = make_params(1, 2, 1, 1)
    g = Grid(50.0, 8001)
    s = build_initial_state(InitFamilySpec(sigma=1.0, velocity_profile="lorentz"), p, g)
    rec = record(s, p)
    assert rec.m == pytest.approx(3.101597985643492, abs=1e-7)
    assert rec.p_mom == pytest.approx(1.5707909960204665, abs=1e-7)
    assert rec.e_kin == pytest.approx(0.5890486219086345, abs=1e-7)
    assert rec.e_tot == pytest.approx(2.159839617929101, abs=1e-6)
    assert rec.nondecay_floor == pytest.approx(1.5707909960204665 / 3.101597985643492, abs=1e-6)
    # whole-line values for scale: m -> pi, P -> pi/2, C_u -> 1/2
    assert rec.nondecay_floor == pytest.approx(0.5, abs=2e-2)


def test_record_bd_entropy_against_oracle():
    # oracle: 0.5*quad rho*v^2 + quad rho^2 with v = (1-2x)/(1+x^2)
    # on [-50, 50] = 2.9452271223354964 (discrete ddx adds O(dx^2))
    p = make_params(1, 2, 1, 1)
    g = Grid(50.0, 8001)
    s = build_initial_state(InitFamilySpec(sigma=1.0, velocity_profile="lorentz"), p, g)
    rec = record(s, p)
    assert rec.bd == pytest.approx(2.9452271223354964, abs=2e-4)


def test_record_zero_velocity():
    p = make_params(1, 2, 1, 1)
    g = Grid(50.0, 2001)
    s = build_initial_state(InitFamilySpec(sigma=1.0, velocity_profile="zero"), p, g)
    rec = record(s, p)
    assert rec.e_kin == 0.0
    assert rec.p_mom == 0.0
    assert rec.u_inf == 0.0


def test_steady_run_all_residuals_vanish(ref_params):
    g = Grid(20.0, 101)
    c = quick_config(t_end=0.3, output_stride=4)
    series = run(constant_state(g, rho_bar=0.7), ref_params, c)
    _, emax = energy_identity_residual(series)
    _, bmax = bd_identity_residual(series)
    assert emax <= 1e-13
    assert bmax <= 1e-13
    evs = [r.residuals["eff_velocity"] for r in series.records[1:]]
    assert max(evs) <= 1e-10
    led = boundedness_ledger(series)
    # every functional of the constant state is zero up to round-off and
    # nothing grows over the run
    assert all(e.running_max <= 1e-12 and e.ratio <= 1.0 + 1e-12 for e in led.values())


def test_energy_residual_needs_two_records(ref_params):
    g = Grid(20.0, 101)
    series = run(constant_state(g), ref_params, quick_config(t_end=0.0))
    with pytest.raises(ValueError, match="two records"):
        energy_identity_residual(series)


def test_cauchy_schwarz_on_every_record(ref_run):
    series, _ = ref_run
    for rec in series.records:
        assert abs(rec.p_mom) <= math.sqrt(2 * rec.m * rec.e_kin) * (1 + 1e-10)
        assert rec.residuals["cauchy_schwarz"] >= -1e-10


def test_effective_velocity_residual_steady(ref_params):
    g = Grid(20.0, 101)
    a = constant_state(g, rho_bar=0.7)
    b = constant_state(g, rho_bar=0.7)
    b.t = 0.01
    assert effective_velocity_residual(a, b, ref_params, dt=0.01) == 0.0


def test_nondecay_satisfied_on_reference(ref_run):
    series, _ = ref_run
    rep = nondecay_check(series)
    assert not rep.vacuous
    assert rep.c_u == pytest.approx(0.5064, abs=2e-3)
    assert rep.satisfied


def test_nondecay_vacuous_for_odd_velocity():
    # odd u0, even rho0: zero initial momentum makes the bound vacuous
    p = make_params(1, 2, 1, 1)
    g = Grid(50.0, 1001)
    s = make_state(g, lambda x: 1 / (1 + x**2), lambda x: x * np.exp(-(x**2)))
    series = run(s, p, quick_config(t_end=0.05))
    rep = nondecay_check(series)
    assert rep.vacuous


def test_nondecay_detects_artificial_damping(ref_run):
    # synthetic fixture: exponentially damped u_inf must trip the detector
    series, p = ref_run
    base = series.records[0]
    fake = TimeSeries(params=p, config=series.config, grid=series.grid, records=[])
    for k, t in enumerate(np.linspace(0, 10, 30)):
        r = DiagnosticsRecord(
            t=t,
            m=base.m,
            p_mom=base.p_mom,
            e_kin=base.e_kin,
            e_tot=base.e_tot,
            bd=base.bd,
            diss_energy=0.0,
            diss_bd=0.0,
            u_inf=base.u_inf * math.exp(-t),
            nondecay_floor=base.nondecay_floor,
        )
        fake.records.append(r)
    rep = nondecay_check(fake)
    assert not rep.satisfied


def test_boundedness_ledger_zero_initial_uses_unit_denominator(ref_params):
    g = Grid(20.0, 101)
    series = run(constant_state(g, rho_bar=0.7), ref_params, quick_config(t_end=0.1))
    led = boundedness_ledger(series)
    # constant state: psi norms are exactly zero initially
    assert led["psi_l2"].initial == 0.0
    assert led["psi_l2"].ratio == led["psi_l2"].running_max


def test_psi_norm_matches_log_slope_for_linear_regime(ref_run):
    series, p = ref_run
    from icns1d.grid import ddx, lp_norm

    snap = series.snapshots[-1]
    direct = lp_norm(ddx(Field(snap.grid, np.log(snap.rho.values))), 2)
    assert series.records[-1].tracked_norms["psi_l2"] == pytest.approx(direct, rel=1e-12)


def test_characteristics_frozen_for_zero_velocity(ref_params):
    g = Grid(20.0, 401)
    c = quick_config(t_end=0.2, output_stride=2)
    # constant rho, zero u: state is steady, characteristics must not move
    series = run(constant_state(g, rho_bar=0.6), ref_params, c)
    traces = trace_characteristics(series, seeds=[-3.0, 0.5, 7.25])
    for tr in traces:
        assert not tr.exited
        assert np.allclose(tr.positions, tr.x0, atol=1e-14)
        assert np.allclose(tr.values, tr.values[0], atol=1e-12)


def test_characteristic_bound_value_decreases(ref_run):
    series, _ = ref_run
    traces = trace_characteristics(series, seeds=list(np.linspace(-5, 5, 7)))
    for tr in traces:
        drift = np.max(tr.values - tr.values[0])
        assert drift <= 1e-3 * abs(tr.values[0])


def test_interpolation_inequality_on_solver_fields(ref_run):
    # sup^2 <= 1.05 |f|_2 |f_x|_2 for the decaying fields the solver produces
    from icns1d.grid import ddx, lp_norm
    from icns1d.reformulate import effective_velocity, log_slope_variable

    series, p = ref_run
    for snap in (series.snapshots[0], series.snapshots[-1]):
        for f in (snap.u, effective_velocity(snap, p), log_slope_variable(p, snap.rho)):
            sup = lp_norm(f, math.inf)
            assert sup**2 <= 1.05 * lp_norm(f, 2) * lp_norm(ddx(f), 2)


def test_cumulative_momentum_integral_endpoint(ref_run):
    # xi(t, L) equals the total momentum integral by construction
    series, _ = ref_run
    snap = series.snapshots[-1]
    xi = cumulative_integral(Field(snap.grid, snap.rho.values * snap.u.values))
    assert xi[-1] == pytest.approx(series.records[-1].p_mom, abs=1e-13)


def test_trace_requires_snapshots(ref_params):
    g = Grid(20.0, 101)
    series = run(constant_state(g), ref_params, quick_config(t_end=0.05), keep_snapshots=False)
    with pytest.raises(ValueError, match="snapshots"):
        trace_characteristics(series, seeds=[0.0])


def _synthetic_series(p, rows):
    # rows: (t, e_tot, diss_energy, bd, diss_bd)
    series = TimeSeries(params=p, config=None, grid=Grid(10.0, 16), records=[])
    for t, e, de, bd, db in rows:
        series.records.append(
            DiagnosticsRecord(
                t=t, m=1.0, p_mom=0.0, e_kin=0.0, e_tot=e, bd=bd,
                diss_energy=de, diss_bd=db, u_inf=0.0, nondecay_floor=0.0,
            )
        )
    return series


def test_energy_residual_matches_hand_computation(ref_params):
    # one interval: r = [E1 - E0 + dt*(D0 + D1)/2] / E0
    series = _synthetic_series(ref_params, [(0.0, 2.0, 0.5, 3.0, 0.2), (0.1, 1.9, 0.3, 2.9, 0.4)])
    seq, mx = energy_identity_residual(series)
    expected = (1.9 - 2.0 + 0.1 * 0.5 * (0.5 + 0.3)) / 2.0
    assert seq[0] == pytest.approx(expected, rel=1e-15)
    assert mx == pytest.approx(abs(expected), rel=1e-15)
    bseq, _ = bd_identity_residual(series)
    assert bseq[0] == pytest.approx((2.9 - 3.0 + 0.1 * 0.5 * (0.2 + 0.4)) / 3.0, rel=1e-15)


def test_effective_velocity_residual_against_closed_form_oracle():
    # fields that do NOT satisfy the transport identity: the residual must
    # equal the analytically evaluated left-hand side to ~1%
    p = make_params(1, 2, 1, 1)
    g = Grid(8.0, 4001)
    x = g.x
    dt = 1e-5
    t0 = 0.3

    def rho(t):
        return 0.5 + 0.3 * np.exp(-(x**2)) * (1 + 0.1 * math.sin(t))

    def u(t):
        return 0.2 * np.sin(x) * np.exp(-(x**2) / 4) * math.cos(t)

    a = make_state(g, lambda _: rho(t0), lambda _: u(t0), t=t0)
    b = make_state(g, lambda _: rho(t0 + dt), lambda _: u(t0 + dt), t=t0 + dt)
    got = effective_velocity_residual(a, b, p, dt=dt, margin_frac=0.04)

    # closed-form LHS at the midpoint time
    tm = t0 + dt / 2
    s, c = math.sin(tm), math.cos(tm)
    e1, e4 = np.exp(-(x**2)), np.exp(-(x**2) / 4)
    r = 0.5 + 0.3 * e1 * (1 + 0.1 * s)
    rt = 0.03 * e1 * c
    rx = -0.6 * x * e1 * (1 + 0.1 * s)
    rxx = (1.2 * x**2 - 0.6) * e1 * (1 + 0.1 * s)
    rtx = -0.06 * x * e1 * c
    uu = 0.2 * np.sin(x) * e4 * c
    ut = -0.2 * np.sin(x) * e4 * s
    ux = 0.2 * c * e4 * (np.cos(x) - 0.5 * x * np.sin(x))
    v = uu + rx / r
    vt = ut + (rtx * r - rx * rt) / r**2
    vx = ux + (rxx * r - rx**2) / r**2
    lhs = vt + uu * vx + 2.0 * r * (v - uu)
    mask = np.abs(x) <= 0.96 * g.half_width
    expected = float(np.sqrt(np.trapezoid(np.where(mask, lhs, 0.0) ** 2, dx=g.dx)))
    assert got == pytest.approx(expected, rel=1e-2)
