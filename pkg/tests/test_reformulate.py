import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from icns1d.grid import Field, Grid, ddx
from icns1d.params import make_params
from icns1d.reformulate import (
    effective_velocity,
    from_reformulated,
    momentum_diffusion_coefficient,
    to_reformulated,
    viscous_potential,
)
from icns1d.state import FluidState, Regime


def state_from(grid, rho_fn, u_fn=None):
    u_fn = u_fn or (lambda x: np.zeros_like(x))
    return FluidState(rho=Field.from_function(grid, rho_fn), u=Field.from_function(grid, u_fn))


def test_constant_density_transform():
    g = Grid(10.0, 101)
    p = make_params(1, 2, 1, 1)
    r = to_reformulated(state_from(g, lambda x: np.full_like(x, 0.5)), p)
    assert np.allclose(r.phi.values, 1.0, atol=1e-14)
    assert np.allclose(r.psi.values, 0.0, atol=1e-14)
    assert r.regime is Regime.LINEAR


def test_psi_linear_regime_is_log_derivative():
    g = Grid(20.0, 4001)
    p = make_params(1, 2, 1, 1)
    r = to_reformulated(state_from(g, lambda x: 1 / (1 + x**2)), p)
    i = np.argmin(np.abs(g.x - 1.0))
    assert g.x[i] == pytest.approx(1.0, abs=1e-12)
    assert r.psi.values[i] == pytest.approx(-1.0, abs=1e-4)
    assert r.regime is Regime.LINEAR


def test_psi_sublinear_critical_point():
    g = Grid(20.0, 2001)
    p = make_params(1, 2, 0.5, 1)
    r = to_reformulated(state_from(g, lambda x: 1 / (1 + x**2)), p)
    i = g.n // 2
    assert r.psi.values[i] == pytest.approx(0.0, abs=1e-10)
    assert r.regime is Regime.SUB_LINEAR


def test_inverse_power_formula():
    g = Grid(10.0, 101)
    p = make_params(1, 3, 1, 1)
    # phi = (A*gamma/(gamma-1)) rho^2 = 1.5 * 4 = 6 at rho = 2
    r = to_reformulated(state_from(g, lambda x: np.full_like(x, 2.0)), p)
    assert np.allclose(r.phi.values, 6.0, atol=1e-13)
    back = from_reformulated(r, p)
    assert np.allclose(back.rho.values, 2.0, atol=1e-13)


def test_round_trip_decaying_profile():
    g = Grid(50.0, 2001)
    p = make_params(1, 2, 0.9, 1)
    s = state_from(g, lambda x: 1 / (1 + np.abs(x) ** 1.8))
    back = from_reformulated(to_reformulated(s, p), p)
    assert np.max(np.abs(back.rho.values - s.rho.values)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(
    A=st.floats(0.2, 5),
    gamma=st.floats(1.2, 4),
    delta=st.floats(0.2, 1.0),
)
def test_round_trip_property(A, gamma, delta):
    g = Grid(20.0, 101)
    p = make_params(A, gamma, delta, 1.0)
    s = state_from(g, lambda x: 0.3 + 1 / (1 + x**2))
    back = from_reformulated(to_reformulated(s, p), p)
    assert np.max(np.abs(back.rho.values - s.rho.values)) <= 1e-11 * np.max(s.rho.values)


def test_transform_rejects_vacuum():
    g = Grid(10.0, 101)
    p = make_params(1, 2, 1, 1)
    rho = np.full(g.n, 0.5)
    rho[3] = 0.0
    s = FluidState(rho=Field(g, rho), u=Field(g, np.zeros(g.n)))
    with pytest.raises(ValueError, match="positive"):
        to_reformulated(s, p)


def test_effective_velocity_linear_regime():
    # u = 0, rho lorentzian: v = (ln rho)_x = -2x/(1+x^2), so v(1) = -1
    g = Grid(20.0, 4001)
    p = make_params(1, 2, 1, 1)
    v = effective_velocity(state_from(g, lambda x: 1 / (1 + x**2)), p)
    i = np.argmin(np.abs(g.x - 1.0))
    assert v.values[i] == pytest.approx(-1.0, abs=1e-4)


def test_effective_velocity_constant_density():
    g = Grid(10.0, 101)
    p = make_params(1, 2, 0.6, 2.0)
    v = effective_velocity(state_from(g, lambda x: np.full_like(x, 0.7)), p)
    assert np.allclose(v.values, 0.0, atol=1e-12)


def test_effective_velocity_gaussian_origin():
    # rho = exp(-x^2): rho_x(0) = 0, so v(0) = u(0) for any delta
    g = Grid(6.0, 1201)
    p = make_params(1, 2, 0.5, 1)
    s = state_from(g, lambda x: np.exp(-(x**2)), lambda x: 0.3 * np.cos(x))
    v = effective_velocity(s, p)
    i = g.n // 2
    assert v.values[i] == pytest.approx(s.u.values[i], abs=1e-9)


@pytest.mark.parametrize("delta", [0.5, 0.75, 1.0])
def test_velocity_shift_equals_potential_gradient(delta):
    # v - u = d/dx Phi(rho) with Phi'(rho) = mu/rho^2, to O(dx^2)
    g = Grid(30.0, 4001)
    p = make_params(1, 2, delta, 1.3)
    s = state_from(g, lambda x: 0.2 + 1 / (1 + x**2), lambda x: np.sin(x) * np.exp(-(x**2)))
    v = effective_velocity(s, p)
    pot = Field(g, viscous_potential(p, s.rho.values))
    lhs = v.values[1:-1] - s.u.values[1:-1]
    rhs = ddx(pot).values[1:-1]
    assert np.max(np.abs(lhs - rhs)) <= 5 * g.dx**2


@pytest.mark.parametrize("delta", [0.4, 0.75, 1.0])
def test_velocity_shift_is_psi_scaled(delta):
    # same quantity via the transform: v - u = (alpha/delta) psi nodewise
    g = Grid(30.0, 2001)
    p = make_params(1, 2, delta, 0.8)
    s = state_from(g, lambda x: 0.2 + 1 / (1 + x**2))
    v = effective_velocity(s, p)
    psi = to_reformulated(s, p).psi
    lhs = v.values[1:-1] - s.u.values[1:-1]
    rhs = (p.alpha / p.delta) * psi.values[1:-1]
    assert np.max(np.abs(lhs - rhs)) <= 5 * g.dx**2


def test_psi_linear_regime_matches_phi_ratio_form():
    # psi = (ln rho)_x also equals phi_x / ((gamma-1) phi); the two discrete
    # evaluations agree to the stencil's order
    g = Grid(30.0, 2001)
    p = make_params(1, 2.3, 1, 1)
    s = state_from(g, lambda x: 0.1 + 1 / (1 + x**2))
    r = to_reformulated(s, p)
    alt = ddx(r.phi).values / ((p.gamma - 1.0) * r.phi.values)
    assert np.max(np.abs(r.psi.values[1:-1] - alt[1:-1])) <= 5 * g.dx**2


def test_momentum_diffusion_coefficient_unit_phi():
    # gamma=2, delta=3/4 at phi=1: coefficient reduces to a*alpha
    p = make_params(1, 2, 0.75, 1)
    from icns1d.params import derived_constants

    d = derived_constants(p)
    assert momentum_diffusion_coefficient(p, np.array(1.0)) == pytest.approx(d.a * p.alpha)


def test_momentum_diffusion_matches_primitive_weight():
    # a * phi^(2e) = rho^(delta-1) exactly
    g = Grid(10.0, 101)
    p = make_params(1.7, 2.4, 0.6, 1.1)
    rho = 0.3 + 1 / (1 + g.x**2)
    from icns1d.reformulate import pressure_variable

    phi = pressure_variable(p, rho)
    K = momentum_diffusion_coefficient(p, phi)
    assert np.allclose(K, p.alpha * rho ** (p.delta - 1.0), rtol=1e-12)
