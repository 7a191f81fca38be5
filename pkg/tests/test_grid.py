import math

import numpy as np
import pytest

from icns1d.grid import (
    Field,
    Grid,
    cumulative_integral,
    d2dx2,
    ddx,
    integrate,
    lp_norm,
)


def field(grid, fn):
    return Field.from_function(grid, fn)


def test_grid_nodes_symmetric():
    g = Grid(5.0, 21)
    assert g.dx == pytest.approx(0.5)
    assert np.allclose(g.x + g.x[::-1], 0.0, atol=0)
    assert np.all(np.diff(g.x) > 0)


def test_grid_validation():
    with pytest.raises(ValueError, match="n must be at least 16"):
        Grid(1.0, 8)
    with pytest.raises(ValueError, match="half_width must be positive"):
        Grid(-1.0, 100)


def test_field_rejects_nan():
    g = Grid(1.0, 16)
    with pytest.raises(ValueError, match="non-finite"):
        Field(g, np.full(16, np.nan))


def test_ddx_linear_exact():
    g = Grid(3.0, 31)
    d = ddx(field(g, lambda x: x))
    assert np.allclose(d.values, 1.0, atol=1e-13)


def test_d2dx2_quadratic_exact():
    g = Grid(3.0, 31)
    d = d2dx2(field(g, lambda x: x**2))
    assert np.allclose(d.values, 2.0, atol=1e-10)


def test_ddx_constant_is_zero():
    g = Grid(2.0, 64)
    assert np.allclose(ddx(field(g, lambda x: np.full_like(x, 3.7))).values, 0.0, atol=1e-13)


def test_ddx_second_order_refinement():
    # halving dx must shrink the interior error of d/dx sin(x) by ~4
    errs = []
    for n in (201, 401):
        g = Grid(math.pi, n)
        d = ddx(field(g, np.sin))
        errs.append(np.max(np.abs(d.values[1:-1] - np.cos(g.x[1:-1]))))
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_integrate_lorentzian_against_arctan():
    # closed form: integral of (1+x^2)^-1 over [-50, 50] is 2*atan(50)
    g = Grid(50.0, 8001)
    val = integrate(field(g, lambda x: 1 / (1 + x**2)))
    assert val == pytest.approx(3.101597985643492, abs=1e-8)


def test_integrate_zero_and_odd():
    g = Grid(10.0, 501)
    assert integrate(field(g, lambda x: np.zeros_like(x))) == 0.0
    odd = integrate(field(g, lambda x: x * np.exp(-(x**2))))
    assert abs(odd) < 1e-15


def test_cumulative_integral_endpoint_matches_integrate():
    g = Grid(8.0, 321)
    f = field(g, lambda x: np.exp(-(x**2) / 3))
    cum = cumulative_integral(f)
    assert cum[0] == 0.0
    assert cum[-1] == pytest.approx(integrate(f), abs=1e-14)


def test_lp_norm_sup():
    g = Grid(50.0, 2001)
    assert lp_norm(field(g, lambda x: 1 / (1 + x**2)), math.inf) == pytest.approx(1.0)


def test_lp_norm_l2_lorentzian():
    # oracle: sqrt(quad((1+x^2)^-2, -50, 50)) = 1.2533120106423885
    g = Grid(50.0, 8001)
    val = lp_norm(field(g, lambda x: 1 / (1 + x**2)), 2)
    assert val == pytest.approx(1.2533120106423885, abs=1e-7)
    # whole-line value sqrt(pi/2) differs only by the truncated tail
    assert val == pytest.approx(math.sqrt(math.pi / 2), abs=1e-3)


def test_lp_norm_rejects_small_p():
    g = Grid(1.0, 16)
    with pytest.raises(ValueError, match="p >= 1"):
        lp_norm(field(g, lambda x: x), 0.5)


def test_lp_norm_zero_field():
    g = Grid(1.0, 16)
    for p in (1, 2, 7.5, math.inf):
        assert lp_norm(field(g, lambda x: np.zeros_like(x)), p) == 0.0


@pytest.mark.parametrize("seed", range(4))
def test_interpolation_inequality_on_decaying_fields(seed):
    # sup^2 <= (1 + slack) * |f|_2 * |f_x|_2 for decaying fields, slack 5%
    rng = np.random.default_rng(seed)
    g = Grid(50.0, 4001)
    f = np.zeros(g.n)
    for _ in range(4):
        c = rng.uniform(-2, 2)
        x0 = rng.uniform(-10, 10)
        w = rng.uniform(0.5, 3.0)
        f += c * np.exp(-(((g.x - x0) / w) ** 2))
    fld = Field(g, f)
    sup = lp_norm(fld, math.inf)
    assert sup**2 <= 1.05 * lp_norm(fld, 2) * lp_norm(ddx(fld), 2)


def test_integral_of_derivative_telescopes():
    g = Grid(6.0, 601)
    f = field(g, lambda x: np.tanh(x) + 0.3 * x)
    boundary_diff = f.values[-1] - f.values[0]
    assert integrate(ddx(f)) == pytest.approx(boundary_diff, abs=g.dx**2)
