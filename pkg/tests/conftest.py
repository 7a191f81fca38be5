import numpy as np
import pytest

from icns1d.grid import Field, Grid
from icns1d.initdata import InitFamilySpec, build_initial_state
from icns1d.params import make_params
from icns1d.solver import SolverConfig
from icns1d.state import FluidState


@pytest.fixture
def ref_params():
    # shallow-water-like pair: linear viscosity, quadratic pressure
    return make_params(A=1.0, gamma=2.0, delta=1.0, alpha=1.0)


@pytest.fixture
def sub_params():
    return make_params(A=1.0, gamma=2.0, delta=0.75, alpha=1.0)


@pytest.fixture
def ref_spec():
    return InitFamilySpec(sigma=1.0, velocity_profile="lorentz", velocity_amplitude=1.0, velocity_width=1.0)


@pytest.fixture
def small_grid():
    return Grid(half_width=50.0, n=801)


def make_state(grid, rho_fn, u_fn, t=0.0):
    return FluidState(
        rho=Field.from_function(grid, rho_fn),
        u=Field.from_function(grid, u_fn),
        t=t,
    )


def constant_state(grid, rho_bar=0.5, u_bar=0.0):
    return make_state(grid, lambda x: np.full_like(x, rho_bar), lambda x: np.full_like(x, u_bar))


@pytest.fixture
def ref_state_small(ref_spec, ref_params, small_grid):
    return build_initial_state(ref_spec, ref_params, small_grid, vacuum_floor=1e-8)


def quick_config(**kw):
    defaults = dict(cfl=0.5, vacuum_floor=1e-8, t_end=0.2, output_stride=2)
    defaults.update(kw)
    return SolverConfig(**defaults)
