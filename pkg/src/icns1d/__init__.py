"""1-D viscous gas simulation lab: degenerate viscosity, far-field vacuum.

Evolves the barotropic system with pressure A*rho**gamma and viscosity
alpha*rho**delta (0 < delta <= 1) in both its primitive and transformed
forms, and certifies the structural identities of the flow numerically:
conservation ledgers, energy and entropy balances, effective-velocity
transport, characteristic density bounds, and the velocity non-decay floor.
"""

from .errors import ConfigError, SolverError, VerificationError
from .grid import Field, Grid, d2dx2, ddx, integrate, lp_norm
from .initdata import (
    CompatibilityReport,
    InitFamilySpec,
    build_initial_state,
    check_compatibility,
    sigma_window,
)
from .params import (
    DerivedConstants,
    ModelParams,
    derived_constants,
    make_params,
    pressure,
    viscosity,
)
from .reformulate import (
    effective_velocity,
    from_reformulated,
    to_reformulated,
    viscous_potential,
)
from .solver import FluxLedger, SolverConfig, TimeSeries, cfl_dt, run, step_primitive, step_reformulated
from .state import FluidState, ReformulatedState, Regime

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "SolverError",
    "VerificationError",
    "Field",
    "Grid",
    "ddx",
    "d2dx2",
    "integrate",
    "lp_norm",
    "InitFamilySpec",
    "CompatibilityReport",
    "build_initial_state",
    "check_compatibility",
    "sigma_window",
    "ModelParams",
    "DerivedConstants",
    "make_params",
    "derived_constants",
    "pressure",
    "viscosity",
    "effective_velocity",
    "to_reformulated",
    "from_reformulated",
    "viscous_potential",
    "FluxLedger",
    "SolverConfig",
    "TimeSeries",
    "cfl_dt",
    "run",
    "step_primitive",
    "step_reformulated",
    "FluidState",
    "ReformulatedState",
    "Regime",
    "__version__",
]
