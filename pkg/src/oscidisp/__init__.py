"""Taylor dispersivity of passive tracer in oscillatory channel flows.

Three independent routes are provided: exact closed forms for the classical
profiles, a numerical solve of the periodic cell problem for arbitrary
profiles and drifts, and a Monte Carlo simulation of the reflected diffusion.
"""

from .asymptotics import (
    common_period,
    gradient_energy,
    large_omega_dispersivity,
    small_omega_dispersivity,
)
from .cell_solver import (
    ComplexBVP,
    ComplexField,
    assemble_cell_problem,
    dispersivity_from_field,
    numerical_dispersivity,
    solve_cell_problem,
    steady_dispersivity,
)
from .closed_forms import (
    POISEUILLE,
    SHEAR,
    closed_form,
    combined_dispersivity,
    d1,
    d2,
    large_omega_constant,
    power_law_closed_form,
    small_omega_series,
)
from .domain import (
    ChannelConfig,
    DensityProfile,
    DispersivityEstimate,
    FlowSpec,
    Harmonic,
    LinearShear,
    Method,
    Poiseuille,
    PowerLaw,
    ScaleFactors,
    Tabulated,
    VerticalDrift,
    dimensional_dispersivity,
    evaluate_velocity,
    nondimensionalize,
    remove_mean,
    stationary_density,
)
from .errors import (
    DomainError,
    InputError,
    OscidispError,
    PreconditionError,
    SimulationError,
    SingularSystemError,
    UnsupportedError,
)
from .sde import (
    Ensemble,
    SimParams,
    estimate_dispersivity_mc,
    normality_check,
    occupancy_ks,
    reflect,
    simulate_paths,
)
from .superposition import SymmetryParts, additive_dispersivity, cross_term, decompose

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
