"""Generalized Einstein coefficients and quantum Rabi oscillations of a
two-level system in ideal and lossy resonant cavities."""
from .constants import CODATA2018
from .coupling import (
    CavityGeometry,
    CouplingSolution,
    Scenario,
    TwoLevelSystem,
    blackbody_coupling,
    free_space_a0,
    lossy_fixed_point,
    renorm_coherent,
    solve_cavity_coupled,
)
from .dynamics import (
    PopulationState,
    RateParams,
    average_entropy,
    einstein_solution,
    entropy,
    generalized_solution,
    ode_oracle,
)
from .errors import (
    ConfigError,
    DomainError,
    EinsteinRabiError,
    FitError,
    NumericalError,
    TraceFormatError,
)
from .fit import FitResult, LossyRabiTemplate, TraceData, fit_trace
from .photons import PhotonField
from .timeseries import TimeSeries
from .transition import (
    CavityMode,
    TransitionModel,
    absorption_prob,
    absorption_rate,
    emission_rate,
    generalized_A,
    generalized_B12,
    generalized_B21,
    prob_ideal,
    prob_lossy,
    prob_lossy_low_nbar,
)

__version__ = "0.1.0"

__all__ = [
    "CODATA2018",
    "CavityGeometry",
    "CavityMode",
    "ConfigError",
    "CouplingSolution",
    "DomainError",
    "EinsteinRabiError",
    "FitError",
    "FitResult",
    "LossyRabiTemplate",
    "NumericalError",
    "PhotonField",
    "PopulationState",
    "RateParams",
    "Scenario",
    "TimeSeries",
    "TraceData",
    "TraceFormatError",
    "TransitionModel",
    "TwoLevelSystem",
    "absorption_prob",
    "absorption_rate",
    "average_entropy",
    "blackbody_coupling",
    "einstein_solution",
    "emission_rate",
    "entropy",
    "fit_trace",
    "free_space_a0",
    "generalized_A",
    "generalized_B12",
    "generalized_B21",
    "generalized_solution",
    "lossy_fixed_point",
    "ode_oracle",
    "prob_ideal",
    "prob_lossy",
    "prob_lossy_low_nbar",
    "renorm_coherent",
    "solve_cavity_coupled",
]
