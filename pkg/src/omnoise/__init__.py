"""Quantum-noise analysis of a cavity coupled to two mechanical resonators in a phase-controlled loop."""

__version__ = "0.1.0"

from .errors import (ConfigError, ConvergenceError, InstabilityError, InvalidParameterError,
                     NumericalError, OmnoiseError, QuadratureError, SingularityError)
from .model import PhysicalParams, RunOptions, load_config, paper_defaults, thermal_occupancy
from .steady_state import MeanFields, solve_mean_fields
from .linmodel import LinearModel, QuadIndex, build_linear_model
from .spectra import EigenSystem, eigensystem, prepare

__all__ = [
    "ConfigError", "ConvergenceError", "InstabilityError", "InvalidParameterError",
    "NumericalError", "OmnoiseError", "QuadratureError", "SingularityError",
    "PhysicalParams", "RunOptions", "load_config", "paper_defaults", "thermal_occupancy",
    "MeanFields", "solve_mean_fields", "LinearModel", "QuadIndex", "build_linear_model",
    "EigenSystem", "eigensystem", "prepare",
]
