"""Fast-forward driving of small transverse-field Ising clusters."""
from .cluster import GEOMETRIES, ClusterGeometry, catalog
from .errors import (
    ConvergenceError,
    DegeneratePointError,
    DomainError,
    InconsistentSystemError,
    NumericError,
    StepSizeError,
    UnknownGeometryError,
)
from .fastforward import Schedule, build_hff, evolve, fidelity
from .groundstate import derivative, ground_analytic, ground_numeric, ground_state
from .operators import RegWeights, build_h0, build_reg
from .regsolver import assemble, closed_form, regularization, solve

__version__ = "0.1.0"

__all__ = [
    "GEOMETRIES", "ClusterGeometry", "catalog",
    "ConvergenceError", "DegeneratePointError", "DomainError",
    "InconsistentSystemError", "NumericError", "StepSizeError", "UnknownGeometryError",
    "Schedule", "build_hff", "evolve", "fidelity",
    "derivative", "ground_analytic", "ground_numeric", "ground_state",
    "RegWeights", "build_h0", "build_reg",
    "assemble", "closed_form", "regularization", "solve",
]
