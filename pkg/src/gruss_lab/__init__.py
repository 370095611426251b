"""Numerical workbench for Gruss-type operator inequalities on matrix algebras."""
from .errors import GrussLabError, NumericalError, PreconditionError
from .matcore import DEFAULT_TOL, ToleranceConfig
from .report import InequalityReport, Tier

__all__ = [
    "DEFAULT_TOL",
    "GrussLabError",
    "InequalityReport",
    "NumericalError",
    "PreconditionError",
    "Tier",
    "ToleranceConfig",
]
__version__ = "0.1.0"
