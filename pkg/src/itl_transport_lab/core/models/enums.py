"""
Enumerations for the transport lab.
"""
from enum import Enum


class Reality(str, Enum):
    """Whether a field is real-valued (Hermitian coefficients) or complex."""
    REAL = "real"
    COMPLEX = "complex"


class ModelKind(str, Enum):
    """Dispersive model driving the flow."""
    BBM = "bbm"
    NLS = "nls"


class IntegratorKind(str, Enum):
    """Fixed-step time integrators."""
    RK4 = "rk4"
    IMPLICIT_MIDPOINT = "implicit_midpoint"


class ExperimentKind(str, Enum):
    """Experiments the runner can execute."""
    SAMPLE = "sample"
    EVOLVE = "evolve"
    VERIFY_INVARIANCE = "verify-invariance"
    VERIFY_QUASI = "verify-quasi"
    DENSITY_CONVERGENCE = "density-convergence"
    DENSITY_LP = "density-lp"
    GROWTH_BOUNDS = "growth-bounds"
    TAILS = "tails"
    RECURRENCE = "recurrence"
