"""
Core building blocks: exception hierarchy and typed models.
"""
from itl_transport_lab.core.exceptions import (
    ConfigurationError,
    ConvergenceError,
    ErrorCategory,
    EstimationError,
    ExperimentError,
    FlowBlowUpError,
    TransportLabError,
    ValidationError,
)
from itl_transport_lab.core.models import (
    BbmParams,
    CutoffSpec,
    ExperimentKind,
    GaussianSpec,
    IntegratorKind,
    ModelKind,
    NlsParams,
    Reality,
    VerdictReport,
)

__all__ = [
    "ConfigurationError",
    "ConvergenceError",
    "ErrorCategory",
    "EstimationError",
    "ExperimentError",
    "FlowBlowUpError",
    "TransportLabError",
    "ValidationError",
    "BbmParams",
    "CutoffSpec",
    "ExperimentKind",
    "GaussianSpec",
    "IntegratorKind",
    "ModelKind",
    "NlsParams",
    "Reality",
    "VerdictReport",
]
