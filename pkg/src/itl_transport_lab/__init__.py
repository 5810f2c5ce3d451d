"""
ITL Transport Lab

Spectral-Galerkin laboratory for the transport of Gaussian measures by
truncated fractional BBM and quintic NLS flows on the torus: samplers,
importance weights, the Jacobi density, Monte Carlo verification of the
finite-N change-of-variables identities and deterministic energy diagnostics.

Example::

    from itl_transport_lab import ExperimentConfig, run_experiment

    config = ExperimentConfig.acceptance_bbm()
    result = run_experiment(config, "runs/quasi-bbm")
    result.passed
"""

__version__ = "0.1.0"

from itl_transport_lab.core import (  # noqa: E402
    BbmParams,
    ConfigurationError,
    ConvergenceError,
    CutoffSpec,
    ErrorCategory,
    EstimationError,
    ExperimentError,
    ExperimentKind,
    FlowBlowUpError,
    GaussianSpec,
    IntegratorKind,
    ModelKind,
    NlsParams,
    Reality,
    TransportLabError,
    ValidationError,
    VerdictReport,
)
from itl_transport_lab.runner import (  # noqa: E402
    ExperimentConfig,
    ExperimentResult,
    parse_config,
    run_experiment,
    serialize_config,
)
from itl_transport_lab.settings import LabSettings, get_settings  # noqa: E402
from itl_transport_lab.spectral import TorusField  # noqa: E402

__all__ = [
    "__version__",
    "BbmParams",
    "ConfigurationError",
    "ConvergenceError",
    "CutoffSpec",
    "ErrorCategory",
    "EstimationError",
    "ExperimentError",
    "ExperimentKind",
    "FlowBlowUpError",
    "GaussianSpec",
    "IntegratorKind",
    "ModelKind",
    "NlsParams",
    "Reality",
    "TransportLabError",
    "ValidationError",
    "VerdictReport",
    "ExperimentConfig",
    "ExperimentResult",
    "parse_config",
    "run_experiment",
    "serialize_config",
    "LabSettings",
    "get_settings",
    "TorusField",
]
