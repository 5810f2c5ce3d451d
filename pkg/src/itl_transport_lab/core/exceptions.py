"""
Structured exception hierarchy for the transport lab.

Every failure raised by the package is a ``TransportLabError`` carrying an
error code, a category and a JSON-serializable context, so the runner can log
it and emit a field-level message before exiting::

    raise FlowBlowUpError(
        "Coefficient modulus exceeded guard",
        time=0.731,
        max_modulus=3.2e12,
        context={"model": "bbm", "N": 32},
    )
"""

from enum import Enum
from typing import Any, Dict, Optional


class ErrorCategory(str, Enum):
    """Exception categories for routing and reporting."""

    CONFIGURATION = "configuration"   # Bad experiment/config input
    VALIDATION = "validation"         # Operation precondition violated
    NUMERICAL = "numerical"           # Nonfinite or diverging state
    CONVERGENCE = "convergence"       # Iteration did not converge
    STATISTICAL = "statistical"       # Degenerate Monte Carlo estimate


class TransportLabError(Exception):
    """
    Base exception for all lab operations.

    Example::

        try:
            report = quasi_invariance_test_bbm(gspec, cspec, psi, t=0.5, count=100, seed=1)
        except TransportLabError as e:
            logger.error("Verification failed", extra=e.to_log_dict())
    """

    def __init__(
        self,
        message: str,
        error_code: str,
        category: ErrorCategory,
        context: Optional[Dict[str, Any]] = None,
        original_error: Optional[Exception] = None,
    ):
        super().__init__(message)
        self.message = message
        self.error_code = error_code
        self.category = category
        self.context = context or {}
        self.original_error = original_error

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for verdict files and CLI output."""
        return {
            "error_code": self.error_code,
            "message": self.message,
            "category": self.category.value,
            "context": self.context,
        }

    def to_log_dict(self) -> Dict[str, Any]:
        """
        Convert to structured logging format (JSON-serializable).

        Returns:
            Dictionary with error_code, category, error_message, context and,
            when present, the wrapped error and its type.
        """
        result = {
            "error_code": self.error_code,
            "category": self.category.value,
            "error_message": self.message,
            "context": self.context,
        }
        if self.original_error:
            result["original_error"] = str(self.original_error)
            result["error_type"] = type(self.original_error).__name__
        return result


class ConfigurationError(TransportLabError):
    """Experiment configuration could not be parsed or validated."""

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None,
        original_error: Optional[Exception] = None,
    ):
        context = context or {}
        if field:
            context["field"] = field
        super().__init__(
            message=message,
            error_code="CONFIGURATION_ERROR",
            category=ErrorCategory.CONFIGURATION,
            context=context,
            original_error=original_error,
        )


class ValidationError(TransportLabError, ValueError):
    """
    Operation precondition violated.

    Also a ``ValueError`` so plain numeric callers can catch it without
    importing the lab hierarchy.
    """

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None,
        original_error: Optional[Exception] = None,
    ):
        context = context or {}
        if field:
            context["field"] = field
        super().__init__(
            message=message,
            error_code="VALIDATION_ERROR",
            category=ErrorCategory.VALIDATION,
            context=context,
            original_error=original_error,
        )

    @property
    def field(self) -> Optional[str]:
        return self.context.get("field")


class FlowBlowUpError(TransportLabError):
    """
    Integrated state became nonfinite or exceeded the modulus guard.

    The exact truncated flows are global, so this always signals a
    step-size fault. ``time`` is the first time at which the guard fired.
    """

    def __init__(
        self,
        message: str,
        time: float,
        max_modulus: float,
        context: Optional[Dict[str, Any]] = None,
    ):
        context = context or {}
        context["time"] = time
        context["max_modulus"] = max_modulus
        super().__init__(
            message=message,
            error_code="FLOW_BLOWUP",
            category=ErrorCategory.NUMERICAL,
            context=context,
        )
        self.time = time
        self.max_modulus = max_modulus


class ConvergenceError(TransportLabError):
    """Fixed-point or inner solver iteration did not converge."""

    def __init__(
        self,
        message: str,
        iterations: int,
        residual: float,
        context: Optional[Dict[str, Any]] = None,
    ):
        context = context or {}
        context["iterations"] = iterations
        context["residual"] = residual
        super().__init__(
            message=message,
            error_code="CONVERGENCE_ERROR",
            category=ErrorCategory.CONVERGENCE,
            context=context,
        )


class EstimationError(TransportLabError):
    """Monte Carlo estimate is degenerate (no finite weights, tiny ESS)."""

    def __init__(
        self,
        message: str,
        effective_sample_size: Optional[float] = None,
        context: Optional[Dict[str, Any]] = None,
    ):
        context = context or {}
        if effective_sample_size is not None:
            context["effective_sample_size"] = effective_sample_size
        super().__init__(
            message=message,
            error_code="ESTIMATION_ERROR",
            category=ErrorCategory.STATISTICAL,
            context=context,
        )


class ExperimentError(TransportLabError):
    """
    Runtime failure inside an experiment.

    Adds ``experiment`` to the context and keeps the category of the
    wrapped lab error when there is one.
    """

    def __init__(
        self,
        message: str,
        experiment: str,
        context: Optional[Dict[str, Any]] = None,
        original_error: Optional[Exception] = None,
    ):
        context = dict(context or {})
        context["experiment"] = experiment
        category = ErrorCategory.NUMERICAL
        if isinstance(original_error, TransportLabError):
            category = original_error.category
            context.update(original_error.context)
        super().__init__(
            message=message,
            error_code="EXPERIMENT_ERROR",
            category=category,
            context=context,
            original_error=original_error,
        )
