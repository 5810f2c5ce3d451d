"""
Test models, validation and the exception hierarchy
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from itl_transport_lab.core.exceptions import (
    ConfigurationError,
    ConvergenceError,
    ErrorCategory,
    EstimationError,
    ExperimentError,
    FlowBlowUpError,
    TransportLabError,
)
from itl_transport_lab.core.exceptions import ValidationError as LabValidationError
from itl_transport_lab.core.models.enums import ExperimentKind, IntegratorKind, ModelKind, Reality
from itl_transport_lab.core.models.params import BbmParams, CutoffSpec, GaussianSpec, NlsParams
from itl_transport_lab.core.models.reports import VerdictReport
from itl_transport_lab.settings import LabSettings, get_settings


def test_bbm_params_validation():
    """Test BbmParams defaults and domain checks"""
    p = BbmParams(beta=1.5, N=8)
    assert p.dt == 1e-3
    assert p.integrator == IntegratorKind.RK4
    assert p.model == ModelKind.BBM

    # beta must exceed 1
    with pytest.raises(ValidationError):
        BbmParams(beta=1.0, N=8)

    # Negative truncation
    with pytest.raises(ValidationError):
        BbmParams(beta=1.5, N=-1)

    # Nonfinite step
    with pytest.raises(ValidationError):
        BbmParams(beta=1.5, N=8, dt=math.inf)


def test_params_are_frozen():
    """Test parameter objects are immutable and hashable"""
    p = BbmParams(beta=1.5, N=8)
    with pytest.raises(ValidationError):
        p.N = 4
    assert hash(p) == hash(BbmParams(beta=1.5, N=8))

    # Unknown keys are rejected
    with pytest.raises(ValidationError):
        BbmParams(beta=1.5, N=8, gamma=2.0)


def test_nls_params_validation():
    """Test NlsParams defaults"""
    p = NlsParams(N=4)
    assert p.integrator == IntegratorKind.IMPLICIT_MIDPOINT
    assert p.k == 2
    assert p.model == ModelKind.NLS

    with pytest.raises(ValidationError):
        NlsParams(N=4, k=1)


def test_gaussian_spec():
    """Test GaussianSpec model-specific fields and covariance weights"""
    bbm = GaussianSpec(model=ModelKind.BBM, s=2.0, beta=1.5, n_samp=16)
    assert bbm.reality == Reality.REAL
    assert bbm.energy_exponent == 5.5

    nls = GaussianSpec(model=ModelKind.NLS, k=2, n_samp=8)
    assert nls.reality == Reality.COMPLEX
    assert nls.energy_exponent == 8.0

    weights = nls.covariance_weights(np.array([0, 1, -2]))
    assert np.allclose(weights, [1.0, 0.5, 1.0 / 257.0])

    # Model fields are required
    with pytest.raises(ValidationError):
        GaussianSpec(model=ModelKind.BBM, s=2.0, n_samp=16)
    with pytest.raises(ValidationError):
        GaussianSpec(model=ModelKind.NLS, n_samp=8)


def test_cutoff_spec():
    """Test CutoffSpec constraints"""
    spec = CutoffSpec(model=ModelKind.BBM, r=3.0, R=math.inf, N=8, s=2.0)
    assert spec.R == math.inf
    assert spec.constraint_on_projection

    with pytest.raises(ValidationError):
        CutoffSpec(model=ModelKind.BBM, r=2.0, R=3.0, N=8, s=2.0)
    with pytest.raises(ValidationError):
        CutoffSpec(model=ModelKind.BBM, r=3.0, R=3.0, N=8)
    with pytest.raises(ValidationError):
        CutoffSpec(model=ModelKind.NLS, r=2.0, R=10.0, N=8)
    with pytest.raises(ValidationError):
        CutoffSpec(model=ModelKind.NLS, r=2.0, R=0.0, N=8, k=2)


def test_cutoff_spec_serializes_infinite_radius():
    """Test R = inf survives JSON serialization"""
    spec = CutoffSpec(model=ModelKind.NLS, r=2.0, R=math.inf, N=4, k=2)
    restored = CutoffSpec.model_validate_json(spec.model_dump_json())
    assert restored == spec


def test_experiment_kinds():
    """Test experiment names as used in configuration files"""
    assert ExperimentKind("verify-quasi") == ExperimentKind.VERIFY_QUASI
    assert {kind.value for kind in ExperimentKind} >= {"sample", "evolve", "tails", "recurrence"}


def test_verdict_report_pass_is_derived():
    """Test passed follows |z| <= effective threshold"""
    passing = VerdictReport(
        test="quasi_invariance_bbm",
        lhs_estimate=0.41,
        rhs_estimate=0.42,
        paired_diff_mean=0.01,
        paired_diff_se=0.005,
        z_score=2.0,
    )
    assert passing.passed
    assert passing.effective_threshold == 3.0

    failing = passing.model_copy(update={"z_score": 4.0})
    assert not VerdictReport.model_validate(failing.model_dump()).passed

    # Drift budget widens the threshold
    widened = VerdictReport(
        test="invariance_gamma0",
        lhs_estimate=0.0,
        rhs_estimate=0.0,
        paired_diff_mean=0.0,
        paired_diff_se=1.0,
        z_score=4.0,
        drift_budget=2.0,
        effective_threshold=5.0,
    )
    assert widened.passed

    # A claimed pass is recomputed
    assert not VerdictReport(
        test="t", lhs_estimate=0.0, rhs_estimate=0.0, paired_diff_mean=1.0, paired_diff_se=0.1, z_score=10.0, passed=True
    ).passed


def test_verdict_record():
    """Test the compact verdict record"""
    report = VerdictReport(
        test="quasi_invariance_nls",
        lhs_estimate=1.0,
        rhs_estimate=1.0,
        paired_diff_mean=0.0,
        paired_diff_se=0.0,
        z_score=0.0,
        seed=7,
        count=100,
        params={"N": 8},
    )
    verdict = report.to_verdict()
    assert verdict["pass"] is True
    assert verdict["z"] == 0.0
    assert verdict["seed"] == 7
    assert verdict["params"] == {"N": 8}

    with pytest.raises(ValidationError):
        VerdictReport(
            test="t", lhs_estimate=0.0, rhs_estimate=0.0, paired_diff_mean=0.0, paired_diff_se=-1.0, z_score=0.0
        )


def test_error_serialization():
    """Test exception dictionaries for output and structured logging"""
    error = LabValidationError("p must be >= 1", field="p", context={"p": 0.5})
    assert isinstance(error, ValueError)
    assert error.field == "p"
    assert error.to_dict() == {
        "error_code": "VALIDATION_ERROR",
        "message": "p must be >= 1",
        "category": "validation",
        "context": {"p": 0.5, "field": "p"},
    }

    log = error.to_log_dict()
    assert log["error_message"] == "p must be >= 1"
    assert "message" not in log
    assert "original_error" not in log


def test_error_categories():
    """Test each error carries its category and context"""
    assert ConfigurationError("bad", field="beta").category == ErrorCategory.CONFIGURATION
    blowup = FlowBlowUpError("diverged", time=0.25, max_modulus=1e13)
    assert blowup.category == ErrorCategory.NUMERICAL
    assert blowup.context == {"time": 0.25, "max_modulus": 1e13}
    assert ConvergenceError("stuck", iterations=100, residual=1e-3).context["iterations"] == 100
    assert EstimationError("degenerate", effective_sample_size=2.5).category == ErrorCategory.STATISTICAL


def test_experiment_error_wraps_cause():
    """Test ExperimentError keeps the wrapped category and context"""
    cause = EstimationError("degenerate", effective_sample_size=0.0)
    error = ExperimentError("verify-quasi failed", experiment="verify-quasi", original_error=cause)
    assert isinstance(error, TransportLabError)
    assert error.category == ErrorCategory.STATISTICAL
    assert error.context == {"experiment": "verify-quasi", "effective_sample_size": 0.0}
    assert error.to_log_dict()["error_type"] == "EstimationError"

    generic = ExperimentError("evolve failed", experiment="evolve", original_error=RuntimeError("boom"))
    assert generic.category == ErrorCategory.NUMERICAL
    assert generic.to_log_dict()["original_error"] == "boom"


def test_settings_from_environment(monkeypatch):
    """Test ITL_LAB_* variables configure the runtime settings"""
    monkeypatch.setenv("ITL_LAB_THREADS", "4")
    monkeypatch.setenv("ITL_LAB_MIDPOINT_TOLERANCE", "1e-10")
    settings = LabSettings()
    assert settings.threads == 4
    assert settings.midpoint_tolerance == 1e-10
    assert settings.midpoint_max_iter == 100


def test_settings_are_cached(monkeypatch):
    """Test get_settings returns one instance until the cache is cleared"""
    first = get_settings()
    assert get_settings() is first
    monkeypatch.setenv("ITL_LAB_LOG_LEVEL", "DEBUG")
    assert get_settings().log_level == "INFO"
    get_settings.cache_clear()
    assert get_settings().log_level == "DEBUG"
