"""
Experiment configuration.

A configuration is a flat key set, given either as a JSON object or as
``key = value`` lines (``#`` starts a comment, list values are comma
separated). Every key except ``experiment`` has a documented default;
``n_samp`` defaults to 4*N and ``integrator`` to the model's default.
"""
import hashlib
import json
import logging
from typing import Any, Dict, List, Optional

from pydantic import Field, ValidationError as PydanticValidationError, field_validator, model_validator

from itl_transport_lab.core.exceptions import ConfigurationError
from itl_transport_lab.core.models import constants
from itl_transport_lab.core.models.enums import ExperimentKind, IntegratorKind, ModelKind
from itl_transport_lab.core.models.params import (
    BbmParams,
    CutoffSpec,
    GaussianSpec,
    LabBaseModel,
    NlsParams,
)
from itl_transport_lab.dynamics.nls import ModifiedEnergy, quadratic_correction, zero_correction
from itl_transport_lab.verification.observables import TestFunction, test_function_library

logger = logging.getLogger(__name__)

LIST_KEYS = ("N_list", "thresholds", "p_values")
RUNTIME_KEYS = ("output_dir", "threads")


class ExperimentConfig(LabBaseModel):
    """
    Complete, validated parameters of one experiment run.

    Example::

        config = parse_config("experiment = verify-quasi\\nmodel = bbm\\nN = 8")
        config.n_samp   # 32
    """
    experiment: ExperimentKind
    model: ModelKind = ModelKind.BBM

    # Flow
    beta: float = Field(default=1.5, gt=1.0, description="BBM dispersion exponent")
    N: int = Field(default=8, ge=0, description="Galerkin truncation")
    dt: float = Field(default=1e-3, gt=0.0)
    t: float = Field(default=0.5, description="Transport time")
    integrator: Optional[IntegratorKind] = None
    nonlinearity_enabled: bool = True
    store_every: int = Field(default=1, ge=1)

    # Measures
    s: float = Field(default=2.0, ge=0.0)
    k: int = Field(default=2, ge=2)
    r: float = Field(default=3.0, gt=0.0)
    R: float = Field(default=3.0, gt=0.0)
    n_samp: Optional[int] = Field(default=None, ge=0)
    complex_variance: float = Field(default=1.0, gt=0.0)
    constraint_on_projection: bool = True
    correction_lambda: float = 0.0
    correction_sigma: float = Field(default=1.0, ge=0.0)

    # Monte Carlo
    count: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)
    test_function: str = "cos_first_mode"
    z_threshold: float = Field(default=constants.DEFAULT_Z_THRESHOLD, gt=0.0)
    t_bar: float = Field(default=constants.DEFAULT_NLS_T_BAR, gt=0.0)
    p_values: List[float] = Field(default_factory=lambda: [2.0, 4.0])

    # Density
    N_list: List[int] = Field(default_factory=lambda: [8, 16, 32, 64])
    s_shift: float = 0.25
    trajectories: int = Field(default=1, ge=1)

    # Diagnostics, tails, recurrence
    sigma: float = Field(default=1.0, ge=0.0)
    alpha: float = Field(default=0.1, gt=0.0, lt=1.0)
    calibration_probes: int = Field(default=0, ge=0)
    varsigma: float = Field(default=1.0, ge=0.0)
    kappa: float = Field(default=1.0, gt=0.0)
    thresholds: List[float] = Field(default_factory=lambda: [0.5, 1.0, 1.5, 2.0])
    horizon: float = Field(default=10.0, gt=0.0)
    probe_stride: float = Field(default=0.1, gt=0.0)
    exclusion: float = Field(default=1.0, ge=0.0)

    # Runtime
    output_dir: Optional[str] = None
    threads: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _fill_defaults(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        if data.get("n_samp") is None:
            data["n_samp"] = constants.SAMPLE_BAND_FACTOR * int(data.get("N", 8))
        if data.get("integrator") is None:
            model = ModelKind(data.get("model", ModelKind.BBM))
            data["integrator"] = (
                IntegratorKind.RK4 if model == ModelKind.BBM else IntegratorKind.IMPLICIT_MIDPOINT
            )
        return data

    @field_validator("test_function")
    @classmethod
    def _known_test_function(cls, v: str) -> str:
        if v not in test_function_library():
            raise ValueError(f"unknown test function {v!r}; known: {sorted(test_function_library())}")
        return v

    @field_validator("p_values")
    @classmethod
    def _moment_orders(cls, v: List[float]) -> List[float]:
        if any(p < 1.0 for p in v):
            raise ValueError("moment orders must be >= 1")
        return v

    @model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        if self.n_samp is not None and self.n_samp < self.N:
            raise ValueError("n_samp must be at least N")
        if self.model == ModelKind.BBM and self.r <= 2.0:
            raise ValueError("bbm cut-offs need r > 2")
        return self

    # -- Presets ------------------------------------------------------------

    @classmethod
    def acceptance_bbm(cls, experiment: ExperimentKind = ExperimentKind.VERIFY_QUASI) -> "ExperimentConfig":
        """BBM acceptance parameters: beta=1.5, s=2, r=3, R=3, N=8, t=0.5, 10^4 samples."""
        return cls(
            experiment=experiment,
            model=ModelKind.BBM,
            beta=1.5,
            s=2.0,
            r=3.0,
            R=3.0,
            N=8,
            t=0.5,
            count=10_000,
            test_function="cos_first_mode",
        )

    @classmethod
    def acceptance_nls(cls, experiment: ExperimentKind = ExperimentKind.VERIFY_QUASI) -> "ExperimentConfig":
        """NLS acceptance parameters: k=2, zero correction, N=8, t=0.25, 10^4 samples."""
        return cls(
            experiment=experiment,
            model=ModelKind.NLS,
            k=2,
            r=2.0,
            R=10.0,
            N=8,
            t=0.25,
            count=10_000,
            test_function="cos_first_mode",
        )

    # -- Builders -----------------------------------------------------------

    def gaussian_spec(self, s: Optional[float] = None, n_samp: Optional[int] = None) -> GaussianSpec:
        band = self.n_samp if n_samp is None else n_samp
        if self.model == ModelKind.BBM:
            return GaussianSpec(
                model=ModelKind.BBM, s=self.s if s is None else s, beta=self.beta, n_samp=band
            )
        return GaussianSpec(
            model=ModelKind.NLS, k=self.k, n_samp=band, complex_variance=self.complex_variance
        )

    def cutoff_spec(self) -> CutoffSpec:
        if self.model == ModelKind.BBM:
            return CutoffSpec(model=ModelKind.BBM, r=self.r, R=self.R, N=self.N, s=self.s)
        return CutoffSpec(
            model=ModelKind.NLS,
            r=self.r,
            R=self.R,
            N=self.N,
            k=self.k,
            constraint_on_projection=self.constraint_on_projection,
        )

    def bbm_params(self) -> BbmParams:
        return BbmParams(
            beta=self.beta,
            N=self.N,
            dt=self.dt,
            integrator=self.integrator or IntegratorKind.RK4,
            nonlinearity_enabled=self.nonlinearity_enabled,
        )

    def nls_params(self) -> NlsParams:
        return NlsParams(
            N=self.N,
            dt=self.dt,
            integrator=self.integrator or IntegratorKind.IMPLICIT_MIDPOINT,
            k=self.k,
            nonlinearity_enabled=self.nonlinearity_enabled,
        )

    def correction(self) -> ModifiedEnergy:
        if self.correction_lambda == 0.0:
            return zero_correction()
        return quadratic_correction(self.correction_lambda, self.correction_sigma)

    def psi(self) -> TestFunction:
        return test_function_library()[self.test_function]


# -- Parsing and serialization ----------------------------------------------


def _parse_key_values(text: str) -> Dict[str, Any]:
    data: Dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(
                f"line {number} is not of the form key = value", context={"line": raw}
            )
        key, value = (part.strip() for part in line.split("=", 1))
        if key in LIST_KEYS:
            data[key] = [item.strip() for item in value.split(",") if item.strip()]
        else:
            data[key] = value
    return data


def _first_error_field(error: PydanticValidationError) -> Optional[str]:
    for detail in error.errors():
        if detail.get("loc"):
            return ".".join(str(part) for part in detail["loc"])
    return None


def config_from_mapping(data: Dict[str, Any]) -> ExperimentConfig:
    """Validate a mapping, mapping pydantic errors to ``ConfigurationError``."""
    try:
        return ExperimentConfig.model_validate(data)
    except PydanticValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(p) for p in d['loc']) or 'config'}: {d['msg']}" for d in e.errors()
        )
        raise ConfigurationError(
            f"invalid experiment configuration: {details}",
            field=_first_error_field(e),
            original_error=e,
        ) from e


def parse_config(text: str) -> ExperimentConfig:
    """
    Parse a JSON object or ``key = value`` text into a validated config.

    Raises:
        ConfigurationError: malformed text, missing ``experiment`` or an
            out-of-domain value; ``context["field"]`` names the key
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"invalid JSON configuration: {e}", original_error=e) from e
    else:
        data = _parse_key_values(stripped)
    config = config_from_mapping(data)
    logger.debug("parsed %s configuration for %s", config.experiment.value, config.model.value)
    return config


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical JSON; ``parse_config(serialize_config(c)) == c``."""
    return json.dumps(config.model_dump(mode="json"), sort_keys=True, indent=2)


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON of the result-determining keys."""
    payload = config.model_dump(mode="json", exclude=set(RUNTIME_KEYS))
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
