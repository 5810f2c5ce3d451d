"""
Flow and measure parameter models.

All parameter objects are frozen pydantic models so they can be hashed into
run metadata and shared between worker threads without copying.
"""
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from itl_transport_lab.core.models.enums import IntegratorKind, ModelKind, Reality


class LabBaseModel(BaseModel):
    """Base model for all lab parameter objects with shared configuration."""
    model_config = ConfigDict(
        frozen=True, extra="forbid", use_enum_values=False, ser_json_inf_nan="constants"
    )


class BbmParams(LabBaseModel):
    """
    Parameters of the truncated fractional BBM flow.

    Example::

        p = BbmParams(beta=1.5, N=32, dt=1e-3)
    """
    beta: float = Field(..., gt=1.0, description="Dispersion exponent (beta > 1)")
    N: int = Field(..., ge=0, description="Galerkin truncation of the nonlinearity")
    dt: float = Field(default=1e-3, gt=0.0, description="Time step")
    integrator: IntegratorKind = Field(default=IntegratorKind.RK4)
    nonlinearity_enabled: bool = Field(default=True)

    @field_validator("dt")
    @classmethod
    def _finite_dt(cls, v: float) -> float:
        if not np.isfinite(v):
            raise ValueError("dt must be finite")
        return v

    @property
    def model(self) -> ModelKind:
        return ModelKind.BBM


class NlsParams(LabBaseModel):
    """Parameters of the truncated quintic defocusing NLS flow."""
    N: int = Field(..., ge=0, description="Galerkin truncation of the nonlinearity")
    dt: float = Field(default=1e-3, gt=0.0, description="Time step")
    integrator: IntegratorKind = Field(default=IntegratorKind.IMPLICIT_MIDPOINT)
    k: int = Field(default=2, ge=2, description="Order of the modified energy E_2k")
    nonlinearity_enabled: bool = Field(default=True)

    @field_validator("dt")
    @classmethod
    def _finite_dt(cls, v: float) -> float:
        if not np.isfinite(v):
            raise ValueError("dt must be finite")
        return v

    @property
    def model(self) -> ModelKind:
        return ModelKind.NLS


class GaussianSpec(LabBaseModel):
    """
    Parameters of the Gaussian base measure gamma_s (bbm) or gamma_2k (nls).

    Attributes:
        model: bbm samples real fields, nls samples complex fields
        s: regularity index for bbm
        k: energy order for nls
        beta: dispersion exponent, bbm only
        n_samp: band limit of the sampled modes
        complex_variance: E|g_n|^2 of the complex Gaussians used for nls
    """
    model: ModelKind
    s: float = Field(default=0.0, ge=0.0)
    k: Optional[int] = Field(default=None, ge=2)
    beta: Optional[float] = Field(default=None, gt=1.0)
    n_samp: int = Field(..., ge=0)
    complex_variance: float = Field(default=1.0, gt=0.0)

    @model_validator(mode="after")
    def _check_model_fields(self) -> "GaussianSpec":
        if self.model == ModelKind.BBM and self.beta is None:
            raise ValueError("beta is required for bbm Gaussian measures")
        if self.model == ModelKind.NLS and self.k is None:
            raise ValueError("k is required for nls Gaussian measures")
        return self

    @property
    def reality(self) -> Reality:
        return Reality.REAL if self.model == ModelKind.BBM else Reality.COMPLEX

    @property
    def energy_exponent(self) -> float:
        """Exponent e of the covariance weight (1 + |n|^e)^{-1}."""
        if self.model == ModelKind.BBM:
            return 2.0 * self.s + float(self.beta)  # type: ignore[arg-type]
        return 4.0 * float(self.k)  # type: ignore[arg-type]

    def covariance_weights(self, frequencies: np.ndarray) -> np.ndarray:
        """Per-mode variance weights (1 + |n|^e)^{-1}, strictly positive."""
        return 1.0 / (1.0 + np.abs(frequencies).astype(float) ** self.energy_exponent)


class CutoffSpec(LabBaseModel):
    """
    Rigid and exponential cut-off of rho_{s,N} (bbm) or mu_{2k,N} (nls).

    ``R`` may be ``float('inf')`` to disable the rigid cut-off.
    ``constraint_on_projection`` selects where the nls mass-plus-energy
    constraint is evaluated: on P_N u (exactly conserved) or on the full field.
    """
    model: ModelKind = ModelKind.BBM
    r: float = Field(..., gt=0.0)
    R: float = Field(..., gt=0.0)
    N: int = Field(..., ge=0)
    s: Optional[float] = Field(default=None, ge=0.0)
    k: Optional[int] = Field(default=None, ge=2)
    constraint_on_projection: bool = True

    @model_validator(mode="after")
    def _check_model_fields(self) -> "CutoffSpec":
        if self.model == ModelKind.BBM:
            if self.r <= 2.0:
                raise ValueError("bbm cut-off requires r > 2")
            if self.s is None:
                raise ValueError("s is required for bbm cut-offs")
        if self.model == ModelKind.NLS and self.k is None:
            raise ValueError("k is required for nls cut-offs")
        return self
