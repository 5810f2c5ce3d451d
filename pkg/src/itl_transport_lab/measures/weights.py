"""
Importance weights of the cut-off measures relative to their Gaussian base.

The exponential factor is never used for rejection; only the rigid cut-off
produces -inf log-weights.
"""
import logging
from typing import Optional

import numpy as np

from itl_transport_lab.core.exceptions import ValidationError
from itl_transport_lab.core.models.enums import ModelKind, Reality
from itl_transport_lab.core.models.params import CutoffSpec
from itl_transport_lab.dynamics.nls import ModifiedEnergy, energy_e1_array, zero_correction
from itl_transport_lab.spectral.field import TorusField, frequencies
from itl_transport_lab.spectral.norms import sobolev_norm_sq_array

logger = logging.getLogger(__name__)


def _project_rows(coeffs: np.ndarray, N: int) -> np.ndarray:
    n_max = (coeffs.shape[-1] - 1) // 2
    return np.where(np.abs(frequencies(n_max)) <= N, coeffs, 0.0)


def log_weight_bbm_array(coeffs: np.ndarray, c: CutoffSpec, beta: float) -> np.ndarray:
    """Row-wise BBM log-weights of a stacked (M, 2n+1) ensemble."""
    if c.s is None:
        raise ValidationError("bbm weights need the cut-off regularity s", field="s")
    coeffs = np.atleast_2d(coeffs)
    rigid = np.sqrt(sobolev_norm_sq_array(coeffs, beta / 2.0))
    low_norm_sq = sobolev_norm_sq_array(_project_rows(coeffs, c.N), c.s)
    log_w = -(low_norm_sq**c.r)
    return np.where(rigid > c.R, -np.inf, log_w)


def log_weight_bbm(u: TorusField, c: CutoffSpec, beta: float) -> float:
    """
    -inf if ||u||_{H^{beta/2}} > R, else -||P_N u||_{H^s}^{2r}.

    The rigid cut-off uses the full sampled field: its H^{beta/2} norm is
    conserved by the truncated flow, tail modes included.
    """
    return float(log_weight_bbm_array(u.coeffs, c, beta)[0])


def log_weight_nls_array(
    coeffs: np.ndarray,
    c: CutoffSpec,
    correction: Optional[ModifiedEnergy] = None,
) -> np.ndarray:
    """Row-wise NLS log-weights of a stacked (M, 2n+1) ensemble."""
    if c.k is None:
        raise ValidationError("nls weights need the energy order k", field="k")
    correction = correction or zero_correction()
    coeffs = np.atleast_2d(coeffs)
    low = _project_rows(coeffs, c.N)
    constrained = low if c.constraint_on_projection else coeffs
    level = np.sqrt(np.sum(np.abs(constrained) ** 2, axis=-1)) + energy_e1_array(constrained)

    corr_values = np.array(
        [correction.evaluate(TorusField(row, Reality.COMPLEX)) for row in low], dtype=float
    )
    log_w = -corr_values - sobolev_norm_sq_array(low, 2.0 * c.k - 1.0) ** c.r
    return np.where(level > c.R, -np.inf, log_w)


def log_weight_nls(u: TorusField, c: CutoffSpec, correction: Optional[ModifiedEnergy] = None) -> float:
    """
    -inf if ||v||_{L^2} + E_1(v) > R, else -corr(P_N u) - ||P_N u||_{H^{2k-1}}^{2r}.

    v is P_N u when ``c.constraint_on_projection`` (the default) and the full
    field otherwise.
    """
    return float(log_weight_nls_array(u.coeffs, c, correction)[0])


def log_weights_for(
    coeffs: np.ndarray,
    c: CutoffSpec,
    beta: Optional[float] = None,
    correction: Optional[ModifiedEnergy] = None,
) -> np.ndarray:
    """Dispatch on ``c.model``."""
    if c.model == ModelKind.BBM:
        if beta is None:
            raise ValidationError("bbm weights need beta", field="beta")
        return log_weight_bbm_array(coeffs, c, beta)
    return log_weight_nls_array(coeffs, c, correction)


def effective_sample_size(log_weights: np.ndarray) -> float:
    """(sum w)^2 / sum w^2 over the finite weights; 0 when none is finite."""
    log_weights = np.asarray(log_weights, dtype=float)
    finite = log_weights[np.isfinite(log_weights)]
    if finite.size == 0:
        return 0.0
    w = np.exp(finite - finite.max())
    return float(w.sum() ** 2 / np.sum(w * w))
