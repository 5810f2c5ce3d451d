"""
Tail and moment utilities for the weighted BBM measures.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np

from itl_transport_lab.core.exceptions import ValidationError
from itl_transport_lab.core.models.enums import ModelKind
from itl_transport_lab.measures.ensemble import WeightedEnsemble
from itl_transport_lab.spectral.field import frequencies
from itl_transport_lab.spectral.norms import sobolev_norm_sq_array

logger = logging.getLogger(__name__)


@dataclass
class TailCurve:
    """
    Self-normalized estimates of rho(||P_N u||_{H^varsigma} >= t^kappa).

    ``a`` and ``b`` are the predicted exponents of the sub-exponential bound
    exp(-c t^a) with prefactor growth governed by b.
    """
    thresholds: np.ndarray
    survival: np.ndarray
    standard_error: np.ndarray
    a: float
    b: float
    varsigma: float
    kappa: float
    N: int

    def fit_log_survival_slope(self) -> float:
        """Least-squares slope of log survival against t^a; nan with < 2 usable points."""
        usable = self.survival > 0.0
        if np.count_nonzero(usable) < 2:
            return float("nan")
        x = self.thresholds[usable] ** self.a
        y = np.log(self.survival[usable])
        return float(np.polyfit(x, y, 1)[0])

    def rows(self) -> Sequence[Dict[str, float]]:
        return [
            {"t": float(t), "survival": float(p), "se": float(e)}
            for t, p, e in zip(self.thresholds, self.survival, self.standard_error)
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "varsigma": self.varsigma,
            "kappa": self.kappa,
            "N": self.N,
            "a": self.a,
            "b": self.b,
            "rows": list(self.rows()),
        }


def tail_exponents(r: float, s: float, beta: float, varsigma: float, kappa: float) -> Dict[str, float]:
    """a = 2 r kappa (2s - beta)/(2 varsigma - beta), b = 4 r (s - beta)/(2 varsigma - beta)."""
    denominator = 2.0 * varsigma - beta
    if denominator == 0.0:
        raise ValidationError(
            "tail exponents degenerate at 2*varsigma = beta",
            field="varsigma",
            context={"varsigma": varsigma, "beta": beta},
        )
    return {
        "a": 2.0 * r * kappa * (2.0 * s - beta) / denominator,
        "b": 4.0 * r * (s - beta) / denominator,
    }


def tail_survival(
    ens: WeightedEnsemble,
    varsigma: float,
    kappa: float,
    N: int,
    thresholds: Sequence[float],
) -> TailCurve:
    """
    Survival curve of ||P_N u||_{H^varsigma} over an ensemble of rho_{s}.

    Standard errors are the delta-method errors of the self-normalized
    estimator, sqrt(sum w_i^2 (1_i - p)^2) with normalized weights.

    For 2 varsigma <= beta the rigid cut-off ||u||_{H^{beta/2}} <= R bounds the
    event, so thresholds with t^kappa > R report exactly 0 with zero error.
    The zero mode weighs 2 in H^0 and 1 in H^{beta/2}, so at varsigma = 0 the
    norms alone do not imply this.
    """
    if ens.gaussian.model != ModelKind.BBM or ens.cutoff is None:
        raise ValidationError("tail curves need a weighted bbm ensemble", field="cutoff")
    if kappa <= 0.0:
        raise ValidationError("kappa must be positive", field="kappa")
    grid = np.asarray(thresholds, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0.0):
        raise ValidationError("thresholds must be strictly increasing", field="thresholds")

    beta = float(ens.gaussian.beta)  # type: ignore[arg-type]
    exponents = tail_exponents(ens.cutoff.r, ens.gaussian.s, beta, varsigma, kappa)

    weights = ens.normalized_weights()
    low = np.where(np.abs(frequencies(ens.n_max)) <= N, ens.coeffs, 0.0)
    norms = np.sqrt(sobolev_norm_sq_array(low, varsigma))

    bounded = 2.0 * varsigma <= beta
    survival = np.empty_like(grid)
    errors = np.empty_like(grid)
    for j, t in enumerate(grid):
        if bounded and t**kappa > ens.cutoff.R:
            survival[j] = 0.0
            errors[j] = 0.0
            continue
        event = (norms >= t**kappa).astype(float)
        p = float(np.sum(weights * event))
        survival[j] = p
        errors[j] = float(np.sqrt(np.sum(weights**2 * (event - p) ** 2)))

    logger.debug("tail curve over %d thresholds, a=%.4g b=%.4g", grid.size, exponents["a"], exponents["b"])
    return TailCurve(grid, survival, errors, exponents["a"], exponents["b"], varsigma, kappa, N)


def sup_moment(a: float, r: float, p: float) -> float:
    """
    sup_{x >= 0} x^a exp(-x^{2r}/p), attained at x^{2r} = a p/(2r).

    Equals (a p/(2r))^{a/(2r)} exp(-a/(2r)), and 1 for a = 0.
    """
    if a < 0.0 or r <= 0.0 or p < 1.0:
        raise ValidationError(
            "sup_moment needs a >= 0, r > 0 and p >= 1",
            field="a",
            context={"a": a, "r": r, "p": p},
        )
    if a == 0.0:
        return 1.0
    ratio = a / (2.0 * r)
    return (ratio * p) ** ratio * math.exp(-ratio)
