"""
Weighted Monte Carlo ensembles of the cut-off measures.
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Union

import numpy as np
from scipy.special import logsumexp

from itl_transport_lab.core.exceptions import EstimationError, ValidationError
from itl_transport_lab.core.models.params import CutoffSpec, GaussianSpec
from itl_transport_lab.dynamics.nls import ModifiedEnergy
from itl_transport_lab.measures.gaussian import sample_gamma_array
from itl_transport_lab.measures.weights import effective_sample_size, log_weights_for
from itl_transport_lab.spectral.field import TorusField

logger = logging.getLogger(__name__)


@dataclass
class WeightedEnsemble:
    """
    Gaussian samples with per-sample log-weights of a cut-off measure.

    Row i of ``coeffs`` is sample ``start + i`` of stream ``seed``;
    ``log_weights`` is -inf where the rigid cut-off rejects the sample.
    Unnormalized expectations are (1/M) sum psi(u_i) exp(log_w_i).
    """
    coeffs: np.ndarray
    log_weights: np.ndarray
    seed: int
    gaussian: GaussianSpec
    cutoff: Optional[CutoffSpec] = None
    start: int = 0

    def __post_init__(self) -> None:
        self.coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        self.log_weights = np.asarray(self.log_weights, dtype=float)
        if self.coeffs.shape[0] != self.log_weights.shape[0]:
            raise ValidationError(
                "samples and log-weights differ in length",
                field="log_weights",
                context={"samples": self.coeffs.shape[0], "weights": self.log_weights.shape[0]},
            )

    def __len__(self) -> int:
        return int(self.log_weights.shape[0])

    def __iter__(self) -> Iterator[TorusField]:
        return iter(self.samples)

    @property
    def samples(self) -> List[TorusField]:
        return [TorusField(row, self.gaussian.reality) for row in self.coeffs]

    @property
    def n_max(self) -> int:
        return (self.coeffs.shape[-1] - 1) // 2

    @property
    def rejected_fraction(self) -> float:
        if len(self) == 0:
            return 0.0
        return float(np.mean(~np.isfinite(self.log_weights)))

    def weights(self) -> np.ndarray:
        """exp(log_w), zero for rejected samples."""
        return np.exp(self.log_weights)

    def normalized_weights(self) -> np.ndarray:
        """Self-normalized weights summing to one."""
        if not np.any(np.isfinite(self.log_weights)):
            raise EstimationError("every sample is rejected by the cut-off", effective_sample_size=0.0)
        return np.exp(self.log_weights - logsumexp(self.log_weights))

    def effective_sample_size(self) -> float:
        return effective_sample_size(self.log_weights)

    def unnormalized_mean(self, values: np.ndarray) -> float:
        """(1/M) sum values_i exp(log_w_i)."""
        return float(np.mean(np.asarray(values, dtype=float) * self.weights()))

    # -- Persistence ----------------------------------------------------------

    def save(self, path: Union[str, Path]) -> Path:
        return save_ensemble(self, path)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "WeightedEnsemble":
        return load_ensemble(path)


def ensemble_sample(
    gspec: GaussianSpec,
    cspec: Optional[CutoffSpec],
    count: int,
    seed: int,
    correction: Optional[ModifiedEnergy] = None,
    start: int = 0,
) -> WeightedEnsemble:
    """
    Draw ``count`` Gaussian samples and weight them by the cut-off.

    With ``cspec=None`` all log-weights are 0 (the Gaussian measure itself).
    """
    if count < 1:
        raise ValidationError("ensembles need count >= 1", field="count", context={"count": count})
    if cspec is not None and cspec.model != gspec.model:
        raise ValidationError(
            "cut-off and Gaussian measure belong to different models",
            field="model",
            context={"gaussian": gspec.model.value, "cutoff": cspec.model.value},
        )
    coeffs = sample_gamma_array(gspec, seed, count, start)
    if cspec is None:
        log_w = np.zeros(count)
    else:
        log_w = log_weights_for(coeffs, cspec, gspec.beta, correction)
    ensemble = WeightedEnsemble(coeffs, log_w, seed, gspec, cspec, start)
    logger.debug(
        "sampled %d %s fields (seed=%d, rejected=%.3f)",
        count,
        gspec.model.value,
        seed,
        ensemble.rejected_fraction,
    )
    return ensemble


def _encode_log_weight(value: float) -> Optional[float]:
    return None if not np.isfinite(value) else float(value)


def save_ensemble(ensemble: WeightedEnsemble, path: Union[str, Path]) -> Path:
    """
    Write one JSON object per sample: index, seed, log_weight (null for -inf),
    field, and the measure specifications.
    """
    target = Path(path)
    gaussian = ensemble.gaussian.model_dump(mode="json")
    cutoff = ensemble.cutoff.model_dump(mode="json") if ensemble.cutoff is not None else None
    with target.open("w") as handle:
        for i, row in enumerate(ensemble.coeffs):
            record: Dict[str, Any] = {
                "index": ensemble.start + i,
                "seed": ensemble.seed,
                "log_weight": _encode_log_weight(ensemble.log_weights[i]),
                "field": TorusField(row, ensemble.gaussian.reality).to_dict(),
                "gaussian": gaussian,
                "cutoff": cutoff,
            }
            handle.write(json.dumps(record) + "\n")
    return target


def load_ensemble(path: Union[str, Path]) -> WeightedEnsemble:
    """Inverse of ``save_ensemble``."""
    lines = [line for line in Path(path).read_text().splitlines() if line.strip()]
    if not lines:
        raise ValidationError("ensemble file is empty", field="path", context={"path": str(path)})
    records = [json.loads(line) for line in lines]
    first = records[0]
    gaussian = GaussianSpec.model_validate(first["gaussian"])
    cutoff = CutoffSpec.model_validate(first["cutoff"]) if first.get("cutoff") is not None else None
    coeffs = np.stack([TorusField.from_dict(r["field"]).coeffs for r in records])
    log_w = np.array(
        [-np.inf if r["log_weight"] is None else float(r["log_weight"]) for r in records]
    )
    return WeightedEnsemble(coeffs, log_w, int(first["seed"]), gaussian, cutoff, int(first["index"]))
