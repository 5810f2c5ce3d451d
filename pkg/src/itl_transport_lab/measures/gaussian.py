"""
Samplers for the Gaussian base measures.

Sample ``index`` of stream ``seed`` is drawn from its own counter-based
Philox generator keyed by SeedSequence(seed, spawn_key=(index,)), so any
sample can be regenerated alone and ensembles do not depend on evaluation
order or parallelism.
"""
import logging

import numpy as np

from itl_transport_lab import metrics
from itl_transport_lab.core.models.enums import ModelKind
from itl_transport_lab.core.models.params import GaussianSpec
from itl_transport_lab.spectral.field import TorusField, frequencies, hermitian_from_nonnegative

logger = logging.getLogger(__name__)


def rng_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for sample ``index`` of stream ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _draw_coefficients(spec: GaussianSpec, rng: np.random.Generator) -> np.ndarray:
    n_samp = spec.n_samp
    if spec.model == ModelKind.BBM:
        scale = np.sqrt(spec.covariance_weights(np.arange(n_samp + 1)))
        positive = np.empty(n_samp + 1, dtype=complex)
        positive[0] = rng.standard_normal()
        h = rng.standard_normal(n_samp)
        l = rng.standard_normal(n_samp)  # noqa: E741
        positive[1:] = (h + 1j * l) / np.sqrt(2.0)
        return hermitian_from_nonnegative(positive * scale)
    scale = np.sqrt(spec.covariance_weights(frequencies(n_samp)) * spec.complex_variance / 2.0)
    re = rng.standard_normal(2 * n_samp + 1)
    im = rng.standard_normal(2 * n_samp + 1)
    return (re + 1j * im) * scale


def sample_gamma(spec: GaussianSpec, seed: int, index: int) -> TorusField:
    """
    One draw of the Gaussian measure, deterministic in (seed, index).

    bbm: real field, coeffs(0) ~ N(0, 1) and coeffs(n) = (h_n + i l_n)/sqrt(2)
    for n > 0, scaled by (1 + |n|^{2s+beta})^{-1/2}.
    nls: complex field, independent complex normals with
    E|g_n|^2 = complex_variance, scaled by (1 + |n|^{4k})^{-1/2}.
    """
    metrics.SAMPLES_DRAWN.labels(spec.model.value).inc()
    return TorusField(_draw_coefficients(spec, rng_stream(seed, index)), spec.reality)


def sample_gamma_array(spec: GaussianSpec, seed: int, count: int, start: int = 0) -> np.ndarray:
    """Stacked coefficients of samples start..start+count-1, shape (count, 2*n_samp+1)."""
    rows = [_draw_coefficients(spec, rng_stream(seed, start + i)) for i in range(count)]
    metrics.SAMPLES_DRAWN.labels(spec.model.value).inc(count)
    if not rows:
        return np.zeros((0, 2 * spec.n_samp + 1), dtype=complex)
    return np.stack(rows)
