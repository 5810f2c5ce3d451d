"""
Sobolev, Lebesgue and Holder norms of banded fields.

Sobolev weights are 1 + |n|^{2 sigma} with 0^0 = 1, so the zero mode carries
weight 2 at sigma = 0 and weight 1 for sigma > 0. Lebesgue norms use the
normalized measure dx / (2 pi), for which Parseval reads
||u||_{L^2}^2 = sum_n |c_n|^2.
"""
import logging
from typing import Optional

import numpy as np

from itl_transport_lab.core.exceptions import ValidationError
from itl_transport_lab.spectral.field import TorusField, frequencies
from itl_transport_lab.spectral.operators import lp_block, max_block_index
from itl_transport_lab.spectral.transforms import band_to_grid, product_grid_size

logger = logging.getLogger(__name__)


# -- Sobolev ----------------------------------------------------------------


def sobolev_weights(n_max: int, sigma: float) -> np.ndarray:
    return 1.0 + np.abs(frequencies(n_max)).astype(float) ** (2.0 * sigma)


def sobolev_norm_sq_array(coeffs: np.ndarray, sigma: float) -> np.ndarray:
    """Squared H^sigma norms along the last axis of a band array."""
    n_max = (coeffs.shape[-1] - 1) // 2
    weights = sobolev_weights(n_max, sigma)
    return np.sum(weights * (coeffs.real**2 + coeffs.imag**2), axis=-1)


def hsigma_inner_array(a: np.ndarray, b: np.ndarray, sigma: float) -> np.ndarray:
    """Real H^sigma inner products along the last axis."""
    n_max = (a.shape[-1] - 1) // 2
    weights = sobolev_weights(n_max, sigma)
    return np.sum(weights * (a.real * b.real + a.imag * b.imag), axis=-1)


def sobolev_norm(u: TorusField, sigma: float) -> float:
    """(sum_n (1 + |n|^{2 sigma}) |c_n|^2)^{1/2} over |n| <= n_max."""
    return float(np.sqrt(sobolev_norm_sq_array(u.coeffs, sigma)))


def hsigma_inner(u: TorusField, v: TorusField, sigma: float) -> float:
    """sum_n (1 + |n|^{2 sigma}) Re(u_n conj(v_n)); band limits must agree."""
    if u.n_max != v.n_max:
        raise ValidationError(
            "hsigma_inner requires equal band limits",
            field="n_max",
            context={"left": u.n_max, "right": v.n_max},
        )
    return float(hsigma_inner_array(u.coeffs, v.coeffs, sigma))


# -- Lebesgue ---------------------------------------------------------------


def _dense_grid(n_max: int) -> int:
    return 32 * max(n_max, 1) + 64


def lp_norm(u: TorusField, p: float) -> float:
    """
    ||u||_{L^p} for the normalized measure on the torus.

    Even integer exponents are integrated exactly (grid > p * n_max); p = inf
    and other exponents use a dense grid.
    """
    if p == 2:
        return float(np.sqrt(np.sum(np.abs(u.coeffs) ** 2)))
    if np.isinf(p):
        return sup_norm(u)
    if p < 1:
        raise ValidationError("lp_norm requires p >= 1", field="p")
    if float(p).is_integer() and int(p) % 2 == 0:
        grid = product_grid_size(int(p) * u.n_max, 0)
    else:
        grid = _dense_grid(u.n_max)
    values = np.abs(u.values(grid))
    return float(np.mean(values**p) ** (1.0 / p))


def lp_norm_pow_array(coeffs: np.ndarray, p: int, real: bool) -> np.ndarray:
    """Batch ||u||_{L^p}^p for even integer p with exact quadrature."""
    n_max = (coeffs.shape[-1] - 1) // 2
    grid = product_grid_size(p * n_max, 0)
    values = np.abs(band_to_grid(coeffs, grid, real))
    return np.mean(values**p, axis=-1)


def sup_norm(u: TorusField, grid_points: Optional[int] = None) -> float:
    grid = grid_points or _dense_grid(u.n_max)
    return float(np.max(np.abs(u.values(grid))))


def w1inf_norm(u: TorusField, grid_points: Optional[int] = None) -> float:
    """||u||_{L^inf} + ||d/dx u||_{L^inf} on a dense grid."""
    derivative = u.with_coeffs(1j * u.frequencies * u.coeffs)
    return sup_norm(u, grid_points) + sup_norm(derivative, grid_points)


# -- Holder -----------------------------------------------------------------


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValidationError(
            "Holder exponent must lie in (0, 1)",
            field="alpha",
            context={"alpha": alpha},
        )


def holder_norm(u: TorusField, alpha: float, grid_points: Optional[int] = None) -> float:
    """
    Grid approximation of ||u||_{C^alpha}.

    sup |u| plus the largest difference quotient |u(x)-u(y)| / d(x,y)^alpha
    over grid pairs, with d the circle distance. The default grid is the dense
    grid of the sup norm; coarser grids underestimate the seminorm.
    """
    _check_alpha(alpha)
    grid = grid_points if grid_points is not None else _dense_grid(u.n_max)
    if grid < 4 * u.n_max or grid < 1:
        raise ValidationError(
            "holder_norm requires grid_points >= 4 * n_max",
            field="grid_points",
            context={"grid_points": grid, "n_max": u.n_max},
        )
    values = u.values(grid)
    sup = float(np.max(np.abs(values)))
    seminorm = 0.0
    for shift in range(1, grid // 2 + 1):
        distance = 2.0 * np.pi * shift / grid
        diff = np.max(np.abs(values - np.roll(values, shift)))
        seminorm = max(seminorm, float(diff) / distance**alpha)
    return sup + seminorm


def besov_holder_proxy(u: TorusField, alpha: float, grid_points: Optional[int] = None) -> float:
    """sup_j 2^{j alpha} max_grid |Delta_j u|, equivalent to the C^alpha norm."""
    _check_alpha(alpha)
    grid = grid_points or max(4 * u.n_max + 1, 1)
    best = 0.0
    for j in range(max_block_index(u.n_max) + 1):
        block = lp_block(u, j)
        best = max(best, 2.0 ** (j * alpha) * float(np.max(np.abs(block.values(grid)))))
    return best
