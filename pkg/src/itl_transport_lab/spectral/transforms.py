"""
Padded transforms between band arrays and physical grids, and alias-free
nonlinear products.

Band arrays hold coefficients n = -band..band on the last axis, so every
helper also works on stacked ensembles of shape (..., 2*band+1).

A product of inputs with total band B sampled on M points aliases mode k onto
k +- M; retaining |n| <= out_band exactly needs M > B + out_band.
"""
import logging

import numpy as np
from scipy import fft as sp_fft

from itl_transport_lab.core.exceptions import ValidationError
from itl_transport_lab.spectral.field import TorusField, hermitian_from_nonnegative

logger = logging.getLogger(__name__)


def product_grid_size(total_band: int, out_band: int) -> int:
    """Smallest fast FFT length that keeps modes |n| <= out_band alias-free."""
    return int(sp_fft.next_fast_len(total_band + out_band + 1))


def band_to_grid(coeffs: np.ndarray, grid_points: int, real: bool) -> np.ndarray:
    """Synthesize u(x_j) = sum_n c_n e^{i n x_j} on x_j = 2*pi*j/M."""
    band = (coeffs.shape[-1] - 1) // 2
    if grid_points < 2 * band + 1:
        raise ValidationError(
            "grid too coarse for band limit",
            field="grid_points",
            context={"grid_points": grid_points, "band": band},
        )
    lead = coeffs.shape[:-1]
    if real:
        half = np.zeros(lead + (grid_points // 2 + 1,), dtype=complex)
        half[..., : band + 1] = coeffs[..., band:]
        return sp_fft.irfft(half, n=grid_points, axis=-1) * grid_points
    full = np.zeros(lead + (grid_points,), dtype=complex)
    full[..., : band + 1] = coeffs[..., band:]
    if band > 0:
        full[..., grid_points - band :] = coeffs[..., :band]
    return sp_fft.ifft(full, axis=-1) * grid_points


def grid_to_band(values: np.ndarray, band: int, real: bool) -> np.ndarray:
    """Analyze grid values into coefficients n = -band..band."""
    grid_points = values.shape[-1]
    if real:
        half = sp_fft.rfft(np.real(values), axis=-1) / grid_points
        return hermitian_from_nonnegative(half[..., : band + 1])
    full = sp_fft.fft(values, axis=-1) / grid_points
    if band == 0:
        return full[..., :1]
    return np.concatenate([full[..., grid_points - band :], full[..., : band + 1]], axis=-1)


def restrict_band(coeffs: np.ndarray, band: int) -> np.ndarray:
    """Central slice n = -band..band of a wider band array."""
    n_max = (coeffs.shape[-1] - 1) // 2
    return coeffs[..., n_max - band : n_max + band + 1]


def embed_band(coeffs: np.ndarray, n_max: int) -> np.ndarray:
    """Zero-pad a band array to the wider band n_max."""
    band = (coeffs.shape[-1] - 1) // 2
    out = np.zeros(coeffs.shape[:-1] + (2 * n_max + 1,), dtype=complex)
    out[..., n_max - band : n_max + band + 1] = coeffs
    return out


# -- Truncated nonlinearities (batch, retained band only) -------------------


def truncated_square(coeffs: np.ndarray, N: int, real: bool = True) -> np.ndarray:
    """
    P_N((P_N u)^2) on the full band of ``coeffs``.

    Uses a grid of at least 3N+1 points; modes |n| > N of the result are zero.
    """
    n_max = (coeffs.shape[-1] - 1) // 2
    low = restrict_band(coeffs, N)
    grid = product_grid_size(2 * N, N)
    values = band_to_grid(low, grid, real)
    return embed_band(grid_to_band(values * values, N, real), n_max)


def truncated_quintic(coeffs: np.ndarray, N: int) -> np.ndarray:
    """P_N(|P_N u|^4 P_N u) on the full band, grid of at least 6N+1 points."""
    n_max = (coeffs.shape[-1] - 1) // 2
    low = restrict_band(coeffs, N)
    grid = product_grid_size(5 * N, N)
    values = band_to_grid(low, grid, real=False)
    modulus_sq = (values * np.conj(values)).real
    return embed_band(grid_to_band(modulus_sq * modulus_sq * values, N, real=False), n_max)


# -- Field-level products ---------------------------------------------------


def quadratic_product(u: TorusField, v: TorusField) -> TorusField:
    """
    Exact coefficients of the pointwise product uv on |n| <= n_u + n_v.

    Example::

        cos2 = quadratic_product(cos_x, cos_x)   # 1/2 at n=0, 1/4 at n=+-2
    """
    if u.reality != v.reality:
        raise ValidationError(
            "quadratic_product requires matching reality flags",
            field="reality",
            context={"left": u.reality.value, "right": v.reality.value},
        )
    out_band = u.n_max + v.n_max
    grid = product_grid_size(out_band, out_band)
    real = u.is_real
    values = band_to_grid(u.coeffs, grid, real) * band_to_grid(v.coeffs, grid, real)
    logger.debug("quadratic product on %d-point grid, out band %d", grid, out_band)
    return TorusField(grid_to_band(values, out_band, real), u.reality)


def quintic_nonlinearity(u: TorusField) -> TorusField:
    """Exact coefficients of |u|^4 u, band limit 5*n_max."""
    out_band = 5 * u.n_max
    grid = product_grid_size(out_band, out_band)
    values = band_to_grid(u.coeffs, grid, u.is_real)
    if u.is_real:
        result = values**5
    else:
        modulus_sq = (values * np.conj(values)).real
        result = modulus_sq * modulus_sq * values
    return TorusField(grid_to_band(result, out_band, u.is_real), u.reality)
