"""
Fourier multipliers and frequency projections.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from itl_transport_lab.core.exceptions import ValidationError
from itl_transport_lab.core.models.enums import Reality
from itl_transport_lab.spectral.field import TorusField, frequencies

Symbol = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Multiplier:
    """
    Fourier multiplier with a vectorized symbol n -> m(n).

    A symbol with m(-n) = conj(m(n)) (real even or imaginary odd) maps real
    fields to real fields.
    """
    symbol: Symbol
    name: str = "multiplier"

    def values(self, n_max: int) -> np.ndarray:
        n = frequencies(n_max)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.asarray(self.symbol(n), dtype=complex)
        out = np.broadcast_to(out, n.shape).astype(complex)
        if not np.all(np.isfinite(out)):
            bad = n[~np.isfinite(out)].tolist()
            raise ValidationError(
                f"symbol of {self.name} undefined at in-band frequencies",
                field="symbol",
                context={"frequencies": bad},
            )
        return out

    def preserves_reality(self, n_max: int) -> bool:
        m = self.values(n_max)
        return bool(np.allclose(m[::-1], np.conj(m), rtol=0.0, atol=1e-15 * (1.0 + np.max(np.abs(m)))))


def apply_multiplier(m: Multiplier, u: TorusField) -> TorusField:
    """coeffs_out(n) = m(n) * coeffs_in(n)."""
    symbol = m.values(u.n_max)
    out = symbol * u.coeffs
    if u.is_real and m.preserves_reality(u.n_max):
        return TorusField(out, Reality.REAL)
    return TorusField(out, Reality.COMPLEX)


def _abs_pow(n: np.ndarray, exponent: float) -> np.ndarray:
    return np.abs(n).astype(float) ** exponent


# -- Standard symbols -------------------------------------------------------


def fractional_derivative(beta: float) -> Multiplier:
    """|D|^beta, zero at n = 0."""
    return Multiplier(lambda n: np.where(n == 0, 0.0, _abs_pow(n, beta)), f"|D|^{beta}")


def bbm_generator(beta: float) -> Multiplier:
    """L_beta = d/dx / (1 + |D|^beta), symbol i n / (1 + |n|^beta)."""
    return Multiplier(lambda n: 1j * n / (1.0 + _abs_pow(n, beta)), f"L_{beta}")


def bessel_potential(sigma: float) -> Multiplier:
    """Lambda(sigma) = sqrt(1 + |D|^{2 sigma}); equals 1 at n = 0 for sigma > 0."""
    return Multiplier(lambda n: np.sqrt(1.0 + _abs_pow(n, 2.0 * sigma)), f"Lambda({sigma})")


def derivative() -> Multiplier:
    return Multiplier(lambda n: 1j * n.astype(float), "d/dx")


def laplacian() -> Multiplier:
    return Multiplier(lambda n: -(n.astype(float) ** 2), "d2/dx2")


def energy_multiplier(s: float, beta: float) -> Multiplier:
    """M = (1 + |n|^{2s+beta}) / (1 + |n|^beta)."""
    return Multiplier(
        lambda n: (1.0 + _abs_pow(n, 2.0 * s + beta)) / (1.0 + _abs_pow(n, beta)),
        f"M({s},{beta})",
    )


def m1(s: float, beta: float) -> Multiplier:
    """M1 = (1 + |n|^{2s+beta}) / ((1 + |n|^beta)(1 + |n|^{2s})), values in (0, 1]."""
    return Multiplier(
        lambda n: (1.0 + _abs_pow(n, 2.0 * s + beta))
        / ((1.0 + _abs_pow(n, beta)) * (1.0 + _abs_pow(n, 2.0 * s))),
        f"M1({s},{beta})",
    )


def m2(s: float, beta: float) -> Multiplier:
    """M2 = -(|n|^{2s} + |n|^beta) / ((1 + |n|^beta)(1 + |n|^{2s})), values in [-1, 0]."""
    return Multiplier(
        lambda n: -(_abs_pow(n, 2.0 * s) + _abs_pow(n, beta))
        / ((1.0 + _abs_pow(n, beta)) * (1.0 + _abs_pow(n, 2.0 * s))),
        f"M2({s},{beta})",
    )


# -- Projections ------------------------------------------------------------


def _band_mask(n_max: int, low: int, high: int) -> np.ndarray:
    """Mask of low < |n| <= high."""
    n = np.abs(frequencies(n_max))
    return (n > low) & (n <= high)


def project(u: TorusField, N: int) -> TorusField:
    """P_N: zero every coefficient with |n| > N (band limit unchanged)."""
    if N < 0:
        raise ValidationError("project requires N >= 0", field="N")
    mask = np.abs(u.frequencies) <= N
    return TorusField(np.where(mask, u.coeffs, 0.0), u.reality)


def lp_block(u: TorusField, j: int) -> TorusField:
    """Littlewood-Paley block: Delta_0 = P_1, Delta_j = P_{2^j} - P_{2^{j-1}}."""
    if j < 0:
        raise ValidationError("lp_block requires j >= 0", field="j")
    if j == 0:
        return project(u, 1)
    mask = _band_mask(u.n_max, 2 ** (j - 1), 2**j)
    return TorusField(np.where(mask, u.coeffs, 0.0), u.reality)


def max_block_index(n_max: int) -> int:
    """Smallest J with 2^J >= n_max, so blocks 0..J cover the band."""
    J = 0
    while 2**J < n_max:
        J += 1
    return J
