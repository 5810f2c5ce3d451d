"""
Spectral core: banded Fourier fields, norms, multipliers and alias-free products.
"""
from itl_transport_lab.spectral.field import TorusField, frequencies
from itl_transport_lab.spectral.norms import (
    besov_holder_proxy,
    holder_norm,
    hsigma_inner,
    lp_norm,
    sobolev_norm,
    sup_norm,
    w1inf_norm,
)
from itl_transport_lab.spectral.operators import (
    Multiplier,
    apply_multiplier,
    bbm_generator,
    bessel_potential,
    derivative,
    energy_multiplier,
    fractional_derivative,
    laplacian,
    lp_block,
    m1,
    m2,
    project,
)
from itl_transport_lab.spectral.transforms import quadratic_product, quintic_nonlinearity

__all__ = [
    "TorusField",
    "frequencies",
    "besov_holder_proxy",
    "holder_norm",
    "hsigma_inner",
    "lp_norm",
    "sobolev_norm",
    "sup_norm",
    "w1inf_norm",
    "Multiplier",
    "apply_multiplier",
    "bbm_generator",
    "bessel_potential",
    "derivative",
    "energy_multiplier",
    "fractional_derivative",
    "laplacian",
    "lp_block",
    "m1",
    "m2",
    "project",
    "quadratic_product",
    "quintic_nonlinearity",
]
