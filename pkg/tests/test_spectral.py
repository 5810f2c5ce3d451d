"""
Spectral core tests: banded fields, alias-free products, norms and multipliers.

Products are checked against direct discrete convolution of the coefficient
arrays, which is exact for band-limited inputs.

Run with: pytest tests/test_spectral.py -v
"""
import numpy as np
import pytest

from itl_transport_lab.core.exceptions import ValidationError
from itl_transport_lab.core.models.enums import Reality
from itl_transport_lab.dynamics.nls import energy_e1
from itl_transport_lab.spectral import (
    Multiplier,
    TorusField,
    apply_multiplier,
    bbm_generator,
    besov_holder_proxy,
    derivative,
    energy_multiplier,
    holder_norm,
    hsigma_inner,
    lp_block,
    lp_norm,
    m1,
    m2,
    project,
    quadratic_product,
    quintic_nonlinearity,
    sobolev_norm,
    sup_norm,
)
from itl_transport_lab.spectral.field import frequencies
from itl_transport_lab.spectral.operators import max_block_index
from itl_transport_lab.spectral.transforms import (
    band_to_grid,
    embed_band,
    grid_to_band,
    restrict_band,
    truncated_quintic,
    truncated_square,
)


def _convolve(*arrays):
    out = arrays[0]
    for other in arrays[1:]:
        out = np.convolve(out, other)
    return out


def _conjugate_field(coeffs):
    """Coefficients of conj(u): conj(c_{-n})."""
    return np.conj(coeffs[::-1])


# ═══════════════════════════════════════════════════════════════════════════════════
# 1. FIELD REPRESENTATION
# ═══════════════════════════════════════════════════════════════════════════════════

class TestTorusField:
    """Storage order, Hermitian symmetry and serialization of banded fields."""

    def test_from_modes_builds_cosine(self):
        """cos x has coefficients 1/2 at n = +-1 and unit sup norm."""
        u = TorusField.from_modes({1: 0.5, -1: 0.5}, n_max=4)
        assert u.n_max == 4
        assert u.coefficient(1) == pytest.approx(0.5)
        assert u.coefficient(7) == 0j
        assert sup_norm(u) == pytest.approx(1.0, abs=1e-12)

    def test_real_field_rejects_non_hermitian_coefficients(self):
        """A real field with c(-1) != conj(c(1)) is refused."""
        with pytest.raises(ValidationError) as exc:
            TorusField.from_modes({1: 1.0, -1: 0.0}, n_max=2)
        assert exc.value.field == "coeffs"

    def test_real_field_symmetrizes_roundoff(self):
        """Asymmetries at roundoff level are removed exactly."""
        coeffs = np.array([0.5 - 1e-14, 1.0, 0.5 + 1e-14], dtype=complex)
        u = TorusField(coeffs, Reality.REAL)
        assert u.coeffs[0] == np.conj(u.coeffs[2])
        assert u.coeffs[1].imag == 0.0

    def test_complex_field_accepts_any_coefficients(self):
        u = TorusField.from_modes({1: 1.0}, n_max=2, reality=Reality.COMPLEX)
        assert u.coefficient(-1) == 0j

    def test_mode_outside_band_is_rejected(self):
        with pytest.raises(ValidationError):
            TorusField.from_modes({5: 1.0}, n_max=2)

    def test_even_length_is_rejected(self):
        with pytest.raises(ValidationError):
            TorusField(np.zeros(4, dtype=complex))

    def test_nonfinite_coefficients_are_rejected(self):
        with pytest.raises(ValidationError):
            TorusField(np.array([np.nan, 0.0, np.nan], dtype=complex))

    def test_coefficients_are_read_only(self, real_field):
        with pytest.raises(ValueError):
            real_field.coeffs[0] = 1.0

    def test_resized_pads_and_truncates(self, real_field):
        """Padding keeps every coefficient, truncation keeps the central band."""
        wide = real_field.resized(12)
        assert wide.n_max == 12
        assert wide.resized(real_field.n_max).allclose(real_field, atol=0.0)
        narrow = real_field.resized(3)
        assert np.array_equal(narrow.coeffs, real_field.coeffs[5:12])

    def test_arithmetic_requires_equal_bands(self, real_field):
        with pytest.raises(ValidationError):
            real_field + real_field.resized(3)

    def test_complex_scalar_makes_field_complex(self, real_field):
        assert (real_field * 2.0).is_real
        assert not (real_field * 1j).is_real

    def test_dict_form_preserves_coefficients(self, complex_field):
        """The JSON shape lists [re, im] pairs in storage order."""
        data = complex_field.to_dict()
        assert data["n_max"] == complex_field.n_max
        assert data["reality"] == "complex"
        assert len(data["coeffs"]) == 2 * complex_field.n_max + 1
        restored = TorusField.from_dict(data)
        assert restored.allclose(complex_field, atol=0.0)
        assert restored.reality == Reality.COMPLEX

    def test_malformed_dict_is_rejected(self):
        with pytest.raises(ValidationError):
            TorusField.from_dict({"n_max": 2, "coeffs": [[0.0, 0.0]]})
        with pytest.raises(ValidationError):
            TorusField.from_dict({"coeffs": []})


# ═══════════════════════════════════════════════════════════════════════════════════
# 2. TRANSFORMS AND PRODUCTS
# ═══════════════════════════════════════════════════════════════════════════════════

class TestTransforms:
    """Grid synthesis and alias-free nonlinear products."""

    @pytest.mark.parametrize("real", [True, False])
    def test_grid_analysis_inverts_synthesis(self, make_real_field, make_complex_field, real):
        u = make_real_field(6) if real else make_complex_field(6)
        values = band_to_grid(u.coeffs, 32, real)
        assert np.allclose(grid_to_band(values, 6, real), u.coeffs, atol=1e-13)

    def test_synthesis_matches_pointwise_sum(self, complex_field):
        grid = 20
        x = 2.0 * np.pi * np.arange(grid) / grid
        n = frequencies(complex_field.n_max)
        expected = np.exp(1j * np.outer(x, n)) @ complex_field.coeffs
        assert np.allclose(complex_field.values(grid), expected, atol=1e-12)

    def test_coarse_grid_is_rejected(self, real_field):
        with pytest.raises(ValidationError):
            band_to_grid(real_field.coeffs, 2 * real_field.n_max, True)

    def test_cosine_square(self):
        """cos^2 x = 1/2 + cos(2x)/2."""
        cos_x = TorusField.from_modes({1: 0.5, -1: 0.5}, n_max=1)
        square = quadratic_product(cos_x, cos_x)
        assert square.n_max == 2
        assert np.allclose(square.coeffs, [0.25, 0.0, 0.5, 0.0, 0.25], atol=1e-14)

    @pytest.mark.parametrize("n_max", [1, 3, 8])
    def test_real_product_matches_convolution(self, make_real_field, n_max):
        u, v = make_real_field(n_max), make_real_field(n_max)
        product = quadratic_product(u, v)
        assert np.allclose(product.coeffs, _convolve(u.coeffs, v.coeffs), atol=1e-12)
        assert product.is_real

    @pytest.mark.parametrize("n_max", [2, 5])
    def test_complex_product_matches_convolution(self, make_complex_field, n_max):
        u, v = make_complex_field(n_max), make_complex_field(n_max)
        product = quadratic_product(u, v)
        assert np.allclose(product.coeffs, _convolve(u.coeffs, v.coeffs), atol=1e-12)

    def test_product_requires_matching_reality(self, real_field, complex_field):
        with pytest.raises(ValidationError):
            quadratic_product(real_field, complex_field)

    @pytest.mark.parametrize("n_max", [1, 4, 7])
    def test_quintic_matches_convolution(self, make_complex_field, n_max):
        """|u|^4 u = u u u conj(u) conj(u)."""
        u = make_complex_field(n_max)
        bar = _conjugate_field(u.coeffs)
        expected = _convolve(u.coeffs, u.coeffs, u.coeffs, bar, bar)
        result = quintic_nonlinearity(u)
        assert result.n_max == 5 * n_max
        assert np.allclose(result.coeffs, expected, atol=1e-12)

    def test_real_quintic_is_fifth_power(self, make_real_field):
        u = make_real_field(3)
        expected = _convolve(*([u.coeffs] * 5))
        assert np.allclose(quintic_nonlinearity(u).coeffs, expected, atol=1e-12)

    @pytest.mark.parametrize("N", [0, 2, 5])
    def test_truncated_square_is_projected_convolution(self, make_real_field, N):
        """P_N((P_N u)^2) keeps only |n| <= N and ignores the tail of u."""
        u = make_real_field(8)
        low = restrict_band(u.coeffs, N)
        expected = embed_band(restrict_band(_convolve(low, low), N), 8)
        result = truncated_square(u.coeffs, N, real=True)
        assert np.allclose(result, expected, atol=1e-12)
        assert np.all(result[np.abs(frequencies(8)) > N] == 0.0)

    def test_truncated_quintic_is_projected_convolution(self, make_complex_field):
        u = make_complex_field(6)
        N = 3
        low = restrict_band(u.coeffs, N)
        bar = _conjugate_field(low)
        expected = embed_band(restrict_band(_convolve(low, low, low, bar, bar), N), 6)
        assert np.allclose(truncated_quintic(u.coeffs, N), expected, atol=1e-12)

    def test_truncated_products_work_on_batches(self, make_real_field):
        rows = np.stack([make_real_field(5).coeffs for _ in range(4)])
        batch = truncated_square(rows, 3, real=True)
        for row, result in zip(rows, batch):
            assert np.allclose(truncated_square(row, 3, real=True), result, atol=1e-14)


# ═══════════════════════════════════════════════════════════════════════════════════
# 3. NORMS
# ═══════════════════════════════════════════════════════════════════════════════════

class TestNorms:
    """Sobolev weights, Lebesgue norms on the normalized measure, Holder norms."""

    def test_zero_mode_weight_uses_zero_to_the_zero(self):
        """The constant 1 has H^0 norm sqrt(2) and H^sigma norm 1 for sigma > 0."""
        one = TorusField.from_modes({0: 1.0}, n_max=3)
        assert sobolev_norm(one, 0.0) == pytest.approx(np.sqrt(2.0))
        assert sobolev_norm(one, 0.75) == pytest.approx(1.0)

    def test_sobolev_norm_of_single_mode(self):
        u = TorusField.from_modes({3: 1.0}, n_max=4, reality=Reality.COMPLEX)
        assert sobolev_norm(u, 1.0) == pytest.approx(np.sqrt(10.0))

    def test_inner_product_polarizes_norm(self, real_field, make_real_field):
        v = make_real_field(real_field.n_max)
        lhs = sobolev_norm(real_field + v, 1.5) ** 2 - sobolev_norm(real_field - v, 1.5) ** 2
        assert lhs / 4.0 == pytest.approx(hsigma_inner(real_field, v, 1.5), rel=1e-12)

    def test_inner_product_requires_equal_bands(self, real_field):
        with pytest.raises(ValidationError):
            hsigma_inner(real_field, real_field.resized(2), 1.0)

    def test_parseval(self, complex_field):
        """||u||_{L^2}^2 = sum |c_n|^2 = mean |u(x_j)|^2 on a fine grid."""
        values = complex_field.values(64)
        assert lp_norm(complex_field, 2) ** 2 == pytest.approx(np.mean(np.abs(values) ** 2))

    def test_even_lp_norm_is_exact(self, real_field):
        dense = np.mean(np.abs(real_field.values(512)) ** 4) ** 0.25
        assert lp_norm(real_field, 4) == pytest.approx(dense, rel=1e-12)

    def test_cosine_norms(self):
        cos_x = TorusField.from_modes({1: 0.5, -1: 0.5}, n_max=2)
        assert lp_norm(cos_x, 2) == pytest.approx(np.sqrt(0.5))
        assert lp_norm(cos_x, 4) == pytest.approx((3.0 / 8.0) ** 0.25)
        assert lp_norm(cos_x, np.inf) == pytest.approx(1.0)

    def test_lp_norm_rejects_small_exponent(self, real_field):
        with pytest.raises(ValidationError):
            lp_norm(real_field, 0.5)

    def test_energy_of_constant(self):
        """E_1(1) = 1/2 + 1/6."""
        one = TorusField.from_modes({0: 1.0}, n_max=2, reality=Reality.COMPLEX)
        assert energy_e1(one) == pytest.approx(2.0 / 3.0)

    def test_holder_norm_of_constant_is_its_modulus(self):
        u = TorusField.from_modes({0: -2.0}, n_max=3)
        assert holder_norm(u, 0.3) == pytest.approx(2.0)

    def test_holder_norm_bounds_sup_norm(self, real_field):
        assert holder_norm(real_field, 0.4) >= sup_norm(real_field, 4 * real_field.n_max) - 1e-12

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2])
    def test_holder_exponent_must_lie_in_unit_interval(self, real_field, alpha):
        with pytest.raises(ValidationError):
            holder_norm(real_field, alpha)
        with pytest.raises(ValidationError):
            besov_holder_proxy(real_field, alpha)

    def test_holder_norm_rejects_coarse_grid(self, real_field):
        with pytest.raises(ValidationError):
            holder_norm(real_field, 0.5, grid_points=8)

    def test_holder_norm_of_cosine_matches_dense_oracle(self):
        """||cos||_{C^{1/2}} = 1 + max over circle distances h of 2 sin(h/2) / h^{1/2}."""
        cos_x = TorusField.from_modes({1: 0.5, -1: 0.5}, n_max=1)
        h = np.linspace(1e-6, np.pi, 10**6)
        oracle = 1.0 + np.max(2.0 * np.sin(h / 2.0) / np.sqrt(h))
        assert holder_norm(cos_x, 0.5) == pytest.approx(oracle, rel=1e-2)
        assert holder_norm(cos_x, 0.5, grid_points=4) < 0.99 * oracle

    def test_besov_proxy_is_positive_for_nonzero_field(self, real_field):
        assert besov_holder_proxy(real_field, 0.25) > 0.0
        assert besov_holder_proxy(TorusField.zeros(4), 0.25) == 0.0


# ═══════════════════════════════════════════════════════════════════════════════════
# 4. MULTIPLIERS AND PROJECTIONS
# ═══════════════════════════════════════════════════════════════════════════════════

class TestMultipliers:
    """Fourier multipliers, frequency projections and Littlewood-Paley blocks."""

    def test_derivative_of_sine(self):
        """d/dx sin x = cos x."""
        sin_x = TorusField.from_modes({1: -0.5j, -1: 0.5j}, n_max=3)
        cos_x = TorusField.from_modes({1: 0.5, -1: 0.5}, n_max=3)
        result = apply_multiplier(derivative(), sin_x)
        assert result.is_real
        assert result.allclose(cos_x)

    def test_bbm_generator_preserves_reality(self, real_field):
        assert bbm_generator(1.5).preserves_reality(real_field.n_max)
        assert apply_multiplier(bbm_generator(1.5), real_field).is_real

    @pytest.mark.parametrize("sigma", [0.75, 2.0])
    def test_generators_are_skew_adjoint(self, real_field, complex_field, sigma):
        """<v, A v>_{H^sigma} = 0 for the imaginary symbols of both linear flows."""
        schroedinger = Multiplier(lambda n: -1j * n.astype(float) ** 2, "i d2/dx2")
        cases = (
            (bbm_generator(1.5), real_field),
            (derivative(), real_field),
            (schroedinger, complex_field),
        )
        for generator, v in cases:
            pairing = hsigma_inner(v, apply_multiplier(generator, v), sigma)
            assert abs(pairing) <= 1e-12 * sobolev_norm(v, sigma + 1.0) ** 2

    def test_non_hermitian_symbol_gives_complex_field(self, real_field):
        shift = Multiplier(lambda n: np.where(n > 0, 1.0, 0.0), "positive")
        assert not apply_multiplier(shift, real_field).is_real

    def test_undefined_symbol_is_rejected(self):
        with pytest.raises(ValidationError) as exc:
            Multiplier(lambda n: 1.0 / n, "inverse").values(3)
        assert exc.value.context["frequencies"] == [0]

    def test_energy_multiplier_factorization(self):
        """M = (1 + |n|^{2s}) M1, with M1 in (0, 1] and M2 in [-1, 0]."""
        s, beta, n_max = 2.0, 1.5, 16
        n = np.abs(frequencies(n_max)).astype(float)
        full = energy_multiplier(s, beta).values(n_max).real
        first = m1(s, beta).values(n_max).real
        second = m2(s, beta).values(n_max).real
        assert np.allclose(full, (1.0 + n ** (2 * s)) * first)
        assert np.all((first > 0.0) & (first <= 1.0))
        assert np.all((second >= -1.0) & (second <= 0.0))
        a, b = n**beta, n ** (2 * s)
        assert np.allclose(first + second, (1.0 - a) * (1.0 - b) / ((1.0 + a) * (1.0 + b)))

    def test_project_zeroes_high_modes(self, real_field):
        low = project(real_field, 3)
        high_modes = np.abs(real_field.frequencies) > 3
        assert np.all(low.coeffs[high_modes] == 0.0)
        assert np.array_equal(low.coeffs[~high_modes], real_field.coeffs[~high_modes])

    def test_project_rejects_negative_truncation(self, real_field):
        with pytest.raises(ValidationError):
            project(real_field, -1)

    def test_littlewood_paley_blocks_partition_the_band(self, real_field):
        J = max_block_index(real_field.n_max)
        assert 2**J >= real_field.n_max
        total = TorusField.zeros(real_field.n_max)
        for j in range(J + 1):
            total = total + lp_block(real_field, j)
        assert total.allclose(real_field, atol=0.0)
