"""
Monte Carlo verification of the transport identities, the Liouville check
and the recurrence experiment.

Monte Carlo tests run at small counts; the acceptance suite covers the
large-sample runs.
"""
import math

import numpy as np
import pytest
from prometheus_client import REGISTRY

from itl_transport_lab.core.exceptions import EstimationError, ValidationError
from itl_transport_lab.core.models.enums import ModelKind
from itl_transport_lab.core.models.params import BbmParams, CutoffSpec, GaussianSpec, NlsParams
from itl_transport_lab.core.models.reports import VerdictReport
from itl_transport_lab.density import BbmDensityModel, NlsDensityModel
from itl_transport_lab.dynamics import quadratic_correction
from itl_transport_lab.measures import ensemble_sample
from itl_transport_lab.spectral import TorusField
from itl_transport_lab.verification import (
    TestFunction,
    clipped_low_mass,
    constant_one,
    cosine_first_mode,
    density_lp_estimate,
    gaussian_low_mode,
    invariance_test_gamma0,
    jacobian_divergence_check,
    paired_statistics,
    quasi_invariance_test_bbm,
    quasi_invariance_test_nls,
    recurrence_experiment,
    run_suite,
    test_function_library,
)


@pytest.fixture
def gamma0():
    return GaussianSpec(model=ModelKind.BBM, s=0.0, beta=1.5, n_samp=12)


def make_report(test: str, z: float) -> VerdictReport:
    return VerdictReport(
        test=test,
        lhs_estimate=1.0,
        rhs_estimate=1.0,
        paired_diff_mean=z,
        paired_diff_se=1.0,
        z_score=z,
    )


# ═══════════════════════════════════════════════════════════════════════════════════
# 1. OBSERVABLES AND PAIRED STATISTICS
# ═══════════════════════════════════════════════════════════════════════════════════

class TestObservables:
    """Bounded test functions."""

    def test_library_names(self):
        assert set(test_function_library()) == {
            "one",
            "exp_low_mass_1",
            "exp_low_mass_2",
            "cos_first_mode",
            "clipped_low_mass_2",
        }

    def test_values_respect_bounds(self, make_real_field):
        rows = np.stack([make_real_field(6, scale=3.0).coeffs for _ in range(10)])
        for psi in (constant_one(), gaussian_low_mode(2), cosine_first_mode(), clipped_low_mass(2)):
            values = psi.evaluate(rows)
            assert values.shape == (10,)
            assert np.all(np.abs(values) <= psi.bound)

    def test_scalar_call(self, real_field):
        expected = math.exp(-np.sum(np.abs(real_field.coeffs[real_field.n_max - 1 : real_field.n_max + 2]) ** 2))
        assert gaussian_low_mode(1)(real_field) == pytest.approx(expected)

    def test_bound_violation_raises(self, real_field):
        loud = TestFunction("loud", lambda c: 2.0 * np.ones(c.shape[0]), bound=1.0)
        with pytest.raises(ValidationError) as exc:
            loud(real_field)
        assert exc.value.field == "psi"


class TestPairedStatistics:
    """Mean and standard error of the per-sample differences."""

    def test_identical_samples(self):
        values = np.linspace(0.0, 1.0, 11)
        stats = paired_statistics(values, values)
        assert stats.diff_mean == 0.0
        assert stats.diff_se == 0.0
        assert stats.z_score == 0.0
        assert stats.unpaired_se > 0.0

    def test_constant_shift_has_infinite_z(self):
        stats = paired_statistics(np.zeros(5), np.ones(5))
        assert stats.diff_mean == 1.0
        assert stats.z_score == np.inf

    def test_standard_error(self):
        lhs = np.zeros(4)
        rhs = np.array([1.0, -1.0, 1.0, -1.0])
        stats = paired_statistics(lhs, rhs)
        assert stats.diff_se == pytest.approx(np.std(rhs, ddof=1) / 2.0)
        assert stats.count == 4

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            paired_statistics(np.zeros(3), np.zeros(4))
        with pytest.raises(ValidationError):
            paired_statistics(np.zeros(0), np.zeros(0))


# ═══════════════════════════════════════════════════════════════════════════════════
# 2. MONTE CARLO IDENTITIES
# ═══════════════════════════════════════════════════════════════════════════════════

class TestInvariance:
    """gamma_0 is invariant under the truncated BBM flow."""

    def test_time_zero_is_exact(self, gamma0):
        report = invariance_test_gamma0(gamma0, gaussian_low_mode(2), 0.0, N=4, count=50, seed=1)
        assert report.paired_diff_mean == 0.0
        assert report.passed

    def test_constant_observable_is_exact(self, gamma0):
        report = invariance_test_gamma0(gamma0, constant_one(), 0.2, N=4, count=20, seed=2)
        assert report.z_score == 0.0
        assert report.passed

    def test_small_sample_run_passes(self, gamma0):
        report = invariance_test_gamma0(gamma0, gaussian_low_mode(2), 0.2, N=4, count=200, seed=3)
        assert report.passed, report.to_verdict()
        assert report.count == 200
        assert report.metadata["conservation_drift"] < 1e-8
        assert report.params["psi"] == "exp_low_mass_2"

    def test_verdicts_are_counted(self, gamma0):
        labels = {"test": "invariance_gamma0", "outcome": "pass"}
        before = REGISTRY.get_sample_value("itl_transport_verdicts_total", labels) or 0.0
        invariance_test_gamma0(gamma0, constant_one(), 0.0, N=4, count=5, seed=6)
        assert REGISTRY.get_sample_value("itl_transport_verdicts_total", labels) == before + 1.0

    def test_requires_gamma0(self, bbm_gaussian):
        with pytest.raises(ValidationError):
            invariance_test_gamma0(bbm_gaussian, constant_one(), 0.1, N=4, count=10, seed=0)


class TestQuasiInvariance:
    """Change of variables with the Jacobi density."""

    def test_bbm_small_sample_run_passes(self, bbm_gaussian, bbm_cutoff):
        report = quasi_invariance_test_bbm(bbm_gaussian, bbm_cutoff, gaussian_low_mode(2), 0.1, count=200, seed=11)
        assert report.passed, report.to_verdict()
        assert report.test == "quasi_invariance_bbm"
        assert 0.0 < report.metadata["accepted_fraction"] <= 1.0
        assert report.params["R"] == 3.0

    def test_bbm_time_zero_is_exact(self, bbm_gaussian, bbm_cutoff):
        report = quasi_invariance_test_bbm(bbm_gaussian, bbm_cutoff, cosine_first_mode(), 0.0, count=30, seed=4)
        assert report.paired_diff_mean == pytest.approx(0.0, abs=1e-15)
        assert report.passed

    def test_nls_small_sample_run_passes(self, nls_gaussian, nls_cutoff):
        corr = quadratic_correction(0.1, 1.0)
        report = quasi_invariance_test_nls(
            nls_gaussian, nls_cutoff, corr, gaussian_low_mode(1), 0.05, count=200, seed=12
        )
        assert report.passed, report.to_verdict()
        assert report.params["correction"] == "quadratic(0.1,1)"

    def test_every_sample_rejected(self, bbm_gaussian):
        tight = CutoffSpec(model=ModelKind.BBM, r=3.0, R=1e-6, N=4, s=2.0)
        with pytest.raises(EstimationError) as exc:
            quasi_invariance_test_bbm(bbm_gaussian, tight, constant_one(), 0.1, count=20, seed=5)
        assert exc.value.context["effective_sample_size"] == 0.0

    def test_regularity_mismatch(self, bbm_gaussian):
        other = CutoffSpec(model=ModelKind.BBM, r=3.0, R=3.0, N=4, s=1.5)
        with pytest.raises(ValidationError) as exc:
            quasi_invariance_test_bbm(bbm_gaussian, other, constant_one(), 0.1, count=10, seed=0)
        assert exc.value.field == "s"

    def test_energy_order_mismatch(self, nls_cutoff):
        gspec = GaussianSpec(model=ModelKind.NLS, k=3, n_samp=8)
        with pytest.raises(ValidationError) as exc:
            quasi_invariance_test_nls(gspec, nls_cutoff, None, constant_one(), 0.05, count=10, seed=0)
        assert exc.value.field == "k"

    def test_model_mismatch(self, nls_gaussian, bbm_cutoff):
        with pytest.raises(ValidationError):
            quasi_invariance_test_bbm(nls_gaussian, bbm_cutoff, constant_one(), 0.1, count=10, seed=0)

    def test_truncation_beyond_sampled_band(self, bbm_gaussian):
        wide = CutoffSpec(model=ModelKind.BBM, r=3.0, R=3.0, N=32, s=2.0)
        with pytest.raises(ValidationError) as exc:
            quasi_invariance_test_bbm(bbm_gaussian, wide, constant_one(), 0.1, count=10, seed=0)
        assert exc.value.field == "N"


class TestDensityMoments:
    """Self-normalized L^p estimates of the density."""

    @pytest.fixture
    def bbm_ensemble(self, bbm_gaussian):
        return ensemble_sample(bbm_gaussian, None, 40, seed=21)

    @pytest.fixture
    def bbm_density(self):
        return BbmDensityModel(BbmParams(beta=1.5, N=4), s=2.0, r=3.0)

    def test_time_zero_moment_is_one(self, bbm_ensemble, bbm_density):
        estimate = density_lp_estimate(bbm_ensemble, 0.0, 2.0, bbm_density)
        assert estimate.estimate == 1.0
        assert estimate.root == 1.0
        assert estimate.effective_sample_size == pytest.approx(40.0)

    def test_positive_time_moment(self, bbm_ensemble, bbm_density):
        estimate = density_lp_estimate(bbm_ensemble, 0.1, 2.0, bbm_density)
        assert estimate.estimate > 0.0
        assert np.isfinite(estimate.standard_error)
        assert estimate.root == pytest.approx(math.sqrt(estimate.estimate))

    def test_moment_roots_grow_with_p(self, bbm_ensemble, bbm_density):
        """Under normalized weights estimate^{1/p} is a power mean of f."""
        roots = [density_lp_estimate(bbm_ensemble, 0.1, p, bbm_density).root for p in (1.0, 2.0, 4.0)]
        assert roots[0] <= roots[1] * (1.0 + 1e-12)
        assert roots[1] <= roots[2] * (1.0 + 1e-12)

    @pytest.mark.parametrize("p", [2.0, 4.0])
    def test_moment_is_stable_when_count_doubles(self, bbm_gaussian, bbm_density, p):
        half = density_lp_estimate(ensemble_sample(bbm_gaussian, None, 200, seed=25), 0.1, p, bbm_density)
        full = density_lp_estimate(ensemble_sample(bbm_gaussian, None, 400, seed=25), 0.1, p, bbm_density)
        assert np.isfinite(full.estimate)
        assert abs(full.estimate - half.estimate) <= 2.0 * math.hypot(half.standard_error, full.standard_error)

    def test_p_below_one(self, bbm_ensemble, bbm_density):
        with pytest.raises(ValidationError) as exc:
            density_lp_estimate(bbm_ensemble, 0.1, 0.5, bbm_density)
        assert exc.value.field == "p"

    def test_small_effective_sample_size(self, bbm_gaussian, bbm_density):
        small = ensemble_sample(bbm_gaussian, None, 5, seed=22)
        with pytest.raises(EstimationError):
            density_lp_estimate(small, 0.1, 2.0, bbm_density)

    def test_nls_time_window(self, nls_gaussian):
        ensemble = ensemble_sample(nls_gaussian, None, 20, seed=23)
        model = NlsDensityModel(NlsParams(N=4), k=2, r=2.0)
        with pytest.raises(ValidationError) as exc:
            density_lp_estimate(ensemble, 0.5, 2.0, model)
        assert exc.value.field == "t"

    def test_model_mismatch(self, nls_gaussian, bbm_density):
        ensemble = ensemble_sample(nls_gaussian, None, 20, seed=24)
        with pytest.raises(ValidationError):
            density_lp_estimate(ensemble, 0.1, 2.0, bbm_density)


# ═══════════════════════════════════════════════════════════════════════════════════
# 3. DETERMINISTIC CHECKS
# ═══════════════════════════════════════════════════════════════════════════════════

class TestLiouville:
    """The truncated vector fields are divergence free on E_N."""

    def test_bbm_divergence_vanishes(self, make_real_field):
        p = BbmParams(beta=1.5, N=4)
        residuals = [jacobian_divergence_check(make_real_field(4, scale=0.5), p) for _ in range(20)]
        assert max(residuals) <= 1e-8

    def test_nls_divergence_vanishes(self, make_complex_field, nls_params):
        residuals = [
            jacobian_divergence_check(make_complex_field(4, scale=0.5), nls_params) for _ in range(20)
        ]
        assert max(residuals) <= 1e-8

    def test_wider_band_is_projected(self, real_field, bbm_params):
        """Only the retained modes span E_N."""
        assert jacobian_divergence_check(real_field, bbm_params) <= 1e-8

    def test_bbm_needs_real_field(self, complex_field, bbm_params):
        with pytest.raises(ValidationError):
            jacobian_divergence_check(complex_field, bbm_params)


class TestRecurrence:
    """Holder distance to the initial state along the flow."""

    def test_linear_single_mode_returns(self):
        """Mode 1 of the linear flow has period 4 pi when beta = 1.5."""
        u0 = TorusField.from_modes({1: 0.3, -1: 0.3}, n_max=4)
        dt = 4.0 * math.pi / 1000
        p = BbmParams(beta=1.5, N=4, dt=dt, nonlinearity_enabled=False)
        result = recurrence_experiment(u0, 0.1, p, 8.0 * math.pi, 10 * dt, exclusion=1.0)
        assert np.all(np.isnan(result.running_minimum[result.times < 1.0]))
        assert result.minimum_after_exclusion < 1e-6
        assert result.distances[0] == 0.0
        assert len(result.rows()) == len(result.times)

    def test_alpha_range(self, real_field, bbm_params):
        with pytest.raises(ValidationError) as exc:
            recurrence_experiment(real_field, 0.3, bbm_params, 1.0, 0.1)
        assert exc.value.field == "alpha"

    def test_positive_probe_stride(self, real_field, bbm_params):
        with pytest.raises(ValidationError):
            recurrence_experiment(real_field, 0.1, bbm_params, 1.0, 0.0)


class TestSuite:
    """Aggregated verdicts."""

    def test_all_passing(self):
        result = run_suite([make_report("a", 0.5), make_report("b", -2.0)])
        assert result.passed
        assert result.exit_code == 0
        assert result.failed == []

    def test_one_failure(self):
        result = run_suite([make_report("a", 0.5), make_report("b", 7.0)])
        assert not result.passed
        assert result.exit_code == 1
        assert result.failed == ["b"]

    def test_empty_suite_passes(self):
        assert run_suite([]).exit_code == 0
