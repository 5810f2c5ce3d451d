"""
Monte Carlo and deterministic verification of the finite-N transport identities.

The exact identities are tested with paired estimators: both sides are
evaluated on the same Gaussian samples and the mean of the per-sample
differences is compared with its standard error. Integrator error enters as a
deterministic drift budget that widens the z threshold.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from itl_transport_lab import metrics
from itl_transport_lab.core.exceptions import EstimationError, ValidationError
from itl_transport_lab.core.models import constants
from itl_transport_lab.core.models.enums import IntegratorKind, ModelKind, Reality
from itl_transport_lab.core.models.params import BbmParams, CutoffSpec, GaussianSpec, NlsParams
from itl_transport_lab.core.models.reports import VerdictReport
from itl_transport_lab.density.transport import BbmDensityModel, DensityModel, NlsDensityModel
from itl_transport_lab.dynamics.bbm import bbm_system, integrate_bbm
from itl_transport_lab.dynamics.integrators import evolve_batch
from itl_transport_lab.dynamics.nls import ModifiedEnergy, nls_system
from itl_transport_lab.measures.ensemble import WeightedEnsemble
from itl_transport_lab.measures.gaussian import sample_gamma_array
from itl_transport_lab.measures.weights import effective_sample_size, log_weights_for
from itl_transport_lab.settings import get_settings
from itl_transport_lab.spectral.field import TorusField
from itl_transport_lab.spectral.norms import holder_norm, sobolev_norm_sq_array
from itl_transport_lab.verification.observables import TestFunction

logger = logging.getLogger(__name__)

FlowParams = Union[BbmParams, NlsParams]


# -- Paired estimator -------------------------------------------------------


@dataclass
class PairedStatistics:
    lhs_mean: float
    rhs_mean: float
    diff_mean: float
    diff_se: float
    unpaired_se: float
    count: int

    @property
    def z_score(self) -> float:
        if self.diff_se > 0.0:
            return self.diff_mean / self.diff_se
        if self.diff_mean == 0.0:
            return 0.0
        return float(np.copysign(np.inf, self.diff_mean))


def paired_statistics(lhs: np.ndarray, rhs: np.ndarray) -> PairedStatistics:
    """Mean and standard error of rhs - lhs, plus the unpaired error of the two means."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    count = lhs.shape[0]
    if count != rhs.shape[0] or count == 0:
        raise ValidationError("paired samples must be nonempty and of equal length", field="count")
    diff = rhs - lhs
    if count > 1:
        diff_se = float(np.std(diff, ddof=1) / np.sqrt(count))
        unpaired = float(np.sqrt((np.var(lhs, ddof=1) + np.var(rhs, ddof=1)) / count))
    else:
        diff_se = unpaired = 0.0
    return PairedStatistics(
        float(np.mean(lhs)), float(np.mean(rhs)), float(np.mean(diff)), diff_se, unpaired, count
    )


def _verdict(
    test: str,
    stats: PairedStatistics,
    drift_budget: float,
    z_threshold: float,
    seed: Optional[int],
    params: Dict[str, Any],
    metadata: Optional[Dict[str, Any]] = None,
) -> VerdictReport:
    effective = z_threshold
    if drift_budget > 0.0:
        if stats.diff_se > 0.0:
            effective = z_threshold + drift_budget / stats.diff_se
        elif abs(stats.diff_mean) <= drift_budget:
            effective = np.inf
    report = VerdictReport(
        test=test,
        lhs_estimate=stats.lhs_mean,
        rhs_estimate=stats.rhs_mean,
        paired_diff_mean=stats.diff_mean,
        paired_diff_se=stats.diff_se,
        unpaired_se=stats.unpaired_se,
        z_score=stats.z_score,
        z_threshold=z_threshold,
        drift_budget=drift_budget,
        effective_threshold=float(effective),
        seed=seed,
        count=stats.count,
        params=params,
        metadata=metadata or {},
    )
    metrics.VERDICTS.labels(test, "pass" if report.passed else "fail").inc()
    logger.info(
        "%s: z=%.3f (threshold %.3f) %s",
        test,
        report.z_score,
        report.effective_threshold,
        "pass" if report.passed else "fail",
    )
    return report


def _relative_drift(before: np.ndarray, after: np.ndarray) -> float:
    scale = np.maximum(np.abs(before), 1e-300)
    return float(np.max(np.abs(after - before) / scale)) if before.size else 0.0


def _drift_budget(psi: TestFunction, drift: float) -> float:
    return psi.bound * psi.lipschitz * drift


# -- Invariance of gamma_0 ---------------------------------------------------


def invariance_test_gamma0(
    gspec: GaussianSpec,
    psi: TestFunction,
    t: float,
    N: int,
    count: int,
    seed: int,
    dt: float = 1e-3,
    integrator: IntegratorKind = IntegratorKind.RK4,
    threads: Optional[int] = None,
    z_threshold: float = constants.DEFAULT_Z_THRESHOLD,
) -> VerdictReport:
    """
    Paired test of E[psi(Phi_t^N u)] = E[psi(u)] under gamma_0.

    The truncated BBM flow preserves gamma_0 exactly at every N.
    """
    if gspec.model != ModelKind.BBM or gspec.s != 0.0:
        raise ValidationError("gamma_0 invariance needs a bbm Gaussian with s = 0", field="s")
    params = BbmParams(beta=float(gspec.beta), N=N, dt=dt, integrator=integrator)  # type: ignore[arg-type]
    settings = get_settings()
    coeffs = sample_gamma_array(gspec, seed, count)
    evolved = evolve_batch(
        bbm_system(params, gspec.n_samp, real=True),
        coeffs,
        t,
        params.dt,
        params.integrator,
        threads=threads or settings.threads,
        blowup_threshold=settings.blowup_threshold,
        midpoint_tolerance=settings.midpoint_tolerance,
        midpoint_max_iter=settings.midpoint_max_iter,
    )
    conserved_before = np.sqrt(sobolev_norm_sq_array(coeffs, params.beta / 2.0))
    conserved_after = np.sqrt(sobolev_norm_sq_array(evolved, params.beta / 2.0))
    drift = _relative_drift(conserved_before, conserved_after)

    stats = paired_statistics(psi.evaluate(coeffs), psi.evaluate(evolved))
    return _verdict(
        "invariance_gamma0",
        stats,
        _drift_budget(psi, drift),
        z_threshold,
        seed,
        {"beta": params.beta, "N": N, "t": t, "dt": dt, "n_samp": gspec.n_samp, "psi": psi.name},
        {"conservation_drift": drift},
    )


# -- Change of variables -----------------------------------------------------


def _quasi_invariance(
    test: str,
    model: DensityModel,
    gspec: GaussianSpec,
    cspec: CutoffSpec,
    psi: TestFunction,
    t: float,
    count: int,
    seed: int,
    correction: Optional[ModifiedEnergy],
    threads: Optional[int],
    z_threshold: float,
) -> VerdictReport:
    coeffs = sample_gamma_array(gspec, seed, count)
    log_w = log_weights_for(coeffs, cspec, gspec.beta, correction)
    accepted = np.isfinite(log_w)
    if not np.any(accepted):
        raise EstimationError(
            "every sample is rejected by the rigid cut-off",
            effective_sample_size=0.0,
            context={"R": cspec.R, "count": count},
        )

    weights = np.exp(log_w)
    lhs = np.zeros(count)
    rhs = np.zeros(count)
    kept = coeffs[accepted]
    evolved = model.evolve_batch(kept, t, threads)
    log_f = model.w_array(kept) - model.w_array(evolved)

    lhs[accepted] = psi.evaluate(kept) * weights[accepted]
    rhs[accepted] = psi.evaluate(evolved) * np.exp(log_f + log_w[accepted])

    drift = _relative_drift(model.conserved_array(kept), model.conserved_array(evolved))
    stats = paired_statistics(lhs, rhs)
    params: Dict[str, Any] = {
        **model.describe(),
        "t": t,
        "R": cspec.R,
        "n_samp": gspec.n_samp,
        "psi": psi.name,
    }
    metadata = {
        "conservation_drift": drift,
        "accepted_fraction": float(np.mean(accepted)),
        "effective_sample_size": effective_sample_size(log_w),
        "max_abs_log_density": float(np.max(np.abs(log_f))) if log_f.size else 0.0,
    }
    return _verdict(test, stats, _drift_budget(psi, drift), z_threshold, seed, params, metadata)


def _check_consistent(gspec: GaussianSpec, cspec: CutoffSpec, model: ModelKind) -> None:
    if gspec.model != model or cspec.model != model:
        raise ValidationError(
            "Gaussian and cut-off specifications must both describe the model",
            field="model",
            context={"expected": model.value},
        )
    if cspec.N > gspec.n_samp:
        raise ValidationError(
            "cut-off truncation exceeds the sampled band",
            field="N",
            context={"N": cspec.N, "n_samp": gspec.n_samp},
        )


def quasi_invariance_test_bbm(
    gspec: GaussianSpec,
    cspec: CutoffSpec,
    psi: TestFunction,
    t: float,
    count: int,
    seed: int,
    dt: float = 1e-3,
    integrator: IntegratorKind = IntegratorKind.RK4,
    threads: Optional[int] = None,
    z_threshold: float = constants.DEFAULT_Z_THRESHOLD,
) -> VerdictReport:
    """
    Paired test of E_rho[psi(u)] = E_rho[psi(Phi_t u) f(t, u)] for rho_{s,N}.

    Raises:
        EstimationError: every sample rejected by the rigid cut-off
    """
    _check_consistent(gspec, cspec, ModelKind.BBM)
    if cspec.s != gspec.s:
        raise ValidationError(
            "cut-off and Gaussian regularity differ", field="s", context={"gaussian": gspec.s, "cutoff": cspec.s}
        )
    params = BbmParams(beta=float(gspec.beta), N=cspec.N, dt=dt, integrator=integrator)  # type: ignore[arg-type]
    model = BbmDensityModel(params, float(cspec.s), cspec.r)  # type: ignore[arg-type]
    return _quasi_invariance(
        "quasi_invariance_bbm", model, gspec, cspec, psi, t, count, seed, None, threads, z_threshold
    )


def quasi_invariance_test_nls(
    gspec: GaussianSpec,
    cspec: CutoffSpec,
    corr: Optional[ModifiedEnergy],
    psi: TestFunction,
    t: float,
    count: int,
    seed: int,
    dt: float = 1e-3,
    integrator: IntegratorKind = IntegratorKind.IMPLICIT_MIDPOINT,
    threads: Optional[int] = None,
    z_threshold: float = constants.DEFAULT_Z_THRESHOLD,
) -> VerdictReport:
    """NLS counterpart of ``quasi_invariance_test_bbm``; W includes ``corr``."""
    _check_consistent(gspec, cspec, ModelKind.NLS)
    if cspec.k != gspec.k:
        raise ValidationError(
            "cut-off and Gaussian energy orders differ", field="k", context={"gaussian": gspec.k, "cutoff": cspec.k}
        )
    params = NlsParams(N=cspec.N, dt=dt, integrator=integrator, k=int(cspec.k))  # type: ignore[arg-type]
    model = NlsDensityModel(params, int(cspec.k), cspec.r, corr, gspec.complex_variance)  # type: ignore[arg-type]
    return _quasi_invariance(
        "quasi_invariance_nls", model, gspec, cspec, psi, t, count, seed, corr, threads, z_threshold
    )


# -- L^p bounds of the density ----------------------------------------------


@dataclass
class LpEstimate:
    """Self-normalized estimate of int f(t, u)^p d rho / int d rho."""
    estimate: float
    standard_error: float
    effective_sample_size: float
    p: float
    t: float

    @property
    def root(self) -> float:
        """estimate^{1/p}, the L^p norm of f."""
        return float(self.estimate ** (1.0 / self.p))


def density_lp_estimate(
    ens: WeightedEnsemble,
    t: float,
    p: float,
    model: DensityModel,
    t_bar: float = constants.DEFAULT_NLS_T_BAR,
    threads: Optional[int] = None,
) -> LpEstimate:
    """
    Estimate ||f(t, .)||_{L^p(rho)}^p from a weighted ensemble.

    For NLS the estimate is only defined for |t| <= t_bar.

    Raises:
        EstimationError: effective sample size below 10
    """
    if p < 1.0:
        raise ValidationError("p must be >= 1", field="p", context={"p": p})
    if ens.gaussian.model != model.model:
        raise ValidationError("ensemble and density model differ", field="model")
    if model.model == ModelKind.NLS and abs(t) > t_bar:
        raise ValidationError(
            "nls density moments are only evaluated inside the time window",
            field="t",
            context={"t": t, "t_bar": t_bar},
        )
    ess = ens.effective_sample_size()
    if ess < constants.MIN_EFFECTIVE_SAMPLE_SIZE:
        raise EstimationError(
            "effective sample size too small for a density moment",
            effective_sample_size=ess,
            context={"count": len(ens)},
        )
    if t == 0.0:
        return LpEstimate(1.0, 0.0, ess, p, t)

    accepted = np.isfinite(ens.log_weights)
    kept = ens.coeffs[accepted]
    log_w = ens.log_weights[accepted]
    evolved = model.evolve_batch(kept, t, threads)
    log_f = model.w_array(kept) - model.w_array(evolved)

    normalized = np.exp(log_w - logsumexp(log_w))
    estimate = float(np.exp(logsumexp(log_w + p * log_f) - logsumexp(log_w)))
    values = np.exp(p * log_f)
    se = float(np.sqrt(np.sum(normalized**2 * (values - estimate) ** 2)))
    logger.debug("density L^%g moment at t=%g: %.6g +/- %.2g (ess %.1f)", p, t, estimate, se, ess)
    return LpEstimate(estimate, se, ess, p, t)


# -- Liouville --------------------------------------------------------------


def _real_coordinates(n_max: int, reality: Reality) -> List[tuple]:
    """(mode offset, component) pairs spanning the real coordinates of E_N."""
    if reality == Reality.REAL:
        coords = [(0, 0)]
        for n in range(1, n_max + 1):
            coords.extend([(n, 0), (n, 1)])
        return coords
    return [(n, part) for n in range(-n_max, n_max + 1) for part in (0, 1)]


def jacobian_divergence_check(u: TorusField, p: FlowParams, step: float = 1e-4) -> float:
    """
    Divergence of the truncated vector field on E_N at P_N u.

    Fourth-order centered differences of the right-hand side along every real
    coordinate of the retained modes; the exact value is 0.
    """
    N = min(p.N, u.n_max)
    base = u.resized(N).coeffs
    if p.model == ModelKind.BBM:
        if not u.is_real:
            raise ValidationError("the bbm flow acts on real fields", field="reality")
        system = bbm_system(p, N, real=True)  # type: ignore[arg-type]
        reality = Reality.REAL
    else:
        system = nls_system(p, N)  # type: ignore[arg-type]
        reality = Reality.COMPLEX

    coords = _real_coordinates(N, reality)
    perturbations = np.zeros((len(coords), 2 * N + 1), dtype=complex)
    for row, (n, part) in enumerate(coords):
        unit = 1.0 if part == 0 else 1j
        perturbations[row, N + n] = unit
        if reality == Reality.REAL and n != 0:
            perturbations[row, N - n] = np.conj(unit)

    def shifted(h: float) -> np.ndarray:
        return system.rhs(base[None, :] + h * perturbations)

    near = shifted(step) - shifted(-step)
    far = shifted(2.0 * step) - shifted(-2.0 * step)
    slopes = (8.0 * near - far) / (12.0 * step)

    divergence = 0.0
    for row, (n, part) in enumerate(coords):
        component = slopes[row, N + n]
        divergence += component.real if part == 0 else component.imag
    return abs(float(divergence))


# -- Recurrence -------------------------------------------------------------


@dataclass
class RecurrenceResult:
    """Distances ||Phi_t u0 - u0||_{C^alpha} at the probe times."""
    times: np.ndarray
    distances: np.ndarray
    running_minimum: np.ndarray
    exclusion: float
    alpha: float

    @property
    def minimum_after_exclusion(self) -> float:
        tail = self.running_minimum[np.isfinite(self.running_minimum)]
        return float(tail[-1]) if tail.size else float("nan")

    def rows(self) -> List[Dict[str, float]]:
        return [
            {"t": float(t), "distance": float(d), "running_min": float(m)}
            for t, d, m in zip(self.times, self.distances, self.running_minimum)
        ]


def recurrence_experiment(
    u0: TorusField,
    alpha: float,
    p: BbmParams,
    horizon: float,
    probe_stride: float,
    exclusion: float = 1.0,
) -> RecurrenceResult:
    """
    Holder distance to the initial state along the BBM flow.

    The running minimum is tracked from the first probe with t >= exclusion;
    earlier entries are nan.
    """
    upper = (p.beta - 1.0) / 2.0
    if not 0.0 < alpha < upper:
        raise ValidationError(
            "recurrence needs 0 < alpha < (beta - 1)/2",
            field="alpha",
            context={"alpha": alpha, "beta": p.beta},
        )
    if probe_stride <= 0.0 or horizon <= 0.0:
        raise ValidationError("horizon and probe_stride must be positive", field="probe_stride")
    store_every = max(1, int(round(probe_stride / p.dt)))
    traj = integrate_bbm(u0, p, horizon, store_every=store_every)
    distances = np.array([holder_norm(traj.state(i) - u0, alpha) for i in range(len(traj))])

    running = np.full_like(distances, np.nan)
    current = np.inf
    for i, t in enumerate(traj.times):
        if t >= exclusion:
            current = min(current, distances[i])
            running[i] = current
    return RecurrenceResult(traj.times, distances, running, exclusion, alpha)


# -- Suite ------------------------------------------------------------------


@dataclass
class SuiteResult:
    reports: List[VerdictReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    @property
    def failed(self) -> List[str]:
        return [report.test for report in self.reports if not report.passed]

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def run_suite(reports: Sequence[VerdictReport]) -> SuiteResult:
    """Aggregate verdicts into one pass flag and exit code."""
    result = SuiteResult(list(reports))
    if not result.passed:
        logger.warning("suite failed: %s", ", ".join(result.failed))
    return result
