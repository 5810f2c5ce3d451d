"""
Experiment handlers and the ``run`` entry point.

Each handler turns a validated ``ExperimentConfig`` into an
``ExperimentResult``; ``run_experiment`` adds run metadata, wraps runtime
failures with the experiment name and writes the artifacts.
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from itl_transport_lab.core.exceptions import ConfigurationError, ExperimentError, TransportLabError
from itl_transport_lab.core.models.enums import ExperimentKind, ModelKind
from itl_transport_lab.density.transport import (
    BbmDensityModel,
    DensityModel,
    NlsDensityModel,
    density_convergence_table,
    density_group_check,
    density_record,
)
from itl_transport_lab.dynamics.bbm import (
    bbm_growth_diagnostics,
    calibrate_contraction_constant,
    duhamel_local_solve,
    integrate_bbm,
    local_window,
)
from itl_transport_lab.dynamics.nls import integrate_nls, nls_growth_diagnostics
from itl_transport_lab.dynamics.trajectory import Trajectory
from itl_transport_lab.measures.ensemble import ensemble_sample
from itl_transport_lab.measures.gaussian import sample_gamma
from itl_transport_lab.measures.tails import tail_survival
from itl_transport_lab.runner.artifacts import ExperimentResult, run_metadata
from itl_transport_lab.runner.config import ExperimentConfig
from itl_transport_lab.runner.registry import ExperimentRegistry, experiment_registry
from itl_transport_lab.settings import get_settings
from itl_transport_lab.spectral.field import TorusField
from itl_transport_lab.verification.verifier import (
    density_lp_estimate,
    invariance_test_gamma0,
    quasi_invariance_test_bbm,
    quasi_invariance_test_nls,
    recurrence_experiment,
)

logger = logging.getLogger(__name__)


# -- Helpers ----------------------------------------------------------------


def _threads(config: ExperimentConfig) -> int:
    return config.threads or get_settings().threads


def _require_bbm(config: ExperimentConfig) -> None:
    if config.model != ModelKind.BBM:
        raise ConfigurationError(
            f"experiment {config.experiment.value} is only defined for the bbm model",
            field="model",
        )


def density_model(config: ExperimentConfig) -> DensityModel:
    if config.model == ModelKind.BBM:
        return BbmDensityModel(config.bbm_params(), config.s, config.r)
    return NlsDensityModel(
        config.nls_params(), config.k, config.r, config.correction(), config.complex_variance
    )


def _integrate(config: ExperimentConfig, u0: TorusField, sigmas=()) -> Trajectory:
    if config.model == ModelKind.BBM:
        return integrate_bbm(u0, config.bbm_params(), config.t, config.store_every, sigmas)
    return integrate_nls(u0, config.nls_params(), config.t, config.store_every, sigmas)


def _trajectory_rows(traj: Trajectory) -> List[Dict[str, Any]]:
    names = sorted(traj.diagnostics)
    return [
        {"time": float(t), **{n: float(traj.diagnostics[n][i]) for n in names}}
        for i, t in enumerate(traj.times)
    ]


def _new_result(config: ExperimentConfig) -> ExperimentResult:
    return ExperimentResult(experiment=config.experiment.value, metadata={"calibrated": {}})


# -- Handlers ---------------------------------------------------------------


@experiment_registry.handler(ExperimentKind.SAMPLE)
def sample_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Weighted ensemble written as JSON lines."""
    result = _new_result(config)
    ensemble = ensemble_sample(
        config.gaussian_spec(), config.cutoff_spec(), config.count, config.seed, config.correction()
    )
    result.writers["ensemble.jsonl"] = ensemble.save
    result.documents["ensemble_summary"] = {
        "count": len(ensemble),
        "rejected_fraction": ensemble.rejected_fraction,
        "effective_sample_size": ensemble.effective_sample_size(),
    }
    return result


@experiment_registry.handler(ExperimentKind.EVOLVE)
def evolve_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Integrate sample 0 of the seed and tabulate its conservation diagnostics."""
    result = _new_result(config)
    u0 = sample_gamma(config.gaussian_spec(), config.seed, 0)
    traj = _integrate(config, u0, sigmas=(config.sigma,))
    result.tables["trajectory"] = _trajectory_rows(traj)
    result.writers["trajectory.json"] = traj.write_json
    result.metadata["calibrated"]["drift"] = traj.drift
    return result


@experiment_registry.handler(ExperimentKind.VERIFY_INVARIANCE)
def verify_invariance_experiment(config: ExperimentConfig) -> ExperimentResult:
    _require_bbm(config)
    result = _new_result(config)
    report = invariance_test_gamma0(
        config.gaussian_spec(s=0.0),
        config.psi(),
        config.t,
        config.N,
        config.count,
        config.seed,
        dt=config.dt,
        integrator=config.bbm_params().integrator,
        threads=_threads(config),
        z_threshold=config.z_threshold,
    )
    result.verdicts.append(report)
    result.metadata["calibrated"]["drift_budget"] = report.drift_budget
    return result


@experiment_registry.handler(ExperimentKind.VERIFY_QUASI)
def verify_quasi_experiment(config: ExperimentConfig) -> ExperimentResult:
    result = _new_result(config)
    if config.model == ModelKind.BBM:
        report = quasi_invariance_test_bbm(
            config.gaussian_spec(),
            config.cutoff_spec(),
            config.psi(),
            config.t,
            config.count,
            config.seed,
            dt=config.dt,
            integrator=config.bbm_params().integrator,
            threads=_threads(config),
            z_threshold=config.z_threshold,
        )
    else:
        report = quasi_invariance_test_nls(
            config.gaussian_spec(),
            config.cutoff_spec(),
            config.correction(),
            config.psi(),
            config.t,
            config.count,
            config.seed,
            dt=config.dt,
            integrator=config.nls_params().integrator,
            threads=_threads(config),
            z_threshold=config.z_threshold,
        )
    result.verdicts.append(report)
    result.metadata["calibrated"]["drift_budget"] = report.drift_budget
    return result


@experiment_registry.handler(ExperimentKind.DENSITY_CONVERGENCE)
def density_convergence_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Convergence-in-N tables, quadrature/endpoint records and group residuals."""
    result = _new_result(config)
    model = density_model(config)
    band = max(config.n_samp or 0, max(config.N_list), config.N)
    gspec = config.gaussian_spec(n_samp=band)

    convergence: List[Dict[str, Any]] = []
    records = []
    group_rows: List[Dict[str, Any]] = []
    for i in range(config.trajectories):
        u0 = sample_gamma(gspec, config.seed, i)
        table = density_convergence_table(u0, config.t, config.N_list, model)
        convergence.extend({"sample_id": i, **row} for row in table.rows())
        records.append(density_record(u0, config.t, model, config.store_every, sample_id=i))
        check = density_group_check(u0, config.t, config.s_shift, model)
        group_rows.append(
            {
                "sample_id": i,
                "cocycle_residual": check.cocycle_residual,
                "reversal_residual": check.reversal_residual,
                "composition_gap": check.composition_gap,
            }
        )

    result.tables["convergence"] = convergence
    result.tables["density_records"] = [r.row() for r in records]
    result.tables["group_check"] = group_rows
    result.metadata["calibrated"].update(
        {
            "proven_range": model.in_proven_range,
            "max_quadrature_residual": max(r.residual for r in records),
        }
    )
    return result


@experiment_registry.handler(ExperimentKind.DENSITY_LP)
def density_lp_experiment(config: ExperimentConfig) -> ExperimentResult:
    result = _new_result(config)
    model = density_model(config)
    ensemble = ensemble_sample(
        config.gaussian_spec(), config.cutoff_spec(), config.count, config.seed, config.correction()
    )
    rows = []
    for p in config.p_values:
        estimate = density_lp_estimate(
            ensemble, config.t, p, model, t_bar=config.t_bar, threads=_threads(config)
        )
        rows.append(
            {
                "p": p,
                "estimate": estimate.estimate,
                "se": estimate.standard_error,
                "root": estimate.root,
                "effective_sample_size": estimate.effective_sample_size,
            }
        )
    result.tables["density_lp"] = rows
    result.metadata["calibrated"]["t_bar"] = config.t_bar
    return result


@experiment_registry.handler(ExperimentKind.GROWTH_BOUNDS)
def growth_bounds_experiment(config: ExperimentConfig) -> ExperimentResult:
    """
    Maximum ratios of the deterministic inequalities per trajectory; for bbm
    optionally calibrates c_cal and records Duhamel contraction factors.
    """
    result = _new_result(config)
    gspec = config.gaussian_spec()
    summary: List[Dict[str, Any]] = []
    for i in range(config.trajectories):
        u0 = sample_gamma(gspec, config.seed, i)
        traj = _integrate(config, u0)
        if config.model == ModelKind.BBM:
            diagnostics = bbm_growth_diagnostics(
                traj, config.bbm_params(), config.sigma, config.alpha, config.s, config.r
            )
        else:
            diagnostics = nls_growth_diagnostics(
                traj, config.nls_params(), config.k, config.correction(), config.r
            )
        if i == 0:
            result.tables["growth_series"] = diagnostics.rows()
        summary.append({"sample_id": i, **diagnostics.max_ratios()})
    result.tables["growth_bounds"] = summary

    if config.model == ModelKind.BBM and config.calibration_probes > 0:
        params = config.bbm_params()
        probes = [
            sample_gamma(gspec, config.seed, config.trajectories + j)
            for j in range(config.calibration_probes)
        ]
        c_cal = calibrate_contraction_constant(params, config.alpha, probes)
        result.metadata["calibrated"]["c_cal"] = c_cal
        windows = []
        for j, probe in enumerate(probes):
            T = local_window(probe, config.alpha, c_cal)
            solved = duhamel_local_solve(probe, params, T)
            windows.append({"probe": j, "T": T, "contraction_factor": solved.contraction_factor})
        result.tables["local_windows"] = windows
    return result


@experiment_registry.handler(ExperimentKind.TAILS)
def tails_experiment(config: ExperimentConfig) -> ExperimentResult:
    _require_bbm(config)
    result = _new_result(config)
    ensemble = ensemble_sample(config.gaussian_spec(), config.cutoff_spec(), config.count, config.seed)
    curve = tail_survival(ensemble, config.varsigma, config.kappa, config.N, config.thresholds)
    result.tables["tails"] = list(curve.rows())
    result.documents["tail_exponents"] = {
        "a": curve.a,
        "b": curve.b,
        "log_survival_slope": curve.fit_log_survival_slope(),
    }
    return result


@experiment_registry.handler(ExperimentKind.RECURRENCE)
def recurrence_experiment_handler(config: ExperimentConfig) -> ExperimentResult:
    _require_bbm(config)
    result = _new_result(config)
    u0 = sample_gamma(config.gaussian_spec(), config.seed, 0)
    recurrence = recurrence_experiment(
        u0, config.alpha, config.bbm_params(), config.horizon, config.probe_stride, config.exclusion
    )
    result.tables["recurrence"] = recurrence.rows()
    result.documents["recurrence_summary"] = {
        "minimum_after_exclusion": recurrence.minimum_after_exclusion,
        "exclusion": recurrence.exclusion,
        "alpha": recurrence.alpha,
    }
    return result


# -- Entry point ------------------------------------------------------------


def run_experiment(
    config: ExperimentConfig,
    out_dir: Optional[Union[str, Path]] = None,
    registry: ExperimentRegistry = experiment_registry,
) -> ExperimentResult:
    """
    Execute the configured experiment and write its artifacts.

    The output directory is ``out_dir``, else ``config.output_dir``, else the
    runtime settings default.

    Raises:
        ConfigurationError: experiment not applicable to the configured model
        ExperimentError: any runtime failure, with the experiment name in context
    """
    handler = registry.require(config.experiment)
    name = config.experiment.value
    logger.info("Starting experiment %s (model=%s, seed=%d)", name, config.model.value, config.seed)
    try:
        result = handler(config)
    except ConfigurationError:
        raise
    except TransportLabError as e:
        raise ExperimentError(f"{name} failed: {e.message}", experiment=name, original_error=e) from e
    except Exception as e:
        raise ExperimentError(f"{name} failed: {e}", experiment=name, original_error=e) from e

    result.metadata = run_metadata(config, result.metadata.get("calibrated", {}))
    target = Path(out_dir or config.output_dir or get_settings().output_dir)
    result.write_to(target)
    logger.info("Finished experiment %s: %s", name, "pass" if result.passed else "fail")
    return result
