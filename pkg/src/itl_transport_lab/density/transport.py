"""
Jacobi density of the transported cut-off measures.

For the truncated flow the log-density is

    log f(t, u) = int_0^t Gamma(Phi_tau u) dtau = W(u) - W(Phi_t u),

where W is the exponential weight plus the Gaussian energy of the projected
field and Gamma = -dW/dt along the flow. Gamma is evaluated by the chain rule
on the right-hand side, never by differencing stored norms.
"""
import csv
import io
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy import integrate as sp_integrate

from itl_transport_lab.core.exceptions import ValidationError
from itl_transport_lab.core.models import constants
from itl_transport_lab.core.models.enums import ModelKind, Reality
from itl_transport_lab.core.models.params import BbmParams, NlsParams
from itl_transport_lab.dynamics.bbm import bbm_system, integrate_bbm
from itl_transport_lab.dynamics.integrators import SemilinearSystem, evolve_batch
from itl_transport_lab.dynamics.nls import (
    ModifiedEnergy,
    energy_e1_array,
    integrate_nls,
    nls_system,
    zero_correction,
)
from itl_transport_lab.dynamics.trajectory import Trajectory
from itl_transport_lab.settings import get_settings
from itl_transport_lab.spectral.field import TorusField, frequencies
from itl_transport_lab.spectral.norms import hsigma_inner_array, sobolev_norm_sq_array

logger = logging.getLogger(__name__)


class DensityModel(ABC):
    """
    A truncated flow together with the functional W whose decrease along the
    flow is the log-density of the transported measure.
    """

    params: Union[BbmParams, NlsParams]

    @property
    @abstractmethod
    def reality(self) -> Reality: ...

    @property
    def model(self) -> ModelKind:
        return self.params.model

    @property
    def N(self) -> int:
        return self.params.N

    @abstractmethod
    def system(self, n_max: int) -> SemilinearSystem:
        """Split right-hand side on a band of half-width n_max."""

    @abstractmethod
    def w_array(self, coeffs: np.ndarray) -> np.ndarray:
        """W of each row of a band array."""

    @abstractmethod
    def gamma_array(self, coeffs: np.ndarray) -> np.ndarray:
        """Gamma = -dW/dt of each row of a band array."""

    @abstractmethod
    def conserved_array(self, coeffs: np.ndarray) -> np.ndarray:
        """The quantity the truncated flow conserves, used for drift budgets."""

    @abstractmethod
    def integrate(self, u0: TorusField, t: float, store_every: int = 1) -> Trajectory: ...

    @abstractmethod
    def with_truncation(self, N: int) -> "DensityModel": ...

    @property
    def in_proven_range(self) -> bool:
        return True

    def describe(self) -> Dict[str, Any]:
        return {"model": self.model.value, "params": self.params.model_dump(mode="json")}

    # -- Shared behaviour ----------------------------------------------------

    def _project(self, coeffs: np.ndarray) -> np.ndarray:
        n_max = (coeffs.shape[-1] - 1) // 2
        return np.where(np.abs(frequencies(n_max)) <= self.N, coeffs, 0.0)

    def _projected_velocity(self, coeffs: np.ndarray) -> np.ndarray:
        n_max = (coeffs.shape[-1] - 1) // 2
        return self._project(self.system(n_max).rhs(coeffs))

    def W(self, u: TorusField) -> float:
        return float(self.w_array(u.coeffs))

    def gamma(self, u: TorusField) -> float:
        return float(self.gamma_array(u.coeffs))

    def flow_map(self, u: TorusField, t: float) -> TorusField:
        return self.integrate(u, t, store_every=10**9).final

    def evolve_batch(self, coeffs: np.ndarray, t: float, threads: Optional[int] = None) -> np.ndarray:
        """Phi_t of every row; thread count defaults to the runtime settings."""
        settings = get_settings()
        n_max = (coeffs.shape[-1] - 1) // 2
        return evolve_batch(
            self.system(n_max),
            coeffs,
            t,
            self.params.dt,
            self.params.integrator,
            threads=threads or settings.threads,
            blowup_threshold=settings.blowup_threshold,
            midpoint_tolerance=settings.midpoint_tolerance,
            midpoint_max_iter=settings.midpoint_max_iter,
        )


class BbmDensityModel(DensityModel):
    """
    W(u) = ||P_N u||_{H^s}^{2r} + 1/2 ||P_N u||_{H^{s+beta/2}}^2.

    The density formula is established for s > 3/2; values for
    beta/2 < s <= 3/2 are computed and tagged outside the proven range.
    """

    def __init__(self, params: BbmParams, s: float, r: float) -> None:
        if s <= params.beta / 2.0:
            raise ValidationError(
                "bbm densities need s > beta/2", field="s", context={"s": s, "beta": params.beta}
            )
        if r <= 2.0:
            raise ValidationError("bbm densities need r > 2", field="r", context={"r": r})
        self.params = params
        self.s = s
        self.r = r

    @property
    def reality(self) -> Reality:
        return Reality.REAL

    @property
    def in_proven_range(self) -> bool:
        return self.s > constants.PROVEN_DENSITY_MIN_S

    def system(self, n_max: int) -> SemilinearSystem:
        return bbm_system(self.params, n_max, real=True)

    def w_array(self, coeffs: np.ndarray) -> np.ndarray:
        low = self._project(coeffs)
        return sobolev_norm_sq_array(low, self.s) ** self.r + 0.5 * sobolev_norm_sq_array(
            low, self.s + self.params.beta / 2.0
        )

    def gamma_array(self, coeffs: np.ndarray) -> np.ndarray:
        low = self._project(coeffs)
        velocity = self._projected_velocity(coeffs)
        norm_sq = sobolev_norm_sq_array(low, self.s)
        weight_rate = 2.0 * self.r * norm_sq ** (self.r - 1.0) * hsigma_inner_array(low, velocity, self.s)
        gaussian_rate = hsigma_inner_array(low, velocity, self.s + self.params.beta / 2.0)
        return -(weight_rate + gaussian_rate)

    def conserved_array(self, coeffs: np.ndarray) -> np.ndarray:
        return np.sqrt(sobolev_norm_sq_array(coeffs, self.params.beta / 2.0))

    def integrate(self, u0: TorusField, t: float, store_every: int = 1) -> Trajectory:
        return integrate_bbm(u0, self.params, t, store_every=store_every)

    def with_truncation(self, N: int) -> "BbmDensityModel":
        return BbmDensityModel(self.params.model_copy(update={"N": N}), self.s, self.r)

    def describe(self) -> Dict[str, Any]:
        return {**super().describe(), "s": self.s, "r": self.r, "proven_range": self.in_proven_range}


class NlsDensityModel(DensityModel):
    """
    W(u) = ||P_N u||_{H^{2k-1}}^{2r} + ||P_N u||_{H^{2k}}^2 / v + corr(P_N u),

    with v = E|g_n|^2 of the underlying complex Gaussians.
    """

    def __init__(
        self,
        params: NlsParams,
        k: int,
        r: float,
        corr: Optional[ModifiedEnergy] = None,
        complex_variance: float = 1.0,
    ) -> None:
        if k < 2:
            raise ValidationError("nls densities need k >= 2", field="k")
        if r <= 0.0:
            raise ValidationError("nls densities need r > 0", field="r")
        if complex_variance <= 0.0:
            raise ValidationError("complex_variance must be positive", field="complex_variance")
        self.params = params
        self.k = k
        self.r = r
        self.corr = corr or zero_correction()
        self.complex_variance = complex_variance

    @property
    def reality(self) -> Reality:
        return Reality.COMPLEX

    def system(self, n_max: int) -> SemilinearSystem:
        return nls_system(self.params, n_max)

    def _corr_values(self, low: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(low)
        values = np.array([self.corr.evaluate(TorusField(row, Reality.COMPLEX)) for row in rows])
        return values.reshape(low.shape[:-1])

    def w_array(self, coeffs: np.ndarray) -> np.ndarray:
        low = self._project(coeffs)
        weight = sobolev_norm_sq_array(low, 2.0 * self.k - 1.0) ** self.r
        gaussian = sobolev_norm_sq_array(low, 2.0 * self.k) / self.complex_variance
        return weight + gaussian + self._corr_values(low)

    def gamma_array(self, coeffs: np.ndarray) -> np.ndarray:
        low = self._project(coeffs)
        velocity = self._projected_velocity(coeffs)
        order = 2.0 * self.k - 1.0
        norm_sq = sobolev_norm_sq_array(low, order)
        weight_rate = 2.0 * self.r * norm_sq ** (self.r - 1.0) * hsigma_inner_array(low, velocity, order)
        gaussian_rate = (2.0 / self.complex_variance) * hsigma_inner_array(low, velocity, 2.0 * self.k)
        rows_low, rows_vel = np.atleast_2d(low), np.atleast_2d(velocity)
        corr_rate = np.array(
            [
                self.corr.derivative(TorusField(a, Reality.COMPLEX), TorusField(b, Reality.COMPLEX))
                for a, b in zip(rows_low, rows_vel)
            ]
        ).reshape(low.shape[:-1])
        return -(weight_rate + gaussian_rate + corr_rate)

    def conserved_array(self, coeffs: np.ndarray) -> np.ndarray:
        low = self._project(coeffs)
        return np.sqrt(np.sum(np.abs(low) ** 2, axis=-1)) + energy_e1_array(low)

    def integrate(self, u0: TorusField, t: float, store_every: int = 1) -> Trajectory:
        return integrate_nls(u0, self.params, t, store_every=store_every)

    def with_truncation(self, N: int) -> "NlsDensityModel":
        return NlsDensityModel(
            self.params.model_copy(update={"N": N}), self.k, self.r, self.corr, self.complex_variance
        )

    def describe(self) -> Dict[str, Any]:
        return {
            **super().describe(),
            "k": self.k,
            "r": self.r,
            "correction": self.corr.name,
            "complex_variance": self.complex_variance,
        }


# -- Generators and log-densities -------------------------------------------


def gamma_bbm(u: TorusField, p: BbmParams, s: float, r: float) -> float:
    """-d/dt (||P_N u||_{H^s}^{2r} + 1/2 ||P_N u||_{H^{s+beta/2}}^2) along the flow."""
    return BbmDensityModel(p, s, r).gamma(u)


def gamma_nls(
    u: TorusField,
    p: NlsParams,
    k: int,
    r: float,
    corr: Optional[ModifiedEnergy] = None,
    complex_variance: float = 1.0,
) -> float:
    """-d/dt W along the truncated NLS flow, W as in ``NlsDensityModel``."""
    return NlsDensityModel(p, k, r, corr, complex_variance).gamma(u)


def log_density_quadrature(traj: Trajectory, model: DensityModel) -> float:
    """
    Composite Simpson value of int_0^t Gamma over the stored trajectory.

    A single state at t = 0 gives 0; otherwise at least three stored states
    are required.
    """
    if len(traj) == 1 and traj.times[0] == 0.0:
        return 0.0
    if len(traj) < 3:
        raise ValidationError(
            "quadrature needs at least three stored states",
            field="store_every",
            context={"stored": len(traj)},
        )
    series = model.gamma_array(traj.coeffs)
    return float(sp_integrate.simpson(series, x=traj.times))


def log_density_endpoint(u_start: TorusField, u_end: TorusField, model: DensityModel) -> float:
    """W(u_start) - W(u_end)."""
    if u_start.n_max != u_end.n_max:
        raise ValidationError(
            "endpoint states must share a band",
            field="n_max",
            context={"start": u_start.n_max, "end": u_end.n_max},
        )
    return model.W(u_start) - model.W(u_end)


# -- Records ----------------------------------------------------------------


@dataclass
class DensityRecord:
    """One density evaluation along a trajectory started at u0."""
    t: float
    log_f_quadrature: float
    log_f_endpoint: float
    gamma_series: np.ndarray
    times: np.ndarray
    N: int
    sample_id: int = 0
    proven_range: bool = True

    @property
    def residual(self) -> float:
        return abs(self.log_f_quadrature - self.log_f_endpoint)

    def row(self) -> Dict[str, Any]:
        return {
            "sample_id": self.sample_id,
            "t": self.t,
            "N": self.N,
            "log_f_quad": self.log_f_quadrature,
            "log_f_end": self.log_f_endpoint,
            "residual": self.residual,
        }


def density_record(
    u0: TorusField, t: float, model: DensityModel, store_every: int = 1, sample_id: int = 0
) -> DensityRecord:
    """Integrate once and evaluate the log-density both ways."""
    traj = model.integrate(u0, t, store_every=store_every)
    return DensityRecord(
        t=t,
        log_f_quadrature=log_density_quadrature(traj, model),
        log_f_endpoint=log_density_endpoint(traj.initial, traj.final, model),
        gamma_series=model.gamma_array(traj.coeffs),
        times=traj.times,
        N=model.N,
        sample_id=sample_id,
        proven_range=model.in_proven_range,
    )


def density_records_to_csv(records: Sequence[DensityRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(
        buffer,
        fieldnames=["sample_id", "t", "N", "log_f_quad", "log_f_end", "residual"],
        lineterminator="\n",
    )
    writer.writeheader()
    for record in records:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in record.row().items()})
    return buffer.getvalue()


def write_density_records(records: Sequence[DensityRecord], path: Union[str, Path]) -> Path:
    target = Path(path)
    target.write_text(density_records_to_csv(records))
    return target


# -- Convergence in N and group property ------------------------------------


@dataclass
class ConvergenceTable:
    """log f_N(t, u0) for a list of truncations and the successive differences."""
    t: float
    truncations: List[int]
    log_densities: List[float]
    differences: List[float] = field(default_factory=list)

    def inversions(self) -> int:
        """Number of places where |difference| grows from one step to the next."""
        magnitudes = [abs(d) for d in self.differences]
        return sum(1 for a, b in zip(magnitudes, magnitudes[1:]) if b > a)

    def rows(self) -> List[Dict[str, float]]:
        rows = []
        for i, (N, value) in enumerate(zip(self.truncations, self.log_densities)):
            rows.append(
                {
                    "N": N,
                    "log_f": value,
                    "difference": self.differences[i - 1] if i > 0 else 0.0,
                }
            )
        return rows


def density_convergence_table(
    u0: TorusField, t: float, N_list: Sequence[int], model: DensityModel
) -> ConvergenceTable:
    """Endpoint log-densities of u0 at time t for each truncation in N_list."""
    if not N_list:
        raise ValidationError("N_list is empty", field="N_list")
    if max(N_list) > u0.n_max:
        raise ValidationError(
            "truncations exceed the band of u0",
            field="N_list",
            context={"max_N": max(N_list), "n_max": u0.n_max},
        )
    values = []
    for N in N_list:
        truncated = model.with_truncation(N)
        end = truncated.flow_map(u0, t)
        values.append(log_density_endpoint(u0, end, truncated))
    differences = [b - a for a, b in zip(values, values[1:])]
    logger.debug("density convergence at t=%g over N=%s", t, list(N_list))
    return ConvergenceTable(t, list(N_list), values, differences)


@dataclass
class GroupCheck:
    """
    Residuals of the cocycle identity log f(t+s) = log f(t) + log f(s, Phi_t)
    and of the endpoint reversal log f(t) + log f(-t, Phi_t) = 0.
    """
    cocycle_residual: float
    reversal_residual: float
    composition_gap: float


def density_group_check(u0: TorusField, t: float, s_shift: float, model: DensityModel) -> GroupCheck:
    """
    Endpoint-formula residuals of the group property.

    ``composition_gap`` is the L^2 distance between Phi_{t+s} u0 integrated
    directly and Phi_s Phi_t u0.
    """
    u_t = model.flow_map(u0, t)
    u_ts = model.flow_map(u_t, s_shift)
    direct = model.flow_map(u0, t + s_shift)

    log_f_total = log_density_endpoint(u0, direct, model)
    log_f_first = log_density_endpoint(u0, u_t, model)
    log_f_second = log_density_endpoint(u_t, u_ts, model)
    cocycle = abs(log_f_total - log_f_first - log_f_second)
    reversal = abs(log_f_first + log_density_endpoint(u_t, u0, model))
    gap = float(np.sqrt(np.sum(np.abs(direct.coeffs - u_ts.coeffs) ** 2)))
    return GroupCheck(cocycle, reversal, gap)


def reversal_residual(u0: TorusField, t: float, model: DensityModel) -> Dict[str, float]:
    """
    Integrate forward to t and back to 0.

    Returns the L^2 distance of the returned state to u0 and
    |log f(t, u0) + log f(-t, Phi_t u0)| with both densities taken from the
    integrated endpoints.
    """
    u_t = model.flow_map(u0, t)
    back = model.flow_map(u_t, -t)
    forward = log_density_endpoint(u0, u_t, model)
    backward = log_density_endpoint(u_t, back, model)
    return {
        "state": float(np.sqrt(np.sum(np.abs(back.coeffs - u0.coeffs) ** 2))),
        "log_density": abs(forward + backward),
    }
