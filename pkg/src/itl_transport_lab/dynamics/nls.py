"""
Truncated quintic defocusing NLS flow

    i u_t + u_xx = P_N(|P_N u|^4 P_N u)

on complex fields, its conserved mass and energy, the modified-energy
interface and the deterministic growth diagnostics.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from itl_transport_lab.core.exceptions import ValidationError
from itl_transport_lab.core.models.enums import Reality
from itl_transport_lab.core.models.params import NlsParams
from itl_transport_lab.dynamics.bbm import DiagnosticSeries, GrowthDiagnostics
from itl_transport_lab.dynamics.integrators import SemilinearSystem, integrate_flow
from itl_transport_lab.dynamics.trajectory import Trajectory, relative_drift
from itl_transport_lab.settings import get_settings
from itl_transport_lab.spectral.field import TorusField, frequencies
from itl_transport_lab.spectral.norms import (
    hsigma_inner,
    hsigma_inner_array,
    lp_norm_pow_array,
    sobolev_norm,
    sobolev_norm_sq_array,
)
from itl_transport_lab.spectral.operators import project
from itl_transport_lab.spectral.transforms import truncated_quintic

logger = logging.getLogger(__name__)


# -- Right-hand side --------------------------------------------------------


def nls_linear_symbol(n_max: int) -> np.ndarray:
    """Symbol of i d^2/dx^2: -i n^2."""
    n = frequencies(n_max).astype(float)
    return -1j * n * n


def nls_system(p: NlsParams, n_max: int) -> SemilinearSystem:
    linear = nls_linear_symbol(n_max)
    if not p.nonlinearity_enabled:
        return SemilinearSystem(linear, None, "nls")
    N = min(p.N, n_max)

    def nonlinear(y: np.ndarray) -> np.ndarray:
        return -1j * truncated_quintic(y, N)

    return SemilinearSystem(linear, nonlinear, "nls")


def nls_rhs_array(coeffs: np.ndarray, p: NlsParams) -> np.ndarray:
    n_max = (coeffs.shape[-1] - 1) // 2
    return nls_system(p, n_max).rhs(coeffs)


def _require_complex(u: TorusField) -> None:
    if u.reality != Reality.COMPLEX:
        raise ValidationError("the NLS flow acts on complex fields", field="reality")


def nls_rhs(u: TorusField, p: NlsParams) -> TorusField:
    """i u_xx - i P_N(|P_N u|^4 P_N u); tail modes see only the linear term."""
    _require_complex(u)
    return u.with_coeffs(nls_rhs_array(u.coeffs, p))


# -- Conserved quantities and energies -------------------------------------


def mass(u: TorusField) -> float:
    """||u||_{L^2} for the normalized measure."""
    return float(np.sqrt(np.sum(np.abs(u.coeffs) ** 2)))


def energy_e1_array(coeffs: np.ndarray, real: bool = False) -> np.ndarray:
    return 0.5 * sobolev_norm_sq_array(coeffs, 1.0) + lp_norm_pow_array(coeffs, 6, real) / 6.0


def energy_e1(u: TorusField) -> float:
    """1/2 ||u||_{H^1}^2 + 1/6 ||u||_{L^6}^6, the L^6 integral by exact-degree quadrature."""
    return float(energy_e1_array(u.coeffs, u.is_real))


@dataclass(frozen=True)
class ModifiedEnergy:
    """
    Correction functional R_2k with its flow derivative.

    Contract: evaluate(0) = 0 and
    |R(u) - R(v)| <= C ||u - v||_{H^{2k-1}} (1 + ||u||^{m0} + ||v||^{m0}).

    Attributes:
        evaluate: u -> R(u)
        derivative: (u, v) -> directional derivative of R at u along v
        lipschitz_m0: exponent m0 of the Lipschitz contract
        lipschitz_constant: constant C of the Lipschitz contract
    """
    evaluate: Callable[[TorusField], float]
    derivative: Callable[[TorusField, TorusField], float]
    lipschitz_m0: int = 0
    lipschitz_constant: float = 0.0
    name: str = "correction"

    def __call__(self, u: TorusField) -> float:
        return self.evaluate(u)


def zero_correction() -> ModifiedEnergy:
    """The default R_2k = 0."""
    return ModifiedEnergy(lambda u: 0.0, lambda u, v: 0.0, 0, 0.0, "zero")


def quadratic_correction(lam: float, sigma: float) -> ModifiedEnergy:
    """R(u) = lam * ||u||_{H^sigma}^2, with m0 = 1 and C = |lam| for sigma <= 2k - 1."""
    return ModifiedEnergy(
        evaluate=lambda u: lam * sobolev_norm(u, sigma) ** 2,
        derivative=lambda u, v: 2.0 * lam * hsigma_inner(u, v, sigma),
        lipschitz_m0=1,
        lipschitz_constant=abs(lam),
        name=f"quadratic({lam:g},{sigma:g})",
    )


def modified_energy(u: TorusField, k: int, corr: Optional[ModifiedEnergy] = None) -> float:
    """E_2k(u) = 1/2 ||u||_{H^{2k}}^2 + corr(u)."""
    if k < 2:
        raise ValidationError("modified energies require k >= 2", field="k")
    corr = corr or zero_correction()
    return 0.5 * sobolev_norm(u, 2.0 * k) ** 2 + corr.evaluate(u)


def verify_lipschitz(
    corr: ModifiedEnergy,
    k: int,
    pairs: Sequence[Tuple[TorusField, TorusField]],
) -> float:
    """
    Largest observed |R(u) - R(v)| / (||u - v|| (1 + ||u||^m0 + ||v||^m0)) in H^{2k-1}.

    The contract holds on the sample when the result is <= lipschitz_constant.
    """
    if corr.evaluate(TorusField.zeros(0, Reality.COMPLEX)) != 0.0:
        raise ValidationError("correction must vanish at 0", field="corr")
    order = 2.0 * k - 1.0
    worst = 0.0
    for u, v in pairs:
        distance = sobolev_norm(u - v, order)
        if distance == 0.0:
            continue
        weight = 1.0 + sobolev_norm(u, order) ** corr.lipschitz_m0 + sobolev_norm(v, order) ** corr.lipschitz_m0
        worst = max(worst, abs(corr.evaluate(u) - corr.evaluate(v)) / (distance * weight))
    return worst


# -- Integration ------------------------------------------------------------


def _nls_diagnostics(coeffs: np.ndarray, p: NlsParams, sigmas: Sequence[float]) -> Dict[str, np.ndarray]:
    n_max = (coeffs.shape[-1] - 1) // 2
    low = np.where(np.abs(frequencies(n_max)) <= p.N, coeffs, 0.0)
    series = {
        "mass": np.sqrt(np.sum(np.abs(low) ** 2, axis=-1)),
        "energy_e1": energy_e1_array(low),
    }
    for sigma in sigmas:
        series[f"h_{sigma:g}"] = np.sqrt(sobolev_norm_sq_array(low, sigma))
    return series


def integrate_nls(
    u0: TorusField,
    p: NlsParams,
    t_final: float,
    store_every: int = 1,
    sigmas: Sequence[float] = (),
) -> Trajectory:
    """
    Integrate the truncated NLS flow; drifts of ||P_N u||_{L^2} and
    E_1(P_N u) are reported.
    """
    _require_complex(u0)
    settings = get_settings()
    result = integrate_flow(
        nls_system(p, u0.n_max),
        u0.coeffs,
        t_final,
        p.dt,
        p.integrator,
        store_every=store_every,
        blowup_threshold=settings.blowup_threshold,
        midpoint_tolerance=settings.midpoint_tolerance,
        midpoint_max_iter=settings.midpoint_max_iter,
    )
    diagnostics = _nls_diagnostics(result.states, p, sigmas)
    drift = {
        "mass": relative_drift(diagnostics["mass"]),
        "energy_e1": relative_drift(diagnostics["energy_e1"]),
    }
    return Trajectory(
        times=result.times,
        coeffs=result.states,
        reality=Reality.COMPLEX,
        params=p,
        step_size=result.step_size,
        diagnostics=diagnostics,
        drift=drift,
    )


def nls_flow_map(u0: TorusField, p: NlsParams, t: float) -> TorusField:
    return integrate_nls(u0, p, t, store_every=10**9).final


# -- Growth diagnostics -----------------------------------------------------


def nls_growth_diagnostics(
    traj: Trajectory,
    p: NlsParams,
    k: int,
    corr: Optional[ModifiedEnergy] = None,
    r: float = 2.0,
) -> GrowthDiagnostics:
    """
    Analytic derivatives along an NLS trajectory against their bounds:
    H^k growth, the modified-energy smoothing and the H^k power growth.
    """
    if k < 2:
        raise ValidationError("growth diagnostics require k >= 2", field="k")
    corr = corr or zero_correction()
    n_max = traj.n_max
    mask = np.abs(frequencies(n_max)) <= p.N
    low = np.where(mask, traj.coeffs, 0.0)
    velocity = np.where(mask, nls_rhs_array(traj.coeffs, p), 0.0)

    h_k = np.sqrt(sobolev_norm_sq_array(low, float(k)))
    h_low = np.sqrt(sobolev_norm_sq_array(low, 2.0 * k - 1.0))
    ddt_hk = 2.0 * hsigma_inner_array(low, velocity, float(k))
    ddt_energy = hsigma_inner_array(low, velocity, 2.0 * k) + np.array(
        [
            corr.derivative(TorusField(a, Reality.COMPLEX), TorusField(b, Reality.COMPLEX))
            for a, b in zip(low, velocity)
        ]
    )
    initial = traj.initial
    R = mass(project(initial, p.N)) + energy_e1(project(initial, p.N))
    series = {
        "DtH2Growth": DiagnosticSeries("DtH2Growth", ddt_hk, 1.0 + h_k**2),
        "ModifiedEnergySmoothing": DiagnosticSeries(
            "ModifiedEnergySmoothing", ddt_energy, 1.0 + h_low ** max(corr.lipschitz_m0, 0)
        ),
        "H2NLS": DiagnosticSeries(
            "H2NLS", r * h_k ** (2.0 * r - 2.0) * ddt_hk, 1.0 + h_k ** (2.0 * r)
        ),
    }
    return GrowthDiagnostics(
        times=traj.times,
        series=series,
        parameters={"k": float(k), "r": r, "R": R, "m0": float(corr.lipschitz_m0)},
    )
