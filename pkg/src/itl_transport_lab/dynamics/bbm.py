"""
Truncated fractional BBM flow

    u_t + L_beta u + L_beta P_N((P_N u)^2) = 0,   L_beta = d/dx / (1 + |D|^beta)

on real fields: right-hand side, time integration, the Duhamel fixed-point
solver, flow comparison across truncations and the deterministic growth
diagnostics.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize as sp_optimize

from itl_transport_lab.core.exceptions import ConvergenceError, ValidationError
from itl_transport_lab.core.models import constants
from itl_transport_lab.core.models.enums import Reality
from itl_transport_lab.core.models.params import BbmParams
from itl_transport_lab.dynamics.integrators import SemilinearSystem, integrate_flow
from itl_transport_lab.dynamics.trajectory import Trajectory, relative_drift
from itl_transport_lab.settings import get_settings
from itl_transport_lab.spectral.field import TorusField, frequencies
from itl_transport_lab.spectral.norms import (
    besov_holder_proxy,
    holder_norm,
    sobolev_norm,
    sobolev_norm_sq_array,
    sup_norm,
    w1inf_norm,
)
from itl_transport_lab.spectral.operators import bessel_potential, energy_multiplier, m1, m2
from itl_transport_lab.spectral.transforms import band_to_grid, product_grid_size, truncated_square

logger = logging.getLogger(__name__)


# -- Right-hand side --------------------------------------------------------


def bbm_linear_symbol(beta: float, n_max: int) -> np.ndarray:
    """Symbol of -L_beta: -i n / (1 + |n|^beta)."""
    n = frequencies(n_max)
    return -1j * n / (1.0 + np.abs(n).astype(float) ** beta)


def bbm_system(p: BbmParams, n_max: int, real: bool = True) -> SemilinearSystem:
    linear = bbm_linear_symbol(p.beta, n_max)
    if not p.nonlinearity_enabled:
        return SemilinearSystem(linear, None, "bbm")
    N = min(p.N, n_max)

    def nonlinear(y: np.ndarray) -> np.ndarray:
        return linear * truncated_square(y, N, real)

    return SemilinearSystem(linear, nonlinear, "bbm")


def bbm_rhs_array(coeffs: np.ndarray, p: BbmParams, real: bool = True) -> np.ndarray:
    n_max = (coeffs.shape[-1] - 1) // 2
    return bbm_system(p, n_max, real).rhs(coeffs)


def bbm_rhs(u: TorusField, p: BbmParams) -> TorusField:
    """-L_beta u - L_beta P_N((P_N u)^2); modes |n| > N see only the linear term."""
    return u.with_coeffs(bbm_rhs_array(u.coeffs, p, u.is_real))


def linear_bbm_flow(u: TorusField, beta: float, t: float) -> TorusField:
    """Exact linear propagator: coeffs(n) -> e^{-i t n / (1 + |n|^beta)} coeffs(n)."""
    return u.with_coeffs(np.exp(t * bbm_linear_symbol(beta, u.n_max)) * u.coeffs)


# -- Integration ------------------------------------------------------------


def _bbm_diagnostics(
    coeffs: np.ndarray, p: BbmParams, sigmas: Sequence[float]
) -> Dict[str, np.ndarray]:
    n_max = (coeffs.shape[-1] - 1) // 2
    low = np.where(np.abs(frequencies(n_max)) <= p.N, coeffs, 0.0)
    series = {"h_beta_half": np.sqrt(sobolev_norm_sq_array(low, p.beta / 2.0))}
    for sigma in sigmas:
        series[f"h_{sigma:g}"] = np.sqrt(sobolev_norm_sq_array(low, sigma))
    return series


def integrate_bbm(
    u0: TorusField,
    p: BbmParams,
    t_final: float,
    store_every: int = 1,
    sigmas: Sequence[float] = (),
) -> Trajectory:
    """
    Integrate the truncated BBM flow from 0 to t_final (may be negative).

    The trajectory reports the relative drift of ||P_N u(t)||_{H^{beta/2}},
    which the exact truncated flow conserves.

    Raises:
        FlowBlowUpError: with the first time at which the guard fired
    """
    settings = get_settings()
    system = bbm_system(p, u0.n_max, u0.is_real)
    result = integrate_flow(
        system,
        u0.coeffs,
        t_final,
        p.dt,
        p.integrator,
        store_every=store_every,
        blowup_threshold=settings.blowup_threshold,
        midpoint_tolerance=settings.midpoint_tolerance,
        midpoint_max_iter=settings.midpoint_max_iter,
    )
    diagnostics = _bbm_diagnostics(result.states, p, sigmas)
    drift = {"h_beta_half": relative_drift(diagnostics["h_beta_half"])}
    return Trajectory(
        times=result.times,
        coeffs=result.states,
        reality=u0.reality,
        params=p,
        step_size=result.step_size,
        diagnostics=diagnostics,
        drift=drift,
    )


def bbm_flow_map(u0: TorusField, p: BbmParams, t: float) -> TorusField:
    """Phi_t^N u0 without keeping intermediate states."""
    return integrate_bbm(u0, p, t, store_every=10**9).final


# -- Duhamel fixed point ----------------------------------------------------


@dataclass
class DuhamelResult:
    """Fixed point of the Duhamel map sampled at the final time."""
    state: TorusField
    contraction_factor: float
    iterations: int
    times: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))


def duhamel_local_solve(
    u0: TorusField,
    p: BbmParams,
    T: float,
    tol: float = 1e-12,
    max_iter: int = 60,
    subintervals: int = constants.DUHAMEL_SUBINTERVALS,
) -> DuhamelResult:
    """
    Picard iteration of u(t) = e^{tA} u0 + int_0^t e^{(t-s)A} F(u(s)) ds.

    A = -L_beta is applied exactly per mode and the integral uses the
    composite trapezoid rule on ``subintervals`` pieces of [0, T]. The
    contraction factor is the largest ratio of sup-norm distances between
    successive iterates.

    Raises:
        ConvergenceError: no fixed point within max_iter (T outside the
            contraction regime)
    """
    n_max = u0.n_max
    A = bbm_linear_symbol(p.beta, n_max)
    N = min(p.N, n_max)
    real = u0.is_real
    times = np.linspace(0.0, T, subintervals + 1)
    forward = np.exp(np.outer(times, A))
    backward = np.conj(forward)
    grid = product_grid_size(n_max, n_max)

    def duhamel_map(path: np.ndarray) -> np.ndarray:
        if not p.nonlinearity_enabled:
            return forward * u0.coeffs
        integrand = backward * (A * truncated_square(path, N, real))
        accumulated = sp_integrate.cumulative_trapezoid(integrand, x=times, axis=0, initial=0)
        return forward * (u0.coeffs + accumulated)

    def sup_distance(a: np.ndarray, b: np.ndarray) -> float:
        return float(np.max(np.abs(band_to_grid(a - b, grid, real))))

    path = forward * u0.coeffs
    scale = 1.0 + float(np.max(np.abs(band_to_grid(path, grid, real))))
    ratios: List[float] = []
    previous: Optional[float] = None
    for iteration in range(1, max_iter + 1):
        updated = duhamel_map(path)
        distance = sup_distance(updated, path)
        path = updated
        if previous is not None and previous > 1e-10 * scale:
            ratios.append(distance / previous)
        previous = distance
        if distance <= tol * scale:
            factor = max(ratios) if ratios else 0.0
            logger.debug("Duhamel fixed point in %d iterations, factor %.3g", iteration, factor)
            return DuhamelResult(TorusField(path[-1], u0.reality), factor, iteration, times)
    raise ConvergenceError(
        "Duhamel iteration did not converge; T is outside the contraction regime",
        iterations=max_iter,
        residual=float(previous or 0.0),
        context={"T": T, "beta": p.beta},
    )


def local_window(u0: TorusField, alpha: float, c_cal: float, grid_points: Optional[int] = None) -> float:
    """T = c_cal / (1 + ||u0||_{C^alpha})."""
    return c_cal / (1.0 + holder_norm(u0, alpha, grid_points))


def calibrate_contraction_constant(
    p: BbmParams,
    alpha: float,
    probes: Sequence[TorusField],
    c_low: float = 1e-3,
    c_high: float = 10.0,
    target: float = constants.CONTRACTION_TARGET,
    safety: float = 0.9,
    xtol: float = 1e-3,
) -> float:
    """
    Largest c (times ``safety``) whose local window keeps every probe's
    Duhamel contraction factor at or below ``target``, found by bisection.
    """

    def excess(c: float) -> float:
        worst = 0.0
        for u0 in probes:
            T = local_window(u0, alpha, c)
            try:
                worst = max(worst, duhamel_local_solve(u0, p, T).contraction_factor)
            except ConvergenceError:
                return 1.0
        return worst - target

    if excess(c_high) <= 0.0:
        c_cal = c_high
    else:
        if excess(c_low) > 0.0:
            raise ConvergenceError(
                "contraction target not met even at the smallest constant",
                iterations=0,
                residual=excess(c_low) + target,
                context={"c_low": c_low, "alpha": alpha, "beta": p.beta},
            )
        c_cal = float(sp_optimize.bisect(excess, c_low, c_high, xtol=xtol))
    c_cal *= safety
    logger.info("Calibrated contraction constant c_cal=%.4g (alpha=%g, beta=%g)", c_cal, alpha, p.beta)
    return c_cal


# -- Flow comparison --------------------------------------------------------


def _norm_in(u: TorusField, space: str, exponent: float) -> float:
    if space.upper() == "H":
        return sobolev_norm(u, exponent)
    if space.upper() == "C":
        return besov_holder_proxy(u, exponent)
    raise ValidationError(f"unknown norm space {space!r}", field="norms")


def flow_compare(
    u0: TorusField,
    N_small: int,
    N_large: int,
    p: BbmParams,
    t: float,
    norms: Sequence[Tuple[str, float]] = (("H", 1.0),),
) -> Dict[str, float]:
    """
    ||Phi_t^{N_small} u0 - Phi_t^{N_large} u0|| for each (space, exponent).

    Keys are ``"H^<exponent>"`` or ``"C^<exponent>"``.
    """
    if not 0 <= N_small <= N_large <= u0.n_max:
        raise ValidationError(
            "flow_compare requires N_small <= N_large <= n_max",
            field="N_small",
            context={"N_small": N_small, "N_large": N_large, "n_max": u0.n_max},
        )
    small = bbm_flow_map(u0, p.model_copy(update={"N": N_small}), t)
    large = bbm_flow_map(u0, p.model_copy(update={"N": N_large}), t)
    difference = small - large
    return {f"{space.upper()}^{exponent:g}": _norm_in(difference, space, exponent) for space, exponent in norms}


# -- Growth diagnostics -----------------------------------------------------


@dataclass
class DiagnosticSeries:
    """One inequality |lhs(t)| <~ bound(t) sampled along a trajectory."""
    name: str
    lhs: np.ndarray
    bound: np.ndarray

    @property
    def ratio(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.bound > 0.0, np.abs(self.lhs) / self.bound, 0.0)

    @property
    def max_ratio(self) -> float:
        """Implementation-reported constant of the inequality."""
        return float(np.max(self.ratio)) if self.ratio.size else 0.0


@dataclass
class GrowthDiagnostics:
    times: np.ndarray
    series: Dict[str, DiagnosticSeries]
    parameters: Dict[str, float]

    def max_ratios(self) -> Dict[str, float]:
        return {name: s.max_ratio for name, s in self.series.items()}

    def rows(self) -> List[Dict[str, float]]:
        out = []
        for i, t in enumerate(self.times):
            row = {"time": float(t)}
            for name, s in self.series.items():
                row[f"{name}_lhs"] = float(s.lhs[i])
                row[f"{name}_bound"] = float(s.bound[i])
                row[f"{name}_ratio"] = float(s.ratio[i])
            out.append(row)
        return out


def _flux_pairing(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """2 sum_n Re(conj(left_n) right_n) along the last axis."""
    return 2.0 * np.sum(left.real * right.real + left.imag * right.imag, axis=-1)


def bbm_growth_diagnostics(
    traj: Trajectory,
    p: BbmParams,
    sigma: float,
    alpha: float,
    s: float,
    r: float = 3.0,
) -> GrowthDiagnostics:
    """
    Analytic norm derivatives along a BBM trajectory against the deterministic
    bounds: sub-quadratic H^sigma growth, H^{s+beta/2} smoothing, the
    W^{1,inf}-weighted bounds and the polynomial growth envelope.

    Only the nonlinear flux f = -d/dx P_N((P_N u)^2) moves Sobolev norms, so

        d/dt ||P_N u||_{H^{a+beta/2}}^2 = 2 Re <M(a, beta) P_N u, f>
                                        = 2 Re <M1 Lambda(a) P_N u, Lambda(a) f>

    with M = (1 + |n|^{2a}) M1. The H2Bis and H2 series pair through M1;
    H2BisRemainder is the M2 = M1 - 1 part, bounded by ||u||_{H^s}^2 ||u||_{L^inf}.

    Raises:
        ValidationError: 1 + alpha >= beta or sigma - alpha <= beta / 2
    """
    if not (1.0 + alpha < p.beta and sigma - alpha > p.beta / 2.0):
        raise ValidationError(
            "growth diagnostics require 1 + alpha < beta and sigma - alpha > beta/2",
            field="alpha",
            context={"alpha": alpha, "sigma": sigma, "beta": p.beta},
        )
    theta = 2.0 * alpha / (2.0 * sigma - p.beta)
    beta = p.beta
    n_max = traj.n_max
    n = frequencies(n_max)
    N = min(p.N, n_max)
    low = np.where(np.abs(n) <= N, traj.coeffs, 0.0)
    if p.nonlinearity_enabled:
        flux = -1j * n * truncated_square(low, N, traj.reality == Reality.REAL)
    else:
        flux = np.zeros_like(low)

    def norm(sig: float) -> np.ndarray:
        return np.sqrt(sobolev_norm_sq_array(low, sig))

    def ddt_sq(sig: float) -> np.ndarray:
        weight = energy_multiplier(sig - beta / 2.0, beta).values(n_max).real
        return _flux_pairing(weight * low, flux)

    def smoothing_terms(a: float) -> Tuple[np.ndarray, np.ndarray]:
        """(d/dt ||P_N u||_{H^{a+beta/2}}^2 through M1, its M2 part)."""
        lam = bessel_potential(a).values(n_max).real
        first = m1(a, beta).values(n_max).real
        second = m2(a, beta).values(n_max).real
        return (
            _flux_pairing(first * lam * low, lam * flux),
            _flux_pairing(second * lam * low, lam * flux),
        )

    R = float(norm(beta / 2.0)[0])
    h_sigma, h_s = norm(sigma), norm(s)
    fields = [TorusField(row, traj.reality) for row in low]
    w1inf = np.array([w1inf_norm(u) for u in fields])
    dx_sup = np.array([_dx_sup(u) for u in fields])
    sup = np.array([sup_norm(u) for u in fields])
    smoothing, remainder = smoothing_terms(s)

    series = {
        "DI1": DiagnosticSeries("DI1", ddt_sq(sigma), R ** (1.0 + theta) * h_sigma ** (2.0 - theta)),
        "GammaSmoothing": DiagnosticSeries(
            "GammaSmoothing", ddt_sq(s + beta / 2.0), h_s**3 + h_s**2 * dx_sup
        ),
        "H2Bis": DiagnosticSeries("H2Bis", smoothing, w1inf * h_s**2),
        "H2BisRemainder": DiagnosticSeries("H2BisRemainder", remainder, sup * h_s**2),
    }
    if s > 0.5 + beta / 2.0:
        lower, _ = smoothing_terms(s - beta / 2.0)
        ddt_pow = r * h_s ** (2.0 * r - 2.0) * lower
        series["H2"] = DiagnosticSeries(
            "H2", ddt_pow, h_s ** (2.0 * r - 2.0) * w1inf * norm(s - beta / 2.0) ** 2
        )
    envelope = (1.0 + np.abs(traj.times)) ** (1.0 / theta) * h_sigma[0]
    series["PolynomialGrowth"] = DiagnosticSeries("PolynomialGrowth", h_sigma, envelope)
    return GrowthDiagnostics(
        times=traj.times,
        series=series,
        parameters={"sigma": sigma, "alpha": alpha, "s": s, "r": r, "theta": theta, "R": R},
    )


def _dx_sup(u: TorusField) -> float:
    return sup_norm(u.with_coeffs(1j * u.frequencies * u.coeffs))
