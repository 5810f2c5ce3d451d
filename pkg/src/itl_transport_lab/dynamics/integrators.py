"""
Fixed-step integrators for semilinear spectral ODEs u' = A u + F(u).

A is diagonal (a symbol array on the band), F is the truncated nonlinearity.
States may carry leading batch axes; every row is advanced independently and
the implicit solver converges row by row, so results do not depend on how an
ensemble is chunked across threads.
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from itl_transport_lab import metrics
from itl_transport_lab.core.exceptions import ConvergenceError, FlowBlowUpError, ValidationError
from itl_transport_lab.core.models import constants
from itl_transport_lab.core.models.enums import IntegratorKind

logger = logging.getLogger(__name__)

Nonlinearity = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SemilinearSystem:
    """u' = linear * u + nonlinear(u) on band arrays."""
    linear: np.ndarray
    nonlinear: Optional[Nonlinearity]
    model: str

    def rhs(self, y: np.ndarray) -> np.ndarray:
        out = self.linear * y
        if self.nonlinear is not None:
            out = out + self.nonlinear(y)
        return out


@dataclass
class FlowResult:
    """Stored times and states of one integration (states: (S, ..., 2n+1))."""
    times: np.ndarray
    states: np.ndarray
    steps: int
    step_size: float


def step_count(t_final: float, dt: float) -> int:
    """Number of equal steps; the last step lands exactly on t_final."""
    if t_final == 0.0:
        return 0
    return max(1, int(math.ceil(abs(t_final) / dt - constants.STEP_COUNT_SLACK)))


def rk4_step(system: SemilinearSystem, y: np.ndarray, h: float) -> np.ndarray:
    k1 = system.rhs(y)
    k2 = system.rhs(y + 0.5 * h * k1)
    k3 = system.rhs(y + 0.5 * h * k2)
    k4 = system.rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def implicit_midpoint_step(
    system: SemilinearSystem,
    y: np.ndarray,
    h: float,
    tol: float = constants.MIDPOINT_TOLERANCE,
    max_iter: int = constants.MIDPOINT_MAX_ITER,
) -> np.ndarray:
    """
    y1 = y + h * f((y + y1) / 2), linear part solved exactly per mode.

    (1 - h A / 2) y1 = (1 + h A / 2) y + h F((y + y1) / 2), iterated on F only.
    """
    half = 0.5 * h * system.linear
    denom = 1.0 - half
    explicit = (1.0 + half) * y / denom
    if system.nonlinear is None:
        return explicit
    y1 = explicit + h * system.nonlinear(y) / denom
    active = np.ones(y.shape[:-1], dtype=bool)
    for _ in range(max_iter):
        update = explicit + h * system.nonlinear(0.5 * (y + y1)) / denom
        residual = np.max(np.abs(update - y1), axis=-1)
        scale = 1.0 + np.max(np.abs(update), axis=-1)
        y1 = np.where(active[..., None], update, y1)
        active = active & (residual > tol * scale)
        if not np.any(active):
            return y1
    raise ConvergenceError(
        "implicit midpoint fixed point did not converge",
        iterations=max_iter,
        residual=float(np.max(residual)),
        context={"model": system.model, "step": h},
    )


def integrate_flow(
    system: SemilinearSystem,
    y0: np.ndarray,
    t_final: float,
    dt: float,
    integrator: IntegratorKind,
    store_every: int = 1,
    blowup_threshold: float = constants.BLOWUP_THRESHOLD,
    midpoint_tolerance: float = constants.MIDPOINT_TOLERANCE,
    midpoint_max_iter: int = constants.MIDPOINT_MAX_ITER,
) -> FlowResult:
    """
    Advance y0 to t_final (possibly negative) with a fixed step.

    States are stored at steps 0, store_every, 2*store_every, ... and always
    at the final step.

    Raises:
        FlowBlowUpError: nonfinite state or modulus above ``blowup_threshold``
        ConvergenceError: implicit midpoint inner iteration failed
    """
    if not (math.isfinite(t_final) and math.isfinite(dt)):
        raise ValidationError("t_final and dt must be finite", field="t_final")
    store_every = max(1, int(store_every))
    steps = step_count(t_final, dt)
    h = t_final / steps if steps else 0.0
    integrator = IntegratorKind(integrator)

    y = np.array(y0, dtype=complex, copy=True)
    times: List[float] = [0.0]
    states: List[np.ndarray] = [y.copy()]
    started = time.perf_counter()
    status = "ok"
    try:
        for step in range(1, steps + 1):
            if integrator == IntegratorKind.RK4:
                y = rk4_step(system, y, h)
            else:
                y = implicit_midpoint_step(system, y, h, midpoint_tolerance, midpoint_max_iter)
            modulus = np.max(np.abs(y)) if y.size else 0.0
            if not np.isfinite(modulus) or modulus > blowup_threshold:
                raise FlowBlowUpError(
                    "integrated state exceeded the blow-up guard",
                    time=step * h,
                    max_modulus=float(modulus),
                    context={"model": system.model, "integrator": integrator.value, "step": h},
                )
            if step % store_every == 0 or step == steps:
                times.append(step * h)
                states.append(y.copy())
    except Exception:
        status = "error"
        raise
    finally:
        metrics.FLOW_INTEGRATIONS.labels(system.model, integrator.value, status).inc()
        metrics.FLOW_INTEGRATION_SECONDS.labels(system.model).observe(time.perf_counter() - started)

    logger.debug(
        "integrated %s to t=%g in %d steps (%s)", system.model, t_final, steps, integrator.value
    )
    return FlowResult(np.asarray(times), np.stack(states), steps, h)


def evolve_batch(
    system: SemilinearSystem,
    y0: np.ndarray,
    t_final: float,
    dt: float,
    integrator: IntegratorKind,
    threads: int = 1,
    **kwargs,
) -> np.ndarray:
    """
    Final states of a stacked ensemble (B, 2n+1), chunked over threads.

    Chunks are concatenated in input order; per-row arithmetic does not
    depend on the chunking.
    """
    rows = y0.shape[0]
    if rows == 0:
        return y0.copy()
    threads = max(1, min(int(threads), rows))

    def _final(chunk: np.ndarray) -> np.ndarray:
        result = integrate_flow(system, chunk, t_final, dt, integrator, store_every=10**9, **kwargs)
        return result.states[-1]

    if threads == 1:
        return _final(y0)
    chunks = np.array_split(y0, threads, axis=0)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        finals = list(pool.map(_final, chunks))
    return np.concatenate(finals, axis=0)
