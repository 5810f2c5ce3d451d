"""
Bounded test functions for the Monte Carlo identities.
"""
import math
from dataclasses import dataclass
from typing import Callable, Dict

import numpy as np

from itl_transport_lab.core.exceptions import ValidationError
from itl_transport_lab.spectral.field import TorusField, frequencies


@dataclass(frozen=True)
class TestFunction:
    """
    Bounded observable psi with |psi| <= bound.

    ``evaluate_array`` maps stacked band arrays (M, 2n+1) to M values.
    ``lipschitz`` is an L^2-Lipschitz estimate used for drift budgets.
    """
    __test__ = False

    name: str
    evaluate_array: Callable[[np.ndarray], np.ndarray]
    bound: float
    lipschitz: float = 1.0

    def evaluate(self, coeffs: np.ndarray) -> np.ndarray:
        """Evaluate on a batch and check the declared bound on every value."""
        values = np.asarray(self.evaluate_array(np.atleast_2d(coeffs)), dtype=float)
        if not np.all(np.abs(values) <= self.bound * (1.0 + 1e-12)):
            raise ValidationError(
                f"test function {self.name} exceeded its bound",
                field="psi",
                context={"bound": self.bound, "max": float(np.max(np.abs(values)))},
            )
        return values

    def __call__(self, u: TorusField) -> float:
        return float(self.evaluate(u.coeffs)[0])


def _low_mass_sq(coeffs: np.ndarray, m: int) -> np.ndarray:
    n_max = (coeffs.shape[-1] - 1) // 2
    mask = np.abs(frequencies(n_max)) <= m
    return np.sum(np.abs(coeffs[..., mask]) ** 2, axis=-1)


def constant_one() -> TestFunction:
    return TestFunction("one", lambda c: np.ones(c.shape[0]), 1.0, 0.0)


def gaussian_low_mode(m: int) -> TestFunction:
    """exp(-||P_m u||_{L^2}^2)."""
    return TestFunction(
        f"exp_low_mass_{m}", lambda c: np.exp(-_low_mass_sq(c, m)), 1.0, math.sqrt(2.0 / math.e)
    )


def cosine_first_mode() -> TestFunction:
    """cos(Re u_hat(1))."""

    def evaluate(c: np.ndarray) -> np.ndarray:
        n_max = (c.shape[-1] - 1) // 2
        if n_max < 1:
            return np.ones(c.shape[0])
        return np.cos(c[:, n_max + 1].real)

    return TestFunction("cos_first_mode", evaluate, 1.0, 1.0)


def clipped_low_mass(m: int = 2) -> TestFunction:
    """min(1, ||P_m u||_{L^2})."""
    return TestFunction(
        f"clipped_low_mass_{m}", lambda c: np.minimum(1.0, np.sqrt(_low_mass_sq(c, m))), 1.0, 1.0
    )


def test_function_library() -> Dict[str, TestFunction]:
    """The shipped test functions keyed by name."""
    functions = [
        constant_one(),
        gaussian_low_mode(1),
        gaussian_low_mode(2),
        cosine_first_mode(),
        clipped_low_mass(2),
    ]
    return {f.name: f for f in functions}


test_function_library.__test__ = False  # type: ignore[attr-defined]
