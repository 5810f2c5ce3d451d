"""
Banded Fourier representation of periodic fields on the torus [0, 2*pi).

Coefficients are stored in a complex array ordered n = -n_max..n_max with the
synthesis convention u(x) = sum_n coeffs(n) e^{inx}.
"""
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Union

import numpy as np

from itl_transport_lab.core.exceptions import ValidationError
from itl_transport_lab.core.models import constants
from itl_transport_lab.core.models.enums import Reality


def frequencies(n_max: int) -> np.ndarray:
    """Integer frequencies -n_max..n_max in storage order."""
    return np.arange(-n_max, n_max + 1)


def hermitian_from_nonnegative(positive: np.ndarray) -> np.ndarray:
    """
    Build a Hermitian band array from the coefficients n = 0..n_max.

    Works on the last axis so batches of fields are symmetrized at once. The
    zero mode is made exactly real.
    """
    positive = np.array(positive, dtype=complex, copy=True)
    positive[..., 0] = positive[..., 0].real
    negative = np.conj(positive[..., :0:-1])
    return np.concatenate([negative, positive], axis=-1)


def symmetrize_real(coeffs: np.ndarray) -> np.ndarray:
    """Exact Hermitian symmetrization keeping the nonnegative half."""
    n_max = (coeffs.shape[-1] - 1) // 2
    return hermitian_from_nonnegative(coeffs[..., n_max:])


@dataclass(frozen=True, eq=False)
class TorusField:
    """
    Immutable banded Fourier field.

    Real fields satisfy coeffs(-n) = conj(coeffs(n)) exactly; the constructor
    accepts small asymmetries from floating-point arithmetic and symmetrizes,
    and rejects anything larger.

    Example::

        u = TorusField.from_modes({1: 0.5, -1: 0.5}, n_max=4)   # cos x
        v = TorusField.zeros(8, Reality.COMPLEX)
    """
    coeffs: np.ndarray
    reality: Reality = Reality.REAL

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim != 1 or coeffs.shape[0] % 2 != 1:
            raise ValidationError(
                "coeffs must be a 1-D array of odd length 2*n_max+1",
                field="coeffs",
                context={"shape": list(coeffs.shape)},
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValidationError("coeffs must be finite", field="coeffs")
        reality = Reality(self.reality)
        if reality == Reality.REAL:
            symmetric = symmetrize_real(coeffs)
            scale = 1.0 + float(np.max(np.abs(coeffs)))
            if np.max(np.abs(symmetric - coeffs)) > constants.HERMITIAN_TOLERANCE * scale:
                raise ValidationError(
                    "real field requires Hermitian coefficients",
                    field="coeffs",
                )
            coeffs = symmetric
        else:
            coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "reality", reality)

    # -- Construction -------------------------------------------------------

    @classmethod
    def zeros(cls, n_max: int, reality: Reality = Reality.REAL) -> "TorusField":
        return cls(np.zeros(2 * n_max + 1, dtype=complex), reality)

    @classmethod
    def from_modes(
        cls,
        modes: Mapping[int, complex],
        n_max: int,
        reality: Reality = Reality.REAL,
    ) -> "TorusField":
        """Field with the given coefficients and zeros elsewhere."""
        coeffs = np.zeros(2 * n_max + 1, dtype=complex)
        for n, value in modes.items():
            if abs(n) > n_max:
                raise ValidationError(
                    f"mode {n} outside band limit {n_max}", field="modes"
                )
            coeffs[n + n_max] = value
        return cls(coeffs, reality)

    # -- Accessors ----------------------------------------------------------

    @property
    def n_max(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def is_real(self) -> bool:
        return self.reality == Reality.REAL

    @property
    def frequencies(self) -> np.ndarray:
        return frequencies(self.n_max)

    def coefficient(self, n: int) -> complex:
        if abs(n) > self.n_max:
            return 0j
        return complex(self.coeffs[n + self.n_max])

    def resized(self, n_max: int) -> "TorusField":
        """Zero-pad or truncate to a new band limit."""
        out = np.zeros(2 * n_max + 1, dtype=complex)
        keep = min(n_max, self.n_max)
        out[n_max - keep : n_max + keep + 1] = self.coeffs[
            self.n_max - keep : self.n_max + keep + 1
        ]
        return TorusField(out, self.reality)

    def with_coeffs(self, coeffs: np.ndarray) -> "TorusField":
        return TorusField(coeffs, self.reality)

    def as_complex(self) -> "TorusField":
        return TorusField(self.coeffs, Reality.COMPLEX)

    def values(self, grid_points: int) -> np.ndarray:
        """Point values on the uniform grid x_j = 2*pi*j/grid_points."""
        from itl_transport_lab.spectral.transforms import band_to_grid

        return band_to_grid(self.coeffs, grid_points, self.is_real)

    # -- Arithmetic ---------------------------------------------------------

    def _check_compatible(self, other: "TorusField") -> None:
        if other.n_max != self.n_max:
            raise ValidationError(
                "band limits differ",
                field="n_max",
                context={"left": self.n_max, "right": other.n_max},
            )

    def _result_reality(self, other: "TorusField") -> Reality:
        if self.is_real and other.is_real:
            return Reality.REAL
        return Reality.COMPLEX

    def __add__(self, other: "TorusField") -> "TorusField":
        self._check_compatible(other)
        return TorusField(self.coeffs + other.coeffs, self._result_reality(other))

    def __sub__(self, other: "TorusField") -> "TorusField":
        self._check_compatible(other)
        return TorusField(self.coeffs - other.coeffs, self._result_reality(other))

    def __neg__(self) -> "TorusField":
        return TorusField(-self.coeffs, self.reality)

    def __mul__(self, scalar: Union[int, float, complex]) -> "TorusField":
        reality = self.reality
        if isinstance(scalar, complex) and scalar.imag != 0.0:
            reality = Reality.COMPLEX
        return TorusField(self.coeffs * scalar, reality)

    __rmul__ = __mul__

    def allclose(self, other: "TorusField", atol: float = 1e-12) -> bool:
        return self.n_max == other.n_max and bool(
            np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol)
        )

    # -- Serialization ------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        """JSON shape: {n_max, reality, coeffs: [[re, im], ...]} ordered n = -n_max..n_max."""
        return {
            "n_max": self.n_max,
            "reality": self.reality.value,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "TorusField":
        try:
            n_max = int(data["n_max"])
            pairs = np.asarray(data["coeffs"], dtype=float)
            reality = Reality(data.get("reality", Reality.REAL.value))
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(
                "malformed field record", field="field", original_error=e
            ) from e
        if pairs.shape != (2 * n_max + 1, 2):
            raise ValidationError(
                "coefficient list does not match n_max",
                field="coeffs",
                context={"n_max": n_max, "shape": list(pairs.shape)},
            )
        return cls(pairs[:, 0] + 1j * pairs[:, 1], reality)

    def __repr__(self) -> str:
        return f"TorusField(n_max={self.n_max}, reality={self.reality.value})"
