"""
Trajectory container shared by the BBM and NLS flows.
"""
import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from itl_transport_lab.core.exceptions import ValidationError
from itl_transport_lab.core.models.enums import ModelKind, Reality
from itl_transport_lab.core.models.params import BbmParams, NlsParams
from itl_transport_lab.spectral.field import TorusField

FlowParams = Union[BbmParams, NlsParams]


def relative_drift(series: np.ndarray) -> float:
    """max_t |q(t) - q(0)| / |q(0)|, or the absolute drift when q(0) = 0."""
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        return 0.0
    reference = abs(series[0])
    deviation = float(np.max(np.abs(series - series[0])))
    return deviation / reference if reference > 0.0 else deviation


@dataclass
class Trajectory:
    """
    Time-stamped states of one integration plus per-step diagnostics.

    ``times`` is strictly monotone: increasing for forward runs, decreasing
    for time-reversed runs. ``coeffs`` has shape (len(times), 2*n_max+1).
    """
    times: np.ndarray
    coeffs: np.ndarray
    reality: Reality
    params: FlowParams
    step_size: float
    diagnostics: Dict[str, np.ndarray] = field(default_factory=dict)
    drift: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.coeffs.shape[0] != self.times.shape[0]:
            raise ValidationError("times and states differ in length", field="times")
        if len(self.times) > 1:
            steps = np.diff(self.times) * np.sign(self.times[-1] - self.times[0])
            if np.any(steps <= 0.0):
                raise ValidationError("trajectory times must be strictly monotone", field="times")

    @property
    def model(self) -> ModelKind:
        return self.params.model

    @property
    def n_max(self) -> int:
        return (self.coeffs.shape[-1] - 1) // 2

    def __len__(self) -> int:
        return int(self.times.shape[0])

    def state(self, index: int) -> TorusField:
        return TorusField(self.coeffs[index], self.reality)

    @property
    def states(self) -> List[TorusField]:
        return [self.state(i) for i in range(len(self))]

    @property
    def initial(self) -> TorusField:
        return self.state(0)

    @property
    def final(self) -> TorusField:
        return self.state(len(self) - 1)

    # -- Export -------------------------------------------------------------

    def to_csv(self) -> str:
        """CSV with a time column and one column per diagnostic series."""
        names = sorted(self.diagnostics)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["time"] + names)
        for i, t in enumerate(self.times):
            writer.writerow([repr(float(t))] + [repr(float(self.diagnostics[n][i])) for n in names])
        return buffer.getvalue()

    def to_dict(self) -> Dict[str, Any]:
        """Full states at the stored stride plus drift summary."""
        return {
            "model": self.model.value,
            "params": self.params.model_dump(mode="json"),
            "step_size": self.step_size,
            "drift": self.drift,
            "times": [float(t) for t in self.times],
            "states": [self.state(i).to_dict() for i in range(len(self))],
        }

    def write_csv(self, path: Union[str, Path]) -> Path:
        target = Path(path)
        target.write_text(self.to_csv())
        return target

    def write_json(self, path: Union[str, Path]) -> Path:
        target = Path(path)
        target.write_text(json.dumps(self.to_dict(), indent=2))
        return target
