"""
Experiment results and the files they are written to.
"""
import csv
import json
import logging
import math
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Union

import numpy as np
import scipy

from itl_transport_lab import __version__
from itl_transport_lab.core.models.reports import VerdictReport
from itl_transport_lab.runner.config import ExperimentConfig, config_hash

logger = logging.getLogger(__name__)


def run_metadata(config: ExperimentConfig, calibrated: Dict[str, Any]) -> Dict[str, Any]:
    """
    Everything needed to re-run an artifact: the full config, its hash, the
    seed, library versions and calibrated constants. No wall-clock values,
    so identical configs produce identical files.
    """
    return {
        "experiment": config.experiment.value,
        "config": config.model_dump(mode="json", exclude={"output_dir", "threads"}),
        "config_hash": config_hash(config),
        "seed": config.seed,
        "versions": {
            "itl_transport_lab": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "calibrated": calibrated,
    }


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def _json_safe(value: Any) -> Any:
    """Non-finite floats become the strings "inf", "-inf" and "nan"."""
    if isinstance(value, dict):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    if isinstance(value, np.ndarray):
        return _json_safe(value.tolist())
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        return repr(float(value))
    return value


def _write_json(path: Path, payload: Any) -> None:
    text = json.dumps(_json_safe(payload), indent=2, sort_keys=True, allow_nan=False, default=_json_default)
    path.write_text(text + "\n")


def _cell(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def _write_csv(path: Path, rows: List[Dict[str, Any]]) -> None:
    columns: List[str] = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)
    with path.open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})


@dataclass
class ExperimentResult:
    """
    Output of one experiment: CSV tables, JSON documents, extra files written
    by callbacks (ensembles), verdicts and run metadata.
    """
    experiment: str
    metadata: Dict[str, Any] = field(default_factory=dict)
    tables: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)
    documents: Dict[str, Any] = field(default_factory=dict)
    writers: Dict[str, Callable[[Path], Any]] = field(default_factory=dict)
    verdicts: List[VerdictReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def write_to(self, directory: Union[str, Path]) -> List[Path]:
        """Write every artifact into ``directory``; returns the written paths."""
        target = Path(directory)
        target.mkdir(parents=True, exist_ok=True)
        written: List[Path] = []

        for name, rows in sorted(self.tables.items()):
            path = target / f"{name}.csv"
            _write_csv(path, rows)
            written.append(path)
        for name, payload in sorted(self.documents.items()):
            path = target / f"{name}.json"
            _write_json(path, payload)
            written.append(path)
        for filename, writer in sorted(self.writers.items()):
            path = target / filename
            writer(path)
            written.append(path)
        if self.verdicts:
            path = target / "verdicts.json"
            _write_json(path, [v.to_verdict() for v in self.verdicts])
            written.append(path)

        path = target / "metadata.json"
        _write_json(path, {**self.metadata, "passed": self.passed})
        written.append(path)
        logger.info("Wrote %d artifacts for %s to %s", len(written), self.experiment, target)
        return written
