"""
Report models emitted by the verifier and the runner.
"""
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class VerdictReport(BaseModel):
    """
    Outcome of a Monte Carlo or deterministic test.

    ``passed`` is derived: it is true exactly when ``|z_score|`` does not
    exceed ``effective_threshold`` (the declared z threshold widened by the
    deterministic drift budget expressed in standard errors).

    Example::

        report.passed          # bool
        report.to_verdict()    # {"test", "params", "lhs", "rhs", "z", "pass", "seed"}
    """
    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "test": "quasi_invariance_bbm",
                "lhs_estimate": 0.41,
                "rhs_estimate": 0.41,
                "paired_diff_mean": 1.2e-4,
                "paired_diff_se": 3.1e-4,
                "z_score": 0.39,
                "z_threshold": 3.0,
            }
        }
    )

    test: str = Field(..., description="Test identifier")
    lhs_estimate: float
    rhs_estimate: float
    paired_diff_mean: float
    paired_diff_se: float = Field(..., ge=0.0)
    unpaired_se: Optional[float] = Field(None, ge=0.0, description="SE of lhs/rhs treated as independent")
    z_score: float
    z_threshold: float = Field(default=3.0, gt=0.0)
    drift_budget: float = Field(default=0.0, ge=0.0)
    effective_threshold: float = Field(default=0.0, ge=0.0)
    passed: bool = False
    seed: Optional[int] = None
    count: Optional[int] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _derive_pass(self) -> "VerdictReport":
        if self.effective_threshold < self.z_threshold:
            self.effective_threshold = self.z_threshold
        self.passed = bool(abs(self.z_score) <= self.effective_threshold)
        return self

    def to_verdict(self) -> Dict[str, Any]:
        """Compact JSON record used in verdict files."""
        return {
            "test": self.test,
            "params": self.params,
            "lhs": self.lhs_estimate,
            "rhs": self.rhs_estimate,
            "z": self.z_score,
            "pass": self.passed,
            "seed": self.seed,
            "count": self.count,
            "paired_diff_mean": self.paired_diff_mean,
            "paired_diff_se": self.paired_diff_se,
            "unpaired_se": self.unpaired_se,
            "drift_budget": self.drift_budget,
            "effective_threshold": self.effective_threshold,
        }
