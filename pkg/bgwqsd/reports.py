"""Verification report records shared by the checking modules."""

from dataclasses import dataclass, field

import numpy as np

from .fields import ReportField


def _plain(value):
    """Convert numpy values inside report details to JSON friendly types."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """Outcome of one oracle check.

    ``passed`` is derived: it holds exactly when residual <= tolerance.

    Attributes:
        check_name: Name of the check.
        residual: The measured residual.
        tolerance: The tolerance the residual is compared against.
        details: Per-point residuals and auxiliary numbers.
        passed: Verdict.
    """

    check_name: str
    residual: float
    tolerance: float
    details: dict = field(default_factory=dict)
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "residual", float(self.residual))
        object.__setattr__(self, "tolerance", float(self.tolerance))
        object.__setattr__(self, "passed", bool(self.residual <= self.tolerance))

    def value(self, key):
        """Value of a report field, used by the formatters."""
        return {
            ReportField.check_name: self.check_name,
            ReportField.residual: "{0:.3e}".format(self.residual),
            ReportField.tolerance: "{0:.3e}".format(self.tolerance),
            ReportField.passed: "yes" if self.passed else "NO",
        }[key]

    def to_dict(self):
        """The JSON report schema {check_name, residual, tolerance, passed}."""
        return {
            "check_name": self.check_name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": _plain(self.details),
        }
