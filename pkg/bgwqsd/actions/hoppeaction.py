"""Provides the action running the Hoppe roundtrip."""

from ..verify import hoppe_roundtrip
from .action import Action


class HoppeAction(Action):
    """Rebuild the QSD pgf from the Hoppe function and map it back."""

    def action(self):
        dist = self.config.distribution()
        report = hoppe_roundtrip(
            dist, self.config.require_alpha(), self.config.order, self.config.zgrid
        )
        self.print(
            "Q equation residual: {0:.3e}".format(report.details["q_equation_residual"])
        )
        self.reports.append(report)
        return report
