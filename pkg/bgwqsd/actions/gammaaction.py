"""Provides the action comparing band-sum quadrature with the Gamma closed form."""

from ..reports import VerificationReport
from ..selfsimilar import gamma_integral_check
from .action import Action

#: Largest accepted relative error of the Gamma check.
GAMMA_TOLERANCE = 1e-8


class GammaCheckAction(Action):
    """Integrate (e^-ax - e^-x) x^-alpha dx/x by bands and compare."""

    def action(self):
        alpha = self.config.require_alpha()
        check = gamma_integral_check(self.config.a, alpha, self.config.rel_tol)
        self.print(
            "numeric={0:.17g} closed_form={1:.17g}".format(
                check.numeric, check.closed_form
            )
        )
        self.reports.append(
            VerificationReport(
                "gamma_integral",
                check.rel_error,
                GAMMA_TOLERANCE,
                {"a": self.config.a, "alpha": alpha, **check._asdict()},
            )
        )
        return check
