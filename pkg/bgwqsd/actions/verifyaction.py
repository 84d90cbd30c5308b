"""Provides the action that verifies a measure table."""

from ..parsers import load_measure_table
from .action import Action
from .constructaction import build_measure, measure_checks


class VerifyAction(Action):
    """Run the functional-equation and eigenvector checks.

    The measure is read from ``--input`` or constructed from the
    configuration. An offspring spec in the table header is used when the
    configuration has none.
    """

    def action(self):
        if self.config.input:
            nu = load_measure_table(self.config.input)
            if self.config.offspring is None:
                self.config.offspring = nu.offspring_spec or None
            dist = self.config.distribution()
        else:
            dist = self.config.distribution()
            nu, _ = build_measure(self.config, dist)
        self.reports.extend(measure_checks(self.config, nu, dist))
        return nu
