"""Provides the action that recovers Lambda from a measure table."""

import numpy as np

from ..formatters import write_sequence_table
from ..parsers import load_measure_table
from ..selfsimilar import load_measure
from ..verify import compare_recovery, recover_lambda
from .action import Action
from .constructaction import build_measure


class RecoverAction(Action):
    """Bin m^(-alpha n) nu(. / p_n) and compare it with x^-alpha Lambda(dx).

    Writes ``recovery.csv`` with the bin edges, the recovered masses and,
    when Lambda is known, the target masses.
    """

    def action(self):
        if self.config.input:
            nu = load_measure_table(self.config.input)
            if self.config.offspring is None:
                self.config.offspring = nu.offspring_spec or None
            dist = self.config.distribution()
            measure = None
            if nu.measure_spec:
                measure = load_measure(nu.measure_spec, dist.mean)
        else:
            dist = self.config.distribution()
            nu, measure = build_measure(self.config, dist)
        alpha = nu.alpha
        recovered = recover_lambda(nu, alpha, dist, self.config.steps, self.config.bins)
        columns = {
            "lo": recovered.edges[:-1],
            "hi": recovered.edges[1:],
            "recovered": recovered.masses,
        }
        if measure is not None:
            report = compare_recovery(recovered, measure, alpha)
            columns["target"] = np.asarray(report.details["target"])
            if self.config.verify:
                self.reports.append(report)
        header = {"n": recovered.n, "p_n": recovered.p_n, "alpha": alpha}
        self.write_artifact(
            "recovery.csv", lambda f: write_sequence_table(f, columns, header)
        )
        self.print(
            "n={0} p_n={1:.6g} lattice points in window={2}".format(
                recovered.n, recovered.p_n, recovered.points
            )
        )
        return recovered
