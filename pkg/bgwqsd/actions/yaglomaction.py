"""Provides the action that computes the Yaglom limit."""

import numpy as np

from ..formatters import write_sequence_table
from ..yaglom import h_identity_report, yaglom_limit
from .action import Action


class YaglomAction(Action):
    """Iterate the offspring pgf to the Yaglom limit and tabulate nu_min.

    Writes ``yaglom.csv`` (k, nu_k) and ``survival.csv`` (n, p_n, ratio).
    """

    def action(self):
        dist = self.config.distribution()
        res = yaglom_limit(dist, self.config.order, self.config.tol, self.config.n_max)
        header = {
            "mean": res.mean,
            "iterations": res.iterations,
            "sup_delta": res.sup_delta,
            "offspring_spec": dist.spec,
        }
        k = np.arange(1, res.order + 1)
        self.write_artifact(
            "yaglom.csv",
            lambda f: write_sequence_table(f, {"k": k, "nu_k": res.nu_min}, header),
        )
        n = np.arange(res.p_seq.size)
        ratios = np.append(np.nan, res.ratio_seq)
        self.write_artifact(
            "survival.csv",
            lambda f: write_sequence_table(
                f, {"n": n, "p_n": res.p_seq, "ratio": ratios}
            ),
        )
        self.print(
            "m={0:.17g} iterations={1} sup_delta={2:.3e} last ratio={3:.17g}".format(
                res.mean, res.iterations, res.sup_delta, res.ratio_seq[-1]
            )
        )
        if self.config.verify:
            self.reports.append(h_identity_report(res, dist, self.config.zgrid))
        return res
