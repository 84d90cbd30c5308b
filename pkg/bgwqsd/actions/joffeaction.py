"""Provides the action tabulating Joffe's partial sums."""

import numpy as np

from ..formatters import write_sequence_table
from ..verify import joffe_partial_sums
from .action import Action

CRITERION = (
    "The Q-process is recurrent iff sum_n prod_(k<=n) (1 - eta(q_k)) diverges; "
    "the partial sums below are data, not a verdict."
)


class JoffeAction(Action):
    """Write ``joffe.csv`` with q_n, the increments and the partial sums."""

    def action(self):
        dist = self.config.distribution()
        sums = joffe_partial_sums(dist, self.config.steps)
        self.print(CRITERION)
        if sums.partial_sums.size:
            self.print("S_{0} = {1:.17g}".format(sums.q.size, sums.partial_sums[-1]))
        self.write_artifact(
            "joffe.csv",
            lambda f: write_sequence_table(
                f,
                {
                    "n": np.arange(1, sums.q.size + 1),
                    "q_n": sums.q,
                    "increment": sums.increments,
                    "S_n": sums.partial_sums,
                },
            ),
        )
        return sums
