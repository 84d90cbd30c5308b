"""Provides a command-line interface for the Monte Carlo experiments."""

from bgwqsd.actions import MCAction
from bgwqsd.common import Command, Common


class MCCommand(Command, Common):
    """Run a Monte Carlo experiment against a constructed measure.

    ``--mode qsd`` samples the QSD through its subordinator representation,
    ``--mode stationarity`` runs one conditioned step from the QSD and
    ``--mode yaglom`` simulates ``--steps`` generations from one ancestor.
    """

    name = "mc"
    parent = "BGWQSDCommand"
    aliases = ["montecarlo"]

    def init_arguments(self):
        """Initializes the command-line arguments for the command."""
        self.add_common_arguments()
        self.add_yaglom_arguments()
        self.add_measure_arguments()
        self.add_mc_arguments()
        self.add_steps_argument("Generations of the Yaglom experiment.")

    def run(self, args):
        """Runs the command.

        Args:
            args: The command-line arguments.
        """
        self.run_action(MCAction, args)
