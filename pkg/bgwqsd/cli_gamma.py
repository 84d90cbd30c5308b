"""Provides a command-line interface for the Gamma integral check."""

from bgwqsd.actions import GammaCheckAction
from bgwqsd.common import Command, Common


class GammaCheckCommand(Command, Common):
    """Compare a band-sum integral with its Gamma closed form."""

    name = "gamma-check"
    parent = "BGWQSDCommand"

    def init_arguments(self):
        """Initializes the command-line arguments for the command."""
        self.add_common_arguments()
        self.add_argument("-a", "--alpha", type=float, default=None, help="Exponent.")
        self.add_argument("--rate", dest="a", type=float, default=None, help="Rate a.")
        self.add_argument(
            "--rel-tol",
            dest="rel_tol",
            type=float,
            default=None,
            help="Relative tolerance of the band sums.",
        )

    def run(self, args):
        """Runs the command.

        Args:
            args: The command-line arguments.
        """
        self.run_action(GammaCheckAction, args)
