"""Provides a command-line interface for verifying measure tables."""

from bgwqsd.actions import VerifyAction
from bgwqsd.common import Command, Common


class VerifyCommand(Command, Common):
    """Check a measure table against the eigenvector and functional equations.

    Without ``--input`` the measure is constructed like ``construct`` does.
    """

    name = "verify"
    parent = "BGWQSDCommand"

    def init_arguments(self):
        """Initializes the command-line arguments for the command."""
        self.add_common_arguments()
        self.add_yaglom_arguments()
        self.add_measure_arguments()
        self.add_check_arguments()
        self.add_argument(
            "-i", "--input", default=None, help="Measure table written by construct."
        )

    def run(self, args):
        """Runs the command.

        Args:
            args: The command-line arguments.
        """
        self.run_action(VerifyAction, args)
