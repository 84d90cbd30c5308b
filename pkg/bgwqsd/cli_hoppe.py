"""Provides a command-line interface for the Hoppe roundtrip."""

from bgwqsd.actions import HoppeAction
from bgwqsd.common import Command, Common


class HoppeCommand(Command, Common):
    """Rebuild the log-uniform QSD from the Hoppe function and compare."""

    name = "hoppe"
    parent = "BGWQSDCommand"

    def init_arguments(self):
        """Initializes the command-line arguments for the command."""
        self.add_common_arguments()
        self.add_yaglom_arguments()
        self.add_argument("-a", "--alpha", type=float, default=None, help="Exponent.")
        self.add_check_arguments()

    def run(self, args):
        """Runs the command.

        Args:
            args: The command-line arguments.
        """
        self.run_action(HoppeAction, args)
