"""Provides a command-line interface for the Yaglom limit."""

from bgwqsd.actions import YaglomAction
from bgwqsd.common import Command, Common


class YaglomCommand(Command, Common):
    """Compute the Yaglom limit nu_min and the survival probabilities p_n."""

    name = "yaglom"
    parent = "BGWQSDCommand"

    def init_arguments(self):
        """Initializes the command-line arguments for the command."""
        self.add_common_arguments()
        self.add_yaglom_arguments()
        self.add_check_arguments()

    def run(self, args):
        """Runs the command.

        Args:
            args: The command-line arguments.
        """
        self.run_action(YaglomAction, args)
