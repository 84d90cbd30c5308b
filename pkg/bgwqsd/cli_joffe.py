"""Provides a command-line interface for Joffe's partial sums."""

from bgwqsd.actions import JoffeAction
from bgwqsd.common import Command, Common


class JoffeCommand(Command, Common):
    """Tabulate the partial sums probing recurrence of the Q-process."""

    name = "joffe"
    parent = "BGWQSDCommand"

    def init_arguments(self):
        """Initializes the command-line arguments for the command."""
        self.add_common_arguments()
        self.add_steps_argument("Number of partial sums.")

    def run(self, args):
        """Runs the command.

        Args:
            args: The command-line arguments.
        """
        self.run_action(JoffeAction, args)
