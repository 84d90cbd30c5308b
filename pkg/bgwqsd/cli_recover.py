"""Provides a command-line interface for the Lambda recovery diagnostic."""

from bgwqsd.actions import RecoverAction
from bgwqsd.common import Command, Common


class RecoverCommand(Command, Common):
    """Recover x^-alpha Lambda(dx) from a measure and write ``recovery.csv``."""

    name = "recover"
    parent = "BGWQSDCommand"

    def init_arguments(self):
        """Initializes the command-line arguments for the command."""
        self.add_common_arguments()
        self.add_yaglom_arguments()
        self.add_measure_arguments()
        self.add_check_arguments()
        self.add_steps_argument("Generation n of the rescaling.")
        self.add_argument(
            "--bins", type=int, default=None, help="Bins per multiplicative band."
        )
        self.add_argument(
            "-i", "--input", default=None, help="Measure table written by construct."
        )

    def run(self, args):
        """Runs the command.

        Args:
            args: The command-line arguments.
        """
        self.run_action(RecoverAction, args)
