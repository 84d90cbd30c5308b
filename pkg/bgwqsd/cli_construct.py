"""Provides a command-line interface for constructing invariant measures."""

from bgwqsd.actions import ConstructAction
from bgwqsd.common import Command, Common
from bgwqsd.errors import ConflictingOptions


class ConstructCommand(Command, Common):
    """Construct a lambda-invariant measure or QSD and write ``measure.csv``.

    The measure is given either by a self-similar measure (``--measure`` and
    ``--alpha``), by a closed form (``--kind``) or as an extremal measure
    (``-t``).
    """

    name = "construct"
    parent = "BGWQSDCommand"

    def init_arguments(self):
        """Initializes the command-line arguments for the command."""
        self.add_common_arguments()
        self.add_yaglom_arguments()
        self.add_measure_arguments()
        self.add_check_arguments()

    def run(self, args):
        """Runs the command.

        Args:
            args: The command-line arguments.

        Raises:
            ConflictingOptions: If a closed form and an extremal are requested.
        """
        if args.kind is not None and args.t is not None:
            raise ConflictingOptions("Only pass '--kind' or '-t' not both")
        self.run_action(ConstructAction, args)
