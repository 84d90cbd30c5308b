"""Provides a command-line interface for printing the version."""

from bgwqsd import __version__ as version
from bgwqsd.common import Command


class VersionCommand(Command):
    """Print version of bgw-qsd."""

    name = "version"
    parent = "BGWQSDCommand"

    def run(self, args):
        """Runs the command.

        Args:
            args: The command-line arguments (unused).
        """
        print(version)
