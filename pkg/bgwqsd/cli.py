"""bgwqsd command line interface."""

import logging
import sys

from bgwqsd import __version__
from bgwqsd.cli_construct import ConstructCommand
from bgwqsd.cli_gamma import GammaCheckCommand
from bgwqsd.cli_hoppe import HoppeCommand
from bgwqsd.cli_joffe import JoffeCommand
from bgwqsd.cli_mc import MCCommand
from bgwqsd.cli_recover import RecoverCommand
from bgwqsd.cli_verify import VerifyCommand
from bgwqsd.cli_version import VersionCommand
from bgwqsd.cli_yaglom import YaglomCommand
from bgwqsd.common import ArgumentParser, Command
from bgwqsd.errors import ReportedError

#: Subcommands in the order they are listed by --help.
SUBCOMMANDS = [
    YaglomCommand,
    ConstructCommand,
    VerifyCommand,
    RecoverCommand,
    HoppeCommand,
    JoffeCommand,
    MCCommand,
    GammaCheckCommand,
    VersionCommand,
]

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class BGWQSDCommand(Command):
    """Invariant measures and QSDs of subcritical Galton-Watson processes.

    This class provides the main entry point for the bgwqsd command.

    Attributes:
        name: The name of the command.
    """

    name = "bgwqsd"

    def init_arguments(self):
        """Initializes the global command-line arguments."""
        self.add_argument(
            "-v",
            "--verbose",
            action="count",
            default=0,
            help="More output; pass twice for debug messages.",
        )
        self.add_argument(
            "--debug", action="store_true", help="Enable debug messages."
        )
        self.add_argument("--log-file", default=None, help="Write the log to a file.")
        self.add_argument("--version", action="version", version=__version__)

    def run(self, args):
        """Dispatch to the selected subcommand.

        Args:
            args: The arguments passed to the command.
        """
        args.command.run(args)


def build_parser():
    """Build the parser with one subparser per subcommand."""
    parser = ArgumentParser(prog=BGWQSDCommand.name, description=BGWQSDCommand.__doc__)
    root = BGWQSDCommand(parser)
    subparsers = parser.add_subparsers(
        title="subcommands", dest="subcommand", required=True
    )
    for command in SUBCOMMANDS:
        sub = subparsers.add_parser(
            command.name,
            aliases=command.aliases,
            help=(command.__doc__ or "").splitlines()[0],
            description=command.__doc__,
        )
        command(sub)
    return parser, root


def setup_logging(verbose=0, debug=False, log_file=None):
    """Configure the root logger once.

    Args:
        verbose: Number of ``-v`` flags.
        debug: Force debug messages.
        log_file: Optional file receiving the log instead of stderr.
    """
    if debug or verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, filename=log_file, force=True)


def main(argv=None):
    """Run the command line.

    Args:
        argv: Arguments without the program name; defaults to sys.argv.

    Returns:
        The exit code: 0 on success, 1 on bad input or a failed computation
        and 2 when a verification did not pass.
    """
    parser, root = build_parser()
    try:
        args = parser.parse_args(argv)
        setup_logging(args.verbose, args.debug, args.log_file)
        root.run(args)
    except ReportedError as e:
        print("error: {0}: {1}".format(type(e).__name__, e), file=sys.stderr)
        return e.return_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
