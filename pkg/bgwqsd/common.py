"""Common classes and functions for the bgwqsd commands."""

from __future__ import annotations

import argparse
import sys

from bgwqsd.config import RunConfig
from bgwqsd.domains import ClosedFormKind, MCMode, TailMode
from bgwqsd.errors import UsageError
from bgwqsd.fields import ConfigField


class ArgumentParser(argparse.ArgumentParser):
    """An ArgumentParser that raises instead of exiting on bad input."""

    def error(self, message):
        raise UsageError(message)


def float_list(value):
    """Parse a comma separated list of floats, e.g. ``0.1,0.5,0.9``."""
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated floats")


class Command:
    """A (sub)command of the command line.

    Subclasses fill in ``name`` and ``parent``, declare their arguments in
    :meth:`init_arguments` and do their work in :meth:`run`.

    Attributes:
        name: The name of the command.
        parent: Name of the class this command hangs below.
        aliases: Alternative names of the command.
        parser: The ArgumentParser of the command.
    """

    name: str = ""
    parent: str | None = None
    aliases: list[str] = []

    def __init__(self, parser):
        self.parser = parser
        if self.parent is not None:
            self.parser.set_defaults(command=self)
        self.init_arguments()

    def add_argument(self, *args, **kwargs):
        """Add an argument to this command's parser."""
        return self.parser.add_argument(*args, **kwargs)

    def init_arguments(self):
        """Initializes the command-line arguments for the command."""
        pass

    def run(self, args):
        """Runs the command.

        Args:
            args: The parsed command-line arguments.
        """
        raise NotImplementedError


class Common:
    """A collection of common arguments and helpers of the subcommands.

    Attributes:
        all_config_keys: A string of all keys a config file may contain.
    """

    all_config_keys = ", ".join(str(f) for f in ConfigField)

    def add_common_arguments(self):
        """Offspring law, truncation and output options shared by all commands."""
        self.add_argument(
            "-o",
            "--offspring",
            default=None,
            help="Offspring spec as JSON or @file, e.g. "
            '\'{"type":"geometric","b":0.25}\'.',
        )
        self.add_argument(
            "-K", "--order", type=int, default=None, help="Truncation order K."
        )
        self.add_argument(
            "-c",
            "--config",
            default=None,
            help="JSON config file; keys: " + self.all_config_keys + ".",
        )
        self.add_argument(
            "-O",
            "--output-dir",
            dest="output_dir",
            default=None,
            help="Directory for CSV and JSON artifacts.",
        )
        self.add_argument(
            "-T",
            "--tabular",
            action="store_true",
            help="Output the reports in an ASCII-table.",
        )

    def add_yaglom_arguments(self):
        """Stopping rule of the Yaglom iteration."""
        self.add_argument("--tol", type=float, default=None, help="Yaglom tolerance.")
        self.add_argument(
            "--n-max",
            dest="n_max",
            type=int,
            default=None,
            help="Maximal number of Yaglom iterations.",
        )

    def add_measure_arguments(self):
        """Options selecting the invariant measure to construct."""
        self.add_argument("-a", "--alpha", type=float, default=None, help="Exponent.")
        self.add_argument(
            "-m",
            "--measure",
            default=None,
            help="Self-similar measure spec as JSON or @file.",
        )
        self.add_argument(
            "--kind",
            default=None,
            choices=[str(k) for k in ClosedFormKind],
            help="Use a closed form instead of the integral route.",
        )
        self.add_argument(
            "-t", type=float, default=None, help="Build the extremal measure nu_t."
        )
        self.add_argument(
            "--normalize",
            action="store_true",
            default=None,
            help="Normalize the measure so that the result is a QSD.",
        )
        self.add_argument(
            "--true",
            dest="true_measure",
            action="store_true",
            default=None,
            help="Build a true invariant measure (state 0 included).",
        )
        self.add_argument(
            "--rel-tol",
            dest="rel_tol",
            type=float,
            default=None,
            help="Relative tolerance of the band sums.",
        )

    def add_check_arguments(self):
        """Options of the verification checks."""
        self.add_argument(
            "--verify",
            action="store_true",
            default=None,
            help="Run the verification checks and fail on a miss.",
        )
        self.add_argument(
            "--zgrid",
            type=float_list,
            default=None,
            help="Comma separated z values of the functional-equation check.",
        )
        self.add_argument(
            "--k-report",
            dest="k_report",
            type=int,
            default=None,
            help="Rows reported by the eigenvector check.",
        )
        self.add_argument(
            "--lambda",
            dest="lam",
            type=float,
            default=None,
            help="Eigenvalue to verify against instead of m^alpha.",
        )

    def add_mc_arguments(self):
        """Options of the Monte Carlo experiments."""
        self.add_argument(
            "--mode",
            default=None,
            choices=[str(m) for m in MCMode],
            help="Monte Carlo experiment.",
        )
        self.add_argument(
            "-N", "--samples", type=int, default=None, help="Draws or paths."
        )
        self.add_argument("-s", "--seed", type=int, default=None, help="Master seed.")
        self.add_argument(
            "--shards", type=int, default=None, help="Number of parallel shards."
        )
        self.add_argument(
            "--tail",
            default=None,
            choices=[str(m) for m in TailMode],
            help="Handling of draws beyond the tabulated order.",
        )

    def add_steps_argument(self, help_text):
        self.add_argument("-n", "--steps", type=int, default=None, help=help_text)

    def config_from_args(self, args):
        """Builds the RunConfig of the command from the parsed arguments."""
        flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
        return RunConfig.from_sources(self.name, flags, getattr(args, "config", None))

    def run_action(self, action_class, args, out=None):
        """Runs an action configured from the command line.

        Args:
            action_class: The Action subclass to run.
            args: The parsed command-line arguments.
            out: Stream to print messages to, sys.stdout by default.

        Returns:
            The result of the action.
        """
        config = self.config_from_args(args)
        action = action_class(
            config, out=out or sys.stdout, tabular=getattr(args, "tabular", False)
        )
        return action()
