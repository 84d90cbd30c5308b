"""Provides the base class of all subcommand actions."""

import abc
import logging
import os
import sys

from ..errors import InvalidSpecError, ReportedError, VerificationFailed
from ..fields import MC_FIELDS, VERIFICATION_FIELDS
from ..formatters import TabularOutput, VerboseOutput, write_reports


class Action(metaclass=abc.ABCMeta):
    """Base class for a pipeline run by one subcommand.

    Artifacts are written through :meth:`write_artifact`, which registers a
    removal on the undo stack; when the action fails with an error, partially
    written artifacts are rolled back. Failed verifications are not errors:
    the artifacts stay and :class:`VerificationFailed` is raised at the end.

    Attributes:
        config: The RunConfig.
        undo_stack: A list of callables to perform on rollback.
        out: A file-like object to print messages to.
        reports: Verification and Monte Carlo reports collected by the action.
        tabular: Print reports as a table.
    """

    def __init__(self, config, out=sys.stdout, tabular=False):
        """Initializes an Action.

        Args:
            config: The RunConfig.
            out: Filelike to print enduser-messages to.
            tabular: Print reports in an ASCII table.
        """
        self.config = config
        self.undo_stack = []
        self.out = out
        self.reports = []
        self.tabular = tabular

    def __call__(self):
        """Run the action, roll back on errors and judge the reports.

        Returns:
            The result of the action.

        Raises:
            VerificationFailed: If a collected report did not pass.
        """
        try:
            result = self.action()
        except ReportedError:
            self.rollback()
            raise
        if self.reports:
            self.show_reports()
            self.write_artifact("reports.json", lambda f: write_reports(f, self.reports))
        failed = [r for r in self.reports if not r.passed]
        for report in self.reports:
            logging.info(
                "%s: %s", report.check_name, "passed" if report.passed else "FAILED"
            )
        if failed:
            raise VerificationFailed(failed)
        return result

    @abc.abstractmethod
    def action(self):
        """The pipeline to perform."""
        pass

    def rollback(self):
        """Rolls back any artifacts written by this action."""
        for undo in reversed(self.undo_stack):
            undo()
        self.undo_stack = []

    def write_artifact(self, name, writer):
        """Write a file below the configured output directory.

        Args:
            name: File name.
            writer: Callable receiving the open text stream.

        Returns:
            The path written.

        Raises:
            InvalidSpecError: If the directory or file cannot be written.
        """
        path = os.path.join(self.config.output_dir, name)

        def remove():
            if os.path.exists(path):
                os.remove(path)

        try:
            os.makedirs(self.config.output_dir, exist_ok=True)
            self.undo_stack.append(remove)
            with open(path, "w") as f:
                writer(f)
        except OSError as e:
            raise InvalidSpecError("output", str(e))
        logging.info("wrote %s", path)
        return path

    def show_reports(self):
        """Print collected reports with the matching field set."""
        formatter = TabularOutput() if self.tabular else VerboseOutput()
        checks = [r for r in self.reports if not hasattr(r, "tv_distance")]
        experiments = [r for r in self.reports if hasattr(r, "tv_distance")]
        if checks:
            self.print(str(formatter.output(VERIFICATION_FIELDS, checks)))
        if experiments:
            self.print(str(formatter.output(MC_FIELDS, experiments)))

    def print(self, msg, end=os.linesep):
        """Mimick the print-statements behaviour on the out-stream:

        Print the given message and add a newline.

        Args:
            msg: The message to print.
            end: The line ending to use.
        """
        self.out.write(msg)
        self.out.write(end)
        self.out.flush()
