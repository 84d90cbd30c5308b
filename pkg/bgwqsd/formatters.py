"""Formatters for reports and the CSV/JSON artifacts of a run.

Reports are printed either as ``key : value`` blocks or as a prettytable;
measures and sequences are written as CSV with a ``# {json}`` first line.
"""

import json
import os
import shutil

import prettytable

from .reports import _plain
from .utils import format_float


def record_separator(default=40):
    """A rule as wide as the terminal, ``default`` columns when not attached."""
    columns = shutil.get_terminal_size((default, 0)).columns
    return "-" * (columns or default)


class Formatter:
    """Turns a list of reports into printable text.

    Every report exposes ``value(field)`` returning the already formatted cell
    for a ReportField; subclasses only decide the layout.
    """

    def rows(self, keys, reports):
        """The cells of every report, one list per report."""
        return [[report.value(key) for key in keys] for report in reports]

    def output(self, keys, reports):
        raise NotImplementedError


class VerboseOutput(Formatter):
    """One ``<field> : <value>`` block per report, separated by a rule."""

    def output(self, keys, reports):
        names = [str(k) for k in keys]
        width = max(len(n) for n in names)
        blocks = []
        for cells in self.rows(keys, reports):
            lines = ["{0:{1}s}: {2}".format(n, width, c) for n, c in zip(names, cells)]
            blocks.append(os.linesep.join(lines))
        blocks.append("")
        return (os.linesep + record_separator() + os.linesep).join(blocks)


class TabularOutput(Formatter):
    """All reports in one left aligned table with a header row."""

    def output(self, keys, reports):
        """Returns a PrettyTable; ``str()`` renders it."""
        table = prettytable.PrettyTable([str(k) for k in keys])
        table.align = "l"
        table.add_rows(self.rows(keys, reports))
        return table


def write_measure_table(out, measure):
    """Write a measure as CSV: a ``# {json}`` header, then ``k,nu_k`` rows.

    Args:
        out: A writable text stream.
        measure: An InvariantMeasure.
    """
    out.write("# " + json.dumps(_plain(measure.header()), sort_keys=True) + "\n")
    out.write("k,nu_k\n")
    for k, value in enumerate(measure.nu, start=measure.k_min):
        out.write("{0},{1}\n".format(k, format_float(value)))


def write_sequence_table(out, columns, header=None):
    """Write named columns as CSV with an optional ``# {json}`` header.

    Args:
        out: A writable text stream.
        columns: Mapping of column name to a sequence of numbers.
        header: Optional JSON-serializable header.
    """
    if header is not None:
        out.write("# " + json.dumps(_plain(header), sort_keys=True) + "\n")
    names = list(columns)
    out.write(",".join(names) + "\n")
    for row in zip(*(columns[n] for n in names)):
        out.write(
            ",".join(
                str(v) if isinstance(v, (int, str)) else format_float(v) for v in row
            )
            + "\n"
        )


def write_reports(out, reports):
    """Write reports as a JSON list of their ``to_dict`` forms."""
    json.dump([r.to_dict() for r in reports], out, indent=2)
    out.write("\n")
