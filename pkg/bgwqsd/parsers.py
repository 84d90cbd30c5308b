"""Parsers to turn (external) data into a more usable formats."""

from json import loads
from json.decoder import JSONDecodeError
import logging

import numpy as np

from .construct import InvariantMeasure
from .domains import MeasureSource
from .errors import InvalidSpecError


def load_spec(value, kind):
    """Parse a JSON spec given inline or as ``@path``.

    Args:
        value: A dict, a JSON string or ``@`` followed by a file name.
        kind: What the spec describes, for error messages.

    Returns:
        The spec as a dict.

    Raises:
        InvalidSpecError: If the text is not a JSON object.
    """
    if isinstance(value, dict):
        return value
    if not isinstance(value, str):
        raise InvalidSpecError(kind, "expected a JSON object, got {0!r}".format(value))
    text = value
    if text.startswith("@"):
        try:
            with open(text[1:]) as f:
                text = f.read()
        except OSError as e:
            raise InvalidSpecError(kind, str(e))
    try:
        spec = loads(text)
    except JSONDecodeError as e:
        raise InvalidSpecError(kind, "not valid JSON ({0})".format(e))
    if not isinstance(spec, dict):
        raise InvalidSpecError(kind, "expected a JSON object")
    return spec


def split_header(lines):
    """Split a table into its ``# {json}`` header and the remaining lines.

    Args:
        lines: Lines of a CSV table.

    Returns:
        A tuple of the parsed header (empty dict when missing) and the lines
        after it.
    """
    lines = [line.strip() for line in lines if line.strip()]
    if lines and lines[0].startswith("#"):
        try:
            return loads(lines[0][1:]), lines[1:]
        except JSONDecodeError as e:
            raise InvalidSpecError("table", "broken header ({0})".format(e))
    return {}, lines


def read_measure_table(stream):
    """Read a measure table written by :func:`write_measure_table`.

    Args:
        stream: A readable text stream.

    Returns:
        An InvariantMeasure with source ``table``; the original source is
        kept in ``source_detail``.

    Raises:
        InvalidSpecError: If the table is malformed or has gaps in k.
    """
    header, lines = split_header(stream)
    if not lines or lines[0].replace(" ", "") != "k,nu_k":
        raise InvalidSpecError("table", "expected the column header 'k,nu_k'")
    try:
        rows = [line.split(",") for line in lines[1:]]
        ks = np.array([int(k) for k, _ in rows])
        values = np.array([float(v) for _, v in rows])
    except ValueError as e:
        raise InvalidSpecError("table", str(e))
    if ks.size == 0 or np.any(np.diff(ks) != 1):
        raise InvalidSpecError("table", "k must run without gaps")
    if "alpha" not in header:
        logging.warning("measure table without header; assuming alpha=0")
    alpha = float(header.get("alpha", 0.0))
    detail = dict(header.get("source_detail") or {})
    detail["source"] = header.get("source", "unknown")
    return InvariantMeasure(
        values,
        k_min=int(ks[0]),
        alpha=alpha,
        lam=float(header.get("lambda", 1.0)),
        includes_zero=bool(header.get("includes_zero", ks[0] == 0)),
        source=MeasureSource.table,
        source_detail=detail,
        trunc_error_hint=float(header.get("trunc_error_hint", 0.0)),
        offspring_spec=header.get("offspring_spec") or {},
        measure_spec=header.get("measure_spec"),
    )


def load_measure_table(path):
    """Read the measure table stored at ``path``.

    Raises:
        InvalidSpecError: If the file cannot be read or is malformed.
    """
    try:
        with open(path) as f:
            return read_measure_table(f)
    except OSError as e:
        raise InvalidSpecError("table", str(e))
