import json
from pathlib import Path

import numpy as np

from bgwqsd.cli import main

path = Path(__file__).parent / "fixtures"

PURE_DEATH = '{"type": "pure_death", "m": 0.5}'
GEOMETRIC = '{"type": "geometric", "b": 0.2}'
LOG_UNIFORM = '{"type": "log_uniform", "c": 1}'


def load_fixture(name):
    file = path / name
    return file.read_text()


def fixture_path(name):
    return str(path / name)


def read_table(file):
    """Read a CSV artifact into (header, {column: array})."""
    lines = Path(file).read_text().splitlines()
    header = {}
    if lines[0].startswith("#"):
        header = json.loads(lines[0][1:])
        lines = lines[1:]
    names = lines[0].split(",")
    rows = [[float(v) for v in line.split(",")] for line in lines[1:] if line]
    columns = np.array(rows).T
    return header, dict(zip(names, columns))


def read_reports(output_dir):
    return json.loads((Path(output_dir) / "reports.json").read_text())


def run(*argv, output_dir=None):
    """Run the command line, sending artifacts to ``output_dir``."""
    args = list(argv)
    if output_dir is not None:
        args += ["--output-dir", str(output_dir)]
    return main(args)
