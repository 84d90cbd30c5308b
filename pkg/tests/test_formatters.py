import io
import json

import numpy as np
import pytest

from bgwqsd.construct import sibuya_pmf
from bgwqsd.errors import InvalidSpecError
from bgwqsd.fields import MC_FIELDS, VERIFICATION_FIELDS
from bgwqsd.formatters import (
    TabularOutput,
    VerboseOutput,
    write_measure_table,
    write_reports,
    write_sequence_table,
)
from bgwqsd.montecarlo import compare_with_reference
from bgwqsd.parsers import read_measure_table
from bgwqsd.reports import VerificationReport

from .utils import fixture_path, load_fixture


@pytest.fixture
def reports():
    return [
        VerificationReport("functional_equation", 1e-12, 1e-8, {"zgrid": np.ones(2)}),
        VerificationReport("eigen", 0.5, 1e-6),
    ]


@pytest.fixture
def sibuya_table():
    with open(fixture_path("sibuya_half.csv")) as f:
        return read_measure_table(f)


def test_report_verdict(reports):
    assert reports[0].passed
    assert not reports[1].passed
    assert reports[0].to_dict()["details"] == {"zgrid": [1.0, 1.0]}


def test_tabular_output(reports):
    table = str(TabularOutput().output(VERIFICATION_FIELDS, reports))
    assert "| Check" in table
    assert "functional_equation" in table
    assert "1.000e-12" in table
    assert "NO" in table


def test_verbose_output(reports):
    text = VerboseOutput().output(VERIFICATION_FIELDS, reports)
    lines = text.splitlines()
    assert "Check    : functional_equation" in lines
    assert "Passed   : yes" in lines
    assert "Passed   : NO" in lines


def test_mc_report_output():
    values = np.array([1] * 50 + [2] * 50)
    report = compare_with_reference("qsd_sampling", values, [0.5, 0.5], 3)
    text = VerboseOutput().output(MC_FIELDS, [report])
    assert "Seed     : 3" in text.splitlines()
    assert "Samples  : 100" in text.splitlines()


def test_write_reports(reports):
    out = io.StringIO()
    write_reports(out, reports)
    data = json.loads(out.getvalue())
    assert [r["check_name"] for r in data] == ["functional_equation", "eigen"]
    assert [r["passed"] for r in data] == [True, False]


def test_read_measure_table(sibuya_table):
    np.testing.assert_allclose(sibuya_table.nu, sibuya_pmf(0.5, 8), rtol=1e-14)
    assert sibuya_table.k_min == 1
    assert sibuya_table.alpha == 0.5
    assert sibuya_table.lam == pytest.approx(2**-0.5)
    assert str(sibuya_table.source) == "table"
    assert sibuya_table.source_detail == {"kind": "qsd_power", "source": "closed_form"}
    assert sibuya_table.offspring_spec == {"m": 0.5, "type": "pure_death"}


def test_measure_table_is_written_exactly(sibuya_table):
    out = io.StringIO()
    write_measure_table(out, sibuya_table)
    out.seek(0)
    again = read_measure_table(out)
    np.testing.assert_array_equal(again.nu, sibuya_table.nu)
    assert again.measure_spec == sibuya_table.measure_spec
    rows = load_fixture("sibuya_half.csv").splitlines()[1:]
    assert out.getvalue().splitlines()[1:] == rows


def test_broken_tables():
    with pytest.raises(InvalidSpecError):
        read_measure_table(io.StringIO("k,nu_k\n1,0.5\n3,0.25\n"))
    with pytest.raises(InvalidSpecError):
        read_measure_table(io.StringIO("n,p\n1,0.5\n"))
    with pytest.raises(InvalidSpecError):
        read_measure_table(io.StringIO("# {broken\nk,nu_k\n1,0.5\n"))


def test_sequence_table():
    out = io.StringIO()
    write_sequence_table(out, {"n": [0, 1], "p_n": [1.0, 0.1]}, {"mean": 0.5})
    assert out.getvalue().splitlines() == [
        '# {"mean": 0.5}',
        "n,p_n",
        "0,1",
        "1,0.10000000000000001",
    ]
