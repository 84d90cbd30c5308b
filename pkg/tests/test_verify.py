import math

import numpy as np
import pytest

from bgwqsd.construct import closed_form_measure, extremal_invariant_measure, sibuya_pmf
from bgwqsd.errors import InsufficientSupport, InvalidSpecError, OutOfRangeAlpha
from bgwqsd.selfsimilar import SelfSimilarMeasure
from bgwqsd.series import evaluate
from bgwqsd.verify import (
    CircleMeasure,
    compare_recovery,
    eigen_residual,
    functional_equation_residual,
    hoppe_q,
    hoppe_roundtrip,
    joffe_partial_sums,
    ks_convert,
    ks_convert_inverse,
    log_bins,
    recover_lambda,
    survival_probability,
    tail_bound_profile,
)


@pytest.fixture
def geometric_qsd(geometric, geometric_yaglom):
    return closed_form_measure(geometric, 0.5, "qsd_power", K=512, yaglom=geometric_yaglom)


def test_functional_equation_of_qsd(geometric, geometric_qsd):
    report = functional_equation_residual(geometric_qsd, geometric)
    assert report.passed
    assert report.details["residuals"].size == 19
    inner = functional_equation_residual(
        geometric_qsd, geometric, zgrid=[0.1, 0.2, 0.3, 0.4, 0.5]
    )
    assert inner.residual < 1e-8


def test_wrong_eigenvalue_is_detected(geometric, geometric_qsd):
    report = functional_equation_residual(geometric_qsd, geometric, lam=2 * geometric_qsd.lam)
    assert not report.passed
    assert report.residual > 1e-2


def test_zgrid_must_stay_inside(geometric, geometric_qsd):
    with pytest.raises(InvalidSpecError):
        functional_equation_residual(geometric_qsd, geometric, zgrid=[0.5, 0.99])


def test_eigen_residual_of_qsd(geometric, geometric_qsd):
    report = eigen_residual(geometric_qsd, geometric, K_report=64)
    assert report.passed
    assert report.details["K"] == 512


def test_eigen_residual_of_true_measure(pure_death):
    nu = closed_form_measure(pure_death, -1.0, "true_power", K=512)
    report = eigen_residual(nu, pure_death, K_report=128)
    assert report.passed
    assert report.details["rows"].size == 129


def test_eigen_residual_wrong_lambda(pure_death):
    nu = closed_form_measure(pure_death, 0.5, "qsd_power", K=256)
    assert eigen_residual(nu, pure_death).passed
    assert not eigen_residual(nu, pure_death, lam=0.6).passed


def test_eigen_report_rows_limited(pure_death):
    nu = closed_form_measure(pure_death, 0.5, "qsd_power", K=64)
    with pytest.raises(InvalidSpecError):
        eigen_residual(nu, pure_death, K_report=40)


def test_survival_probability(pure_death, geometric_third):
    assert survival_probability(pure_death, 10) == pytest.approx(2.0**-10, rel=1e-14)
    assert survival_probability(geometric_third, 5) == pytest.approx(1 / 364, rel=1e-12)


def test_log_bins():
    edges = log_bins((0.25, 4.0), 8, 0.5)
    assert edges.size == 33
    assert edges[0] == 0.25
    assert edges[-1] == pytest.approx(4.0)
    np.testing.assert_allclose(np.diff(np.log2(edges)), 1 / 8)


def test_recover_log_uniform(pure_death):
    alpha = 0.5
    nu = closed_form_measure(pure_death, alpha, "qsd_power", K=2**14)
    recovered = recover_lambda(nu, alpha, pure_death, 12)
    assert recovered.p_n == pytest.approx(2.0**-12)
    measure = SelfSimilarMeasure.log_uniform(0.5, alpha / math.gamma(1 - alpha))
    report = compare_recovery(recovered, measure, alpha)
    assert report.passed, report.details


def test_recovery_shifts_by_bands(pure_death):
    alpha, m = 0.5, pure_death.mean
    nu = closed_form_measure(pure_death, alpha, "qsd_power", K=2**14)
    edges = log_bins((0.25, 4.0), 8, m)
    later = recover_lambda(nu, alpha, pure_death, 12, bins=edges)
    earlier = recover_lambda(nu, alpha, pure_death, 11, bins=edges / m)
    np.testing.assert_allclose(later.masses, m**-alpha * earlier.masses, rtol=1e-12)
    ratios = later.masses[8:] / later.masses[:-8]
    np.testing.assert_allclose(ratios, m**alpha, rtol=0.1)


@pytest.mark.slow
def test_recover_log_uniform_far_out(pure_death):
    alpha = 0.3
    nu = closed_form_measure(pure_death, alpha, "qsd_power", K=2**22)
    recovered = recover_lambda(nu, alpha, pure_death, 20)
    measure = SelfSimilarMeasure.log_uniform(0.5, alpha / math.gamma(1 - alpha))
    assert compare_recovery(recovered, measure, alpha).residual < 0.05


def test_recover_atom(pure_death):
    nu = extremal_invariant_measure(pure_death, 0.0, K=2**13)
    recovered = recover_lambda(nu, 0.0, pure_death, 12, bins=[0.8, 0.95, 1.05, 1.25])
    assert recovered.masses[1] > 0.99 * recovered.masses.sum()
    assert recovered.masses[1] == pytest.approx(1.0, abs=0.01)


def test_recover_needs_support(pure_death):
    nu = closed_form_measure(pure_death, 0.5, "qsd_power", K=64)
    with pytest.raises(InsufficientSupport):
        recover_lambda(nu, 0.5, pure_death, 12)


def test_hoppe_roundtrip(pure_death, geometric):
    assert hoppe_roundtrip(pure_death, 0.5).residual < 1e-8
    report = hoppe_roundtrip(geometric, 0.3, tolerance=1e-6)
    assert report.passed
    assert report.details["denominator"] == pytest.approx(1 / 0.3, rel=1e-8)


def test_hoppe_rejects_alpha(pure_death):
    with pytest.raises(OutOfRangeAlpha):
        hoppe_roundtrip(pure_death, 1.0)


def test_hoppe_function(geometric, geometric_yaglom):
    hq = hoppe_q(geometric, 256, geometric_yaglom)
    assert hq(0.0) == 0.0
    assert hq.equation_residual(geometric) < 1e-10
    q = hq.series()
    m = geometric.mean
    k = np.arange(1, 65)
    assert q.coeffs[0] == 0.0
    expected = (m**k - 1) / (k * math.log(m))
    np.testing.assert_allclose(q.coeffs[1:65], expected, rtol=1e-8)
    assert evaluate(q, 0.3) == pytest.approx(hq(0.3), rel=1e-12)


def test_ks_conversion():
    m = 0.5
    period = math.log(2)
    measure = ks_convert(CircleMeasure(uniform=1.0), period, m)
    assert measure.log_uniform_weight == pytest.approx(1.0)
    mu, total = ks_convert_inverse(measure)
    assert total == pytest.approx(period)
    assert mu.uniform == pytest.approx(1.0)
    atom = ks_convert(CircleMeasure(atoms=((0.5, 1.0),)), 2.0, m)
    assert atom.atoms[0] == pytest.approx((2**0.5, 2.0))
    mu, total = ks_convert_inverse(atom)
    assert total == pytest.approx(2.0)
    assert mu.atoms[0] == pytest.approx((0.5, 1.0))
    assert mu.total_mass == pytest.approx(1.0)


def test_joffe_pure_death(pure_death):
    sums = joffe_partial_sums(pure_death, 6)
    np.testing.assert_allclose(sums.increments, 1.0)
    np.testing.assert_allclose(sums.partial_sums, np.arange(1, 7))


def test_joffe_geometric(geometric):
    sums = joffe_partial_sums(geometric, 12)
    assert np.all(np.diff(sums.q) > 0)
    assert np.all(np.diff(sums.partial_sums) > 0)
    assert np.all(sums.increments > 0)


def test_tail_bound_profile(pure_death):
    nu = closed_form_measure(pure_death, 0.5, "qsd_power", K=4096)
    np.testing.assert_allclose(nu.nu, sibuya_pmf(0.5, 4096), rtol=1e-12)
    profile = tail_bound_profile(nu, 0.5)
    assert profile.size == 13
    assert np.all(profile[:9] > 0.3)
    assert np.all(profile[:9] < 1.0)
