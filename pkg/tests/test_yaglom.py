import numpy as np
import pytest

from bgwqsd.errors import InvalidSpecError, NoConvergence
from bgwqsd.verify import survival_probability
from bgwqsd.yaglom import h_identity_report, iterate_pgf, yaglom_limit


def test_pure_death_is_exact(pure_death):
    res = yaglom_limit(pure_death, 64)
    expected = np.zeros(65)
    expected[1] = 1.0
    assert np.array_equal(res.H.coeffs, expected)
    assert res.iterations == 1
    np.testing.assert_allclose(res.ratio_seq, 0.5, rtol=0)


def test_linear_fractional_limit(geometric_yaglom, geometric):
    m = geometric.mean
    k = np.arange(1, 101)
    np.testing.assert_allclose(
        geometric_yaglom.nu_min[:100], (1 - m) * m ** (k - 1), atol=1e-10
    )
    assert geometric_yaglom.sup_delta < 1e-12


def test_survival_ratio_converges_to_mean(geometric_yaglom, geometric, quadratic):
    assert abs(geometric_yaglom.ratio_seq[-1] - geometric.mean) < 1e-6
    res = yaglom_limit(quadratic, 128)
    assert abs(res.ratio_seq[-1] - quadratic.mean) < 1e-6
    assert res.H.coeffs[0] == 0.0
    assert res.nu_min.sum() == pytest.approx(1.0, abs=1e-9)


def test_survival_sequence_matches_iteration(geometric_yaglom, geometric):
    for n in (1, 4, 9):
        assert geometric_yaglom.p_seq[n] == pytest.approx(
            survival_probability(geometric, n), rel=1e-12
        )


def test_iterate_pgf(pure_death):
    f2 = iterate_pgf(pure_death, 2, 8)
    np.testing.assert_allclose(f2.coeffs[:2], [0.75, 0.25])
    assert not np.any(f2.coeffs[2:])


def test_h_identities(pure_death, geometric, geometric_yaglom):
    for dist, res in ((pure_death, yaglom_limit(pure_death, 64)), (geometric, geometric_yaglom)):
        report = h_identity_report(res, dist)
        assert report.passed
        assert report.details["h_at_f0"] < 1e-10


def test_no_convergence(geometric):
    with pytest.raises(NoConvergence):
        yaglom_limit(geometric, 64, tol=1e-12, n_max=2)


def test_tolerance_must_be_positive(geometric):
    with pytest.raises(InvalidSpecError):
        yaglom_limit(geometric, 64, tol=0.0)


@pytest.mark.parametrize("offspring", ["quadratic", "geometric_third"])
def test_limit_is_stable_under_longer_tables(request, offspring):
    dist = request.getfixturevalue(offspring)
    short = yaglom_limit(dist, 128)
    long = yaglom_limit(dist, 256)
    np.testing.assert_allclose(long.H.coeffs[:129], short.H.coeffs, rtol=0, atol=1e-10)
    assert long.iterations >= short.iterations
