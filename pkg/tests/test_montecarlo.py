import logging
import math

import numpy as np
import pytest

from bgwqsd.construct import closed_form_measure, sibuya_pmf
from bgwqsd.errors import NotNormalizedError, OutOfRangeAlpha, TailMassTooLarge
from bgwqsd.montecarlo import (
    QSDSampler,
    SubordinatorSpec,
    compare_with_reference,
    qsd_sampling_test,
    quasi_stationarity_test,
    sample_qsd,
    semi_stability_report,
    yaglom_mc,
)
from bgwqsd.selfsimilar import SelfSimilarMeasure
from bgwqsd.utils import run_sharded, shard_sizes
from bgwqsd.yaglom import yaglom_limit

ALPHA = 0.5


@pytest.fixture
def spec():
    """Normalized Lambda = alpha / Gamma(1 - alpha) dx/x, kappa(theta) = theta^alpha."""
    measure = SelfSimilarMeasure.log_uniform(0.5, ALPHA / math.gamma(1 - ALPHA))
    return SubordinatorSpec.from_measure(ALPHA, measure)


@pytest.fixture
def point_mass():
    return np.concatenate([[1.0], np.zeros(63)])


def test_kappa_is_a_power(spec):
    thetas = np.array([0.5, 1.0, 2.0, 4.0])
    np.testing.assert_allclose(spec.kappa(thetas), thetas**ALPHA, rtol=1e-8)
    assert spec.kappa_at_1 == pytest.approx(1.0, abs=1e-8)


def test_semi_stability(spec):
    report = semi_stability_report(spec)
    assert report.passed
    assert report.details["thetas"].tolist() == [1.0, 0.5]


def test_unnormalized_measure_is_rejected():
    with pytest.raises(NotNormalizedError):
        SubordinatorSpec.from_measure(ALPHA, SelfSimilarMeasure.log_uniform(0.5, 1.0))
    with pytest.raises(OutOfRangeAlpha):
        SubordinatorSpec.from_measure(1.0, SelfSimilarMeasure.log_uniform(0.5, 1.0))


def test_drift_only(point_mass):
    draws = sample_qsd(
        SubordinatorSpec.drift_only(), point_mass, np.random.default_rng(1), 100
    )
    assert np.all(draws == 1)


def test_single_draw(spec, point_mass):
    value = sample_qsd(spec, point_mass, np.random.default_rng(3), K=64)
    assert isinstance(value, int)
    assert value >= 1


def test_sample_qsd_against_sibuya(spec, point_mass):
    draws = sample_qsd(spec, point_mass, np.random.default_rng(7), 200_000, K=64)
    report = compare_with_reference("qsd_sampling", draws, sibuya_pmf(ALPHA, 64), 7)
    assert report.tv_distance < 0.015
    assert report.details["overflow"] == pytest.approx(
        report.details["reference_deficit"], abs=0.005
    )


@pytest.mark.slow
def test_sample_qsd_against_sibuya_many(spec, point_mass):
    draws = sample_qsd(spec, point_mass, np.random.default_rng(11), 1_000_000, K=64)
    report = compare_with_reference("qsd_sampling", draws, sibuya_pmf(ALPHA, 64), 11)
    assert report.tv_distance < 0.01


@pytest.mark.slow
def test_sampling_matches_constructed_measure(geometric, geometric_yaglom):
    c = ALPHA / math.gamma(1 - ALPHA)
    spec = SubordinatorSpec.from_measure(
        ALPHA, SelfSimilarMeasure.log_uniform(geometric.mean, c)
    )
    nu = closed_form_measure(
        geometric, ALPHA, "qsd_power", K=256, yaglom=geometric_yaglom
    )
    report = qsd_sampling_test(
        spec, geometric_yaglom.nu_min, nu, 1_000_000, seed=13, shards=4, K=256
    )
    assert report.tv_distance < 0.01
    assert report.passed


def test_strict_tail_raises(spec, point_mass):
    with pytest.raises(TailMassTooLarge):
        QSDSampler(spec, point_mass, K=64, tail="strict")


def test_sampler_draws_compound_laws(spec, geometric_yaglom):
    sampler = QSDSampler(spec, geometric_yaglom.nu_min, K=64)
    draws = sampler.sample(np.random.default_rng(5), 1000)
    assert draws.dtype == np.int64
    assert np.all(draws >= 1)


def test_compare_with_reference():
    values = np.array([1] * 50 + [2] * 25 + [3] * 25)
    report = compare_with_reference("exact", values, [0.5, 0.25, 0.25], 0)
    assert report.tv_distance == pytest.approx(0.0)
    assert report.chi2_stat == pytest.approx(0.0)
    assert report.passed
    assert report.to_dict()["passed"] is True
    shifted = compare_with_reference("shifted", values + 5, [0.5, 0.25, 0.25], 0)
    assert shifted.details["overflow"] == 1.0
    assert shifted.tv_distance == pytest.approx(1.0)
    assert not shifted.passed


def test_quasi_stationarity(pure_death):
    nu = sibuya_pmf(ALPHA, 512)
    report = quasi_stationarity_test(pure_death, nu, 200_000, seed=2)
    assert report.passed, report.tv_distance
    assert report.details["table_mass"] == pytest.approx(nu.sum())
    assert report.details["survivors"] > 100_000


def test_quasi_stationarity_reports_sampling_threshold(pure_death, caplog):
    nu = sibuya_pmf(ALPHA, 512)
    with caplog.at_level(logging.WARNING):
        report = quasi_stationarity_test(pure_death, nu, 20_000, seed=2)
    assert "misses" in caplog.text
    assert report.details["allowance"] == pytest.approx(1 - nu.sum())
    assert report.threshold == pytest.approx(
        report.details["base_threshold"] + report.details["allowance"]
    )


@pytest.mark.slow
def test_quasi_stationarity_of_a_long_table(pure_death, caplog):
    nu = sibuya_pmf(0.9, 4096)
    assert 1 - nu.sum() < 1e-3
    with caplog.at_level(logging.WARNING):
        report = quasi_stationarity_test(pure_death, nu, 1_000_000, seed=6, shards=4)
    assert "misses" not in caplog.text
    assert report.tv_distance < 0.02
    assert report.tv_distance <= report.details["base_threshold"] + 1e-3


def test_quasi_stationarity_negative_control(pure_death):
    nu = np.zeros(10)
    nu[4] = 1.0
    report = quasi_stationarity_test(pure_death, nu, 20_000, seed=2)
    assert report.tv_distance > 0.05
    assert not report.passed


def test_yaglom_mc(geometric_third):
    yaglom = yaglom_limit(geometric_third, 128)
    report = yaglom_mc(geometric_third, 5, 200_000, seed=4, K=128, yaglom=yaglom)
    assert report.tv_distance < 0.12
    details = report.details
    assert details["p_n"] == pytest.approx(1 / 364)
    assert abs(details["survival_fraction"] - 1 / 364) < 5 * details["survival_sigma"]


@pytest.mark.slow
def test_yaglom_mc_many_paths(geometric_third):
    report = yaglom_mc(geometric_third, 5, 2_000_000, seed=4, shards=4, K=128)
    assert report.tv_distance < 0.04
    assert report.passed
    details = report.details
    assert abs(details["survival_fraction"] - 1 / 364) < 4 * details["survival_sigma"]


@pytest.mark.slow
def test_yaglom_mc_matches_minimal_law(geometric_third):
    yaglom = yaglom_limit(geometric_third, 128)
    report = yaglom_mc(
        geometric_third, 6, 10_000_000, seed=21, shards=4, K=128, yaglom=yaglom
    )
    assert report.details["p_n"] == pytest.approx(2 / 2186)
    assert report.passed, (report.tv_distance, report.threshold)
    assert report.details["chi2_pvalue"] > 1e-3
    k = np.arange(1, 129)
    geometric_law = (2 / 3) * (1 / 3) ** (k - 1)
    np.testing.assert_allclose(report.reference_pmf, geometric_law, atol=1e-10)


def test_yaglom_mc_reproducible(geometric):
    first = yaglom_mc(geometric, 3, 20_000, seed=9, shards=2, K=64)
    second = yaglom_mc(geometric, 3, 20_000, seed=9, shards=2, K=64)
    np.testing.assert_array_equal(first.empirical_pmf, second.empirical_pmf)
    assert first.tv_distance == second.tv_distance


def test_shards():
    assert shard_sizes(10, 3) == [4, 3, 3]
    parts = run_sharded(lambda rng, n: rng.random(n), 10, 0, 3)
    assert [p.size for p in parts] == [4, 3, 3]
    again = run_sharded(lambda rng, n: rng.random(n), 10, 0, 3)
    for a, b in zip(parts, again):
        np.testing.assert_array_equal(a, b)
