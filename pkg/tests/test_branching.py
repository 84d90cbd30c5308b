import numpy as np
import pytest
from scipy.stats import binom, chisquare

from bgwqsd.branching import (
    OffspringDistribution,
    load_offspring,
    q_process_block,
    simulate_step,
    simulate_steps,
    transition_block,
    transition_row,
)
from bgwqsd.errors import InvalidPmf, InvalidSpecError, NotSubcritical
from bgwqsd.series import evaluate

from .utils import load_fixture


def test_load_pure_death(pure_death):
    assert pure_death.mean == 0.5
    assert pure_death.is_pure_death
    assert list(pure_death.pmf) == [0.5, 0.5]


def test_load_geometric(geometric):
    assert geometric.mean == pytest.approx(0.25, rel=1e-10)
    assert geometric.pmf[0] == pytest.approx(0.8, rel=1e-12)


def test_load_from_json_text():
    dist = load_offspring(load_fixture("quadratic.json"))
    assert dist.mean == pytest.approx(0.7)
    assert dist.degree == 2


def test_supercritical_rejected():
    with pytest.raises(NotSubcritical):
        load_offspring({"type": "pmf", "p": [0.2, 0.4, 0.4]})
    with pytest.raises(NotSubcritical):
        load_offspring({"type": "pure_death", "m": 1.0})


def test_bad_pmf_rejected():
    with pytest.raises(InvalidPmf):
        OffspringDistribution([0.5, 0.6])
    with pytest.raises(InvalidPmf):
        OffspringDistribution([1.2, -0.2])


def test_bad_spec_rejected():
    with pytest.raises(InvalidSpecError):
        load_offspring({"type": "poisson", "m": 0.5})
    with pytest.raises(InvalidSpecError):
        load_offspring({"type": "geometric"})
    with pytest.raises(InvalidSpecError):
        load_offspring("{not json")


def test_death_polynomial(quadratic):
    u = np.linspace(0.0, 1.0, 11)
    phi = evaluate(quadratic.death_polynomial(), u)
    np.testing.assert_allclose(phi, 1.0 - quadratic.pgf_at(1.0 - u), atol=1e-15)


def test_pure_death_row_is_binomial(pure_death):
    row = transition_row(pure_death, 3, 10)
    j = np.arange(1, 11)
    np.testing.assert_allclose(row.row, binom.pmf(j, 3, 0.5), atol=1e-16)
    assert row.to_zero == pytest.approx(0.125)
    assert row.overflow == pytest.approx(0.0, abs=1e-15)


def test_row_mass_is_conserved(geometric):
    row = transition_row(geometric, 7, 12)
    assert row.row.sum() + row.deficit == pytest.approx(1.0, abs=1e-14)
    assert row.overflow > 0


def test_block_matches_rows(quadratic):
    block = transition_block(quadratic, 20)
    for i in (1, 5, 20):
        row = transition_row(quadratic, i, 20)
        np.testing.assert_allclose(block.entries[i - 1], row.row, atol=1e-16)
        assert block.zero_column[i - 1] == pytest.approx(row.to_zero)


def test_with_zero_is_stochastic(quadratic):
    full = transition_block(quadratic, 40).with_zero()
    assert full[0, 0] == 1.0
    # rows i <= 20 cannot leave {0..40}
    np.testing.assert_allclose(full[:21].sum(axis=1), 1.0, atol=1e-13)


def test_identity_is_m_harmonic(quadratic):
    block = transition_block(quadratic, 40)
    states = np.arange(1, 41)
    image = block.entries @ states
    np.testing.assert_allclose(image[:20], quadratic.mean * states[:20], rtol=1e-12)
    q = q_process_block(block, quadratic.mean)
    np.testing.assert_allclose(q[:20].sum(axis=1), 1.0, rtol=1e-12)


def test_simulation_is_reproducible(quadratic):
    z = np.array([0, 1, 5, 50, 0, 3])
    first = simulate_steps(quadratic, z, np.random.default_rng(7))
    second = simulate_steps(quadratic, z, np.random.default_rng(7))
    assert np.array_equal(first, second)
    assert first[0] == 0 and first[4] == 0
    assert np.all(first <= 2 * z)


def test_simulation_mean(quadratic, pure_death):
    rng = np.random.default_rng(1)
    n = 200_000
    for dist in (quadratic, pure_death):
        kids = simulate_steps(dist, np.ones(n, dtype=np.int64), rng)
        sd = np.sqrt(kids.var() / n)
        assert abs(kids.mean() - dist.mean) < 5 * sd
    assert simulate_step(pure_death, 0, rng) == 0


@pytest.mark.slow
@pytest.mark.parametrize(
    "offspring,start,K", [("quadratic", 3, 6), ("geometric", 4, 64)]
)
def test_simulation_follows_transition_row(request, offspring, start, K):
    dist = request.getfixturevalue(offspring)
    n = 400_000
    rng = np.random.default_rng(12)
    after = simulate_steps(dist, np.full(n, start, dtype=np.int64), rng)
    observed = np.bincount(np.minimum(after, K + 1), minlength=K + 2).astype(float)
    row = transition_row(dist, start, K)
    expected = n * np.concatenate([[row.to_zero], row.row, [row.overflow]])
    keep = expected >= 5
    observed = np.append(observed[keep], observed[~keep].sum())
    expected = np.append(expected[keep], expected[~keep].sum())
    if expected[-1] < 5:
        observed[-2] += observed[-1]
        expected[-2] += expected[-1]
        observed, expected = observed[:-1], expected[:-1]
    expected *= observed.sum() / expected.sum()
    assert chisquare(observed, expected).pvalue > 1e-3
