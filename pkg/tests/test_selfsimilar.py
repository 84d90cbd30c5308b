import math

import numpy as np
import pytest
from scipy.special import gamma, gammaln
from scipy.stats import poisson

from bgwqsd.construct import closed_form_scale
from bgwqsd.errors import BandSumDiverging, InvalidSpecError, OutOfRangeAlpha, ZeroMass
from bgwqsd.selfsimilar import (
    SelfSimilarMeasure,
    fold_into_band,
    gamma_closed_form,
    gamma_integral_check,
    integrate_selfsimilar,
    load_measure,
    normalize_for_qsd,
)


@pytest.mark.parametrize("x", [1e-7, 0.3, 1.0, 1.9999, 2.0, 17.0, 3e8])
def test_fold_into_band(x):
    y = fold_into_band(x, 0.5)
    assert 1.0 <= y < 2.0
    assert math.log2(x / y) == pytest.approx(round(math.log2(x / y)), abs=1e-9)


def test_fundamental_mass():
    measure = SelfSimilarMeasure.log_uniform(0.5, 2.0)
    assert measure.fundamental_mass == pytest.approx(2 * math.log(2))
    atoms = SelfSimilarMeasure(0.5, atoms=((3.0, 0.25), (0.7, 0.5)))
    assert atoms.fundamental_mass == pytest.approx(0.75)
    assert [x for x, _ in atoms.atoms] == pytest.approx([1.4, 1.5])


def test_exact_mass():
    measure = SelfSimilarMeasure.log_uniform(0.25, 3.0)
    assert measure.mass(0.1, 10.0) == pytest.approx(3.0 * math.log(100.0))
    assert measure.mass(0.1, 10.0, 0.5) == pytest.approx(
        3.0 * (0.1**-0.5 - 10.0**-0.5) / 0.5
    )
    atom = SelfSimilarMeasure.atom(0.5, 1.5)
    # atoms at 1.5 and 3.0 lie in [1, 4)
    assert atom.mass(1.0, 4.0) == pytest.approx(2.0)
    assert atom.mass(1.0, 4.0, 1.0) == pytest.approx(1 / 1.5 + 1 / 3.0)


def test_cells_reproduce_log_uniform():
    cells = SelfSimilarMeasure(0.5, density=np.full(8, 1.0))
    flat = SelfSimilarMeasure.log_uniform(0.5)
    f = lambda x: -np.expm1(-x)  # noqa: E731
    a = integrate_selfsimilar(cells, 0.4, f).value
    b = integrate_selfsimilar(flat, 0.4, f).value
    assert a == pytest.approx(b, rel=1e-8)


def test_laplace_integral_of_log_uniform():
    alpha = 0.5
    result = integrate_selfsimilar(
        SelfSimilarMeasure.log_uniform(0.5), alpha, lambda x: -np.expm1(-x)
    )
    assert result.value == pytest.approx(gamma(1 - alpha) / alpha, rel=1e-9)
    assert result.bands_used[0] < 0 < result.bands_used[1]


def test_vector_valued_integrand():
    thetas = np.array([0.5, 1.0, 2.0])
    result = integrate_selfsimilar(
        SelfSimilarMeasure.log_uniform(0.25),
        0.3,
        lambda x: -np.expm1(-np.outer(x, thetas)),
    )
    expected = gamma(0.7) / 0.3 * thetas**0.3
    np.testing.assert_allclose(result.value, expected, rtol=1e-9)


@pytest.mark.parametrize("a", [0.25, 0.5, 0.9])
@pytest.mark.parametrize("alpha", [-1.0, -0.5, 0.0, 0.3, 0.7])
def test_gamma_integral(a, alpha):
    check = gamma_integral_check(a, alpha)
    assert check.rel_error < 1e-8
    assert check.closed_form == pytest.approx(gamma_closed_form(a, alpha))


def test_gamma_check_rejects_alpha_one():
    with pytest.raises(OutOfRangeAlpha):
        gamma_integral_check(0.5, 1.0)
    with pytest.raises(InvalidSpecError):
        gamma_integral_check(1.5, 0.5)


def test_divergent_band_sum():
    with pytest.raises(BandSumDiverging):
        integrate_selfsimilar(
            SelfSimilarMeasure.log_uniform(0.5), 0.0, np.ones_like, max_bands=5
        )


def test_zero_measure_has_no_integral():
    with pytest.raises(ZeroMass):
        integrate_selfsimilar(SelfSimilarMeasure(0.5), 0.5, np.ones_like)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_normalize_for_qsd(alpha):
    measure = normalize_for_qsd(SelfSimilarMeasure.log_uniform(0.5, 7.0), alpha)
    assert measure.log_uniform_weight == pytest.approx(
        closed_form_scale(alpha, "qsd_power"), rel=1e-9
    )
    check = integrate_selfsimilar(measure, alpha, lambda x: -np.expm1(-x), nodes=48)
    assert check.value == pytest.approx(1.0, abs=1e-8)


def test_normalize_rejects_bad_input():
    with pytest.raises(OutOfRangeAlpha):
        normalize_for_qsd(SelfSimilarMeasure.log_uniform(0.5), 0.0)
    with pytest.raises(ZeroMass):
        normalize_for_qsd(SelfSimilarMeasure(0.5), 0.5)


def test_load_measure_specs():
    m = 0.5
    assert load_measure({"type": "log_uniform", "c": 2}, m).log_uniform_weight == 2.0
    atoms = load_measure('{"type": "atoms", "atoms": [[3.0, 1.0]]}', m)
    assert atoms.atoms == ((1.5, 1.0),)
    cells = load_measure({"type": "log_density", "cells": [1.0, 2.0]}, m)
    assert cells.fundamental_mass == pytest.approx(1.5 * math.log(2))
    with pytest.raises(InvalidSpecError):
        load_measure({"type": "lebesgue"}, m)
    with pytest.raises(InvalidSpecError):
        load_measure({"type": "atoms"}, m)


def test_spec_keeps_scale_and_sums():
    m = 0.5
    scaled = SelfSimilarMeasure.log_uniform(m, 1.0).scaled(0.25)
    again = load_measure(scaled.to_spec(), m)
    assert again.log_uniform_weight == pytest.approx(0.25)
    total = SelfSimilarMeasure.log_uniform(m) + SelfSimilarMeasure.atom(m, 1.2, 0.5)
    reloaded = load_measure(total.to_spec(), m)
    assert reloaded.fundamental_mass == pytest.approx(total.fundamental_mass)


def laplace(x):
    return -np.expm1(-x)


@pytest.fixture
def composite():
    """Uniform part, two atoms and a bumpy density on [1, 2)."""
    cells = 1.0 + 0.5 * np.sin(np.linspace(0.0, 2 * np.pi, 16))
    return SelfSimilarMeasure(0.5, 0.2, ((1.1, 0.3), (1.7, 0.1)), cells)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.4])
def test_integral_scales_with_band_shift(composite, alpha):
    m = composite.m
    f = lambda x: x * np.exp(-x)  # noqa: E731
    value = integrate_selfsimilar(composite, alpha, f).value
    shifted = integrate_selfsimilar(composite, alpha, lambda x: f(m * x)).value
    assert shifted == pytest.approx(m**alpha * value, rel=1e-9)


def test_integral_is_linear_in_the_measure(composite):
    other = SelfSimilarMeasure.atom(0.5, 1.3, 2.0)
    alpha = 0.4
    total = integrate_selfsimilar(composite + other, alpha, laplace).value
    parts = [
        integrate_selfsimilar(mu, alpha, laplace).value for mu in (composite, other)
    ]
    assert total == pytest.approx(sum(parts), rel=1e-9)
    scaled = integrate_selfsimilar(composite.scaled(3.5), alpha, laplace).value
    assert scaled == pytest.approx(3.5 * parts[0], rel=1e-12)


@pytest.mark.parametrize(
    "measure",
    [
        SelfSimilarMeasure.log_uniform(0.5),
        SelfSimilarMeasure(0.5, density=np.linspace(0.5, 2.0, 8)),
    ],
)
def test_doubling_nodes_changes_little(measure):
    coarse = integrate_selfsimilar(measure, 0.3, laplace).value
    fine = integrate_selfsimilar(measure, 0.3, laplace, nodes=64).value
    assert fine == pytest.approx(coarse, rel=1e-9)
    nodes, _ = measure.fundamental_rule(64)
    assert nodes.size == 2 * measure.fundamental_rule()[0].size


@pytest.mark.parametrize(
    "measure",
    [
        SelfSimilarMeasure.log_uniform(0.5),
        SelfSimilarMeasure.atom(0.5, 1.3),
        SelfSimilarMeasure(0.5, density=np.array([0.1, 3.0, 0.0, 1.0])),
    ],
)
def test_integral_is_comparable_to_lebesgue(measure):
    alpha, beta, gamma_ = 0.3, 1.0, 0.5
    m = measure.m

    def f(x):
        return np.where(x < 1.0, x**beta, x ** (-gamma_))

    value = integrate_selfsimilar(measure, alpha, f).value
    lebesgue = 1 / (beta - alpha) + 1 / (gamma_ + alpha)
    ratio = (value / measure.fundamental_mass) / (lebesgue / math.log(1 / m))
    C = m ** -max(beta - alpha, gamma_ + alpha)
    assert 1 / C <= ratio <= C


@pytest.mark.filterwarnings("error")
def test_steep_vector_integrand_stays_quiet():
    alpha = 0.5
    k = np.arange(1, 201)
    result = integrate_selfsimilar(
        SelfSimilarMeasure.log_uniform(0.5),
        alpha,
        lambda x: poisson.pmf(k[None, :], x[:, None]),
        span=(1.0, 500.0),
    )
    expected = np.exp(gammaln(k - alpha) - gammaln(k + 1))
    np.testing.assert_allclose(result.value[:40], expected[:40], rtol=1e-9)
    assert np.all(np.isfinite(result.value))
