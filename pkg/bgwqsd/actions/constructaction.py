"""Provides the action that builds an invariant measure table."""

import logging

from ..construct import (
    closed_form_measure,
    closed_form_scale,
    extremal_invariant_measure,
    invariant_measure,
    true_invariant_measure,
)
from ..formatters import write_measure_table
from ..selfsimilar import SelfSimilarMeasure, normalize_for_qsd
from ..verify import eigen_residual, functional_equation_residual
from ..yaglom import yaglom_limit
from .action import Action


def build_measure(config, dist, yaglom=None):
    """Construct the measure a configuration describes.

    A closed form ``kind`` wins over an extremal ``t``, which wins over the
    integral route with the configured Lambda.

    Args:
        config: The RunConfig.
        dist: The offspring law.
        yaglom: A precomputed YaglomResult.

    Returns:
        A tuple of the InvariantMeasure and the Lambda it corresponds to (None
        when there is no integral representation).
    """
    K = config.order
    m = dist.mean
    yaglom = yaglom or yaglom_limit(dist, K, config.tol, config.n_max)
    if config.kind is not None:
        alpha = config.require_alpha()
        nu = closed_form_measure(dist, alpha, config.kind, K, yaglom)
        scale = closed_form_scale(alpha, config.kind)
        measure = None if scale is None else SelfSimilarMeasure.log_uniform(m, scale)
        return nu, measure
    if config.t is not None:
        nu = extremal_invariant_measure(dist, config.t, K, config.rel_tol, yaglom)
        return nu, SelfSimilarMeasure.atom(m, m ** (-config.t))
    alpha = config.require_alpha()
    measure = config.self_similar_measure(m)
    if config.normalize:
        measure = normalize_for_qsd(measure, alpha)
        logging.info("Lambda normalized for a QSD")
    if config.true_measure:
        nu = true_invariant_measure(dist, alpha, measure, K, config.rel_tol, yaglom=yaglom)
    else:
        nu = invariant_measure(dist, alpha, measure, K, config.rel_tol, yaglom=yaglom)
    return nu, measure


def measure_checks(config, nu, dist):
    """Functional-equation and eigenvector reports of a measure table."""
    return [
        functional_equation_residual(nu, dist, config.lam, config.zgrid),
        eigen_residual(nu, dist, config.lam, K_report=config.k_report),
    ]


class ConstructAction(Action):
    """Build an invariant measure, write ``measure.csv`` and optionally verify it."""

    def action(self):
        dist = self.config.distribution()
        nu, _ = build_measure(self.config, dist)
        self.print(
            "alpha={0:g} lambda={1:.17g} source={2} K={3} mass(1..K)={4:.17g}".format(
                nu.alpha, nu.lam, nu.source, nu.order, nu.total_mass()
            )
        )
        self.write_artifact("measure.csv", lambda f: write_measure_table(f, nu))
        if self.config.verify:
            self.reports.extend(measure_checks(self.config, nu, dist))
        return nu
