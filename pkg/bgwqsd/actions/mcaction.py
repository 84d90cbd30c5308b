"""Provides the Monte Carlo action."""

from dataclasses import replace

from ..domains import ClosedFormKind, MCMode
from ..errors import InvalidSpecError
from ..montecarlo import (
    SubordinatorSpec,
    qsd_sampling_test,
    quasi_stationarity_test,
    semi_stability_report,
    yaglom_mc,
)
from ..yaglom import yaglom_limit
from .action import Action
from .constructaction import build_measure


class MCAction(Action):
    """Run one Monte Carlo experiment chosen by ``mode``.

    ``qsd`` compares sample_qsd draws with the constructed QSD table,
    ``stationarity`` checks one conditioned step started from the table and
    ``yaglom`` simulates ``steps`` generations from one ancestor.
    """

    def action(self):
        config = self.config
        dist = config.distribution()
        mode = MCMode.from_str(config.mode)
        yaglom = yaglom_limit(dist, config.order, config.tol, config.n_max)
        if mode is MCMode.yaglom:
            report = yaglom_mc(
                dist, config.steps, config.samples, config.seed, config.shards,
                config.order, yaglom,
            )
            self.reports.append(report)
            return report
        if mode is MCMode.qsd:
            config = self._qsd_config(config)
        nu, measure = build_measure(config, dist, yaglom)
        if mode is MCMode.stationarity:
            report = quasi_stationarity_test(
                dist, nu, config.samples, config.seed, config.shards
            )
            self.reports.append(report)
            return report
        if nu.alpha == 1:
            spec = SubordinatorSpec.drift_only()
        else:
            spec = SubordinatorSpec.from_measure(nu.alpha, measure)
            self.reports.append(semi_stability_report(spec))
        report = qsd_sampling_test(
            spec,
            yaglom.nu_min,
            nu,
            config.samples,
            config.seed,
            config.shards,
            config.order,
            config.tail,
        )
        self.reports.append(report)
        return report

    @staticmethod
    def _qsd_config(config):
        """The configuration of a QSD: Lambda is normalized on the integral route.

        Raises:
            InvalidSpecError: If the configuration describes no QSD.
        """
        if config.t is not None or config.true_measure:
            raise InvalidSpecError(
                "mc", "qsd sampling needs a QSD, not an extremal or true measure"
            )
        if config.kind is None:
            return replace(config, normalize=True)
        if ClosedFormKind.from_str(config.kind) is not ClosedFormKind.qsd_power:
            raise InvalidSpecError("mc", "qsd sampling needs --kind qsd_power")
        return config
