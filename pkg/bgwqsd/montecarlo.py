"""Monte Carlo cross-checks: QSD sampling, one-step invariance and Yaglom limits.

QSD draws follow the first-jump law of N o S for a semi-stable subordinator
S: N is drawn from the N-law and the draw is a sum of N iid nu_min variables.
Draws of N beyond the tabulated range come from an exact sampler of the
heavy tail (``tail="exact"``).
"""

from dataclasses import dataclass, field
import logging
import math

import numpy as np
from scipy.optimize import brentq
from scipy.stats import chisquare, poisson

from .branching import CHUNK_INDIVIDUALS, simulate_steps
from .construct import InvariantMeasure, nlaw_pmf
from .domains import TailMode
from .errors import (
    InvalidSpecError,
    NoSurvivors,
    NotNormalizedError,
    OutOfRangeAlpha,
    TailMassTooLarge,
)
from .fields import ReportField
from .reports import VerificationReport, _plain
from .selfsimilar import integrate_selfsimilar
from .utils import run_sharded
from .verify import survival_probability
from .yaglom import yaglom_limit

#: Largest admissible |kappa(1) - 1|.
KAPPA_TOLERANCE = 1e-8

#: N-law deficit accepted by ``tail="strict"``.
STRICT_TAIL_LIMIT = 1e-6

#: Poisson tail probability below which rates cannot push N beyond K.
TAIL_CUT_PROBABILITY = 1e-14

#: Rates above this use the normal approximation of the Poisson law.
POISSON_NORMAL_LIMIT = 1e15

#: Sums of more than this many nu_min draws use the normal approximation.
SUM_NORMAL_LIMIT = 1 << 20

#: Table deficit above which the quasi-stationarity threshold is mostly truncation.
TABLE_DEFICIT_WARNING = 1e-3

#: Cap on sampled values (int64 headroom).
VALUE_CAP = 1 << 62

#: Samples processed per batch.
BATCH = 1 << 16


@dataclass(frozen=True, eq=False)
class SubordinatorSpec:
    """A subordinator with cumulant kappa(theta) = a theta + int (1 - e^-theta x) M(dx).

    Either alpha in (0, 1), a = 0 and M(dx) = x^-alpha Lambda(dx), or
    alpha = 1, a = 1 and M = 0.

    Attributes:
        alpha: The semi-stability index.
        measure: Lambda, None in the drift case.
        drift: a.
        kappa_at_1: kappa(1), equal to 1 up to KAPPA_TOLERANCE.
    """

    alpha: float
    measure: object = None
    drift: float = 0.0
    kappa_at_1: float = 1.0

    @classmethod
    def from_measure(cls, alpha, measure, rel_tol=1e-12):
        """Build the spec of a QSD-normalized Lambda.

        Raises:
            OutOfRangeAlpha: If alpha is outside (0, 1).
            NotNormalizedError: If kappa(1) differs from 1.
        """
        if not 0 < alpha < 1:
            raise OutOfRangeAlpha(alpha, "(0, 1)", "a semi-stable subordinator")
        result = integrate_selfsimilar(
            measure, alpha, lambda x: -np.expm1(-x), rel_tol=rel_tol
        )
        if abs(result.value - 1.0) > KAPPA_TOLERANCE:
            raise NotNormalizedError(result.value, KAPPA_TOLERANCE)
        return cls(alpha, measure, 0.0, result.value)

    @classmethod
    def drift_only(cls):
        """The alpha = 1 case: kappa(theta) = theta."""
        return cls(1.0, None, 1.0, 1.0)

    def kappa(self, thetas, rel_tol=1e-12):
        """kappa at one or several theta > 0."""
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        if self.measure is None:
            return self.drift * thetas
        result = integrate_selfsimilar(
            self.measure,
            self.alpha,
            lambda x: -np.expm1(-np.outer(x, thetas)),
            rel_tol=rel_tol,
        )
        return self.drift * thetas + np.atleast_1d(result.value)


def semi_stability_report(spec, thetas=None, tolerance=1e-6):
    """Check kappa(m theta) = m^alpha kappa(theta).

    Args:
        spec: A SubordinatorSpec with a measure (the ratio m is taken from it).
        thetas: Points theta, {1, m} by default (so kappa is needed at
            1, m and m^2).
        tolerance: Tolerance on the largest absolute deviation.

    Returns:
        A VerificationReport.
    """
    if spec.measure is None:
        return VerificationReport("semi_stability", 0.0, tolerance, {})
    m = spec.measure.m
    thetas = np.array([1.0, m] if thetas is None else thetas, dtype=float)
    values = spec.kappa(np.concatenate([thetas, m * thetas]))
    base, scaled = values[: thetas.size], values[thetas.size :]
    deviations = np.abs(scaled - m**spec.alpha * base)
    return VerificationReport(
        "semi_stability",
        float(deviations.max()),
        tolerance,
        {"thetas": thetas, "kappa": base, "kappa_scaled": scaled},
    )


class _TailSampler:
    """Exact draws of N conditioned on N > K.

    X is drawn from x^-alpha Lambda(dx) restricted to bands above x_cut, where
    P(Poisson(x_cut) > K) < TAIL_CUT_PROBABILITY, then N ~ Poisson(X) and the
    draw is kept when N > K. Band masses form a geometric sequence with ratio
    m^alpha; inside a band a component of the fundamental block is chosen by
    its weight and sampled by inverse CDF.
    """

    def __init__(self, measure, alpha, K):
        if K < 16:
            raise InvalidSpecError("sampler", "the exact tail needs K >= 16")
        self.K = K
        self.alpha = alpha
        self.m = measure.m
        target = math.log(TAIL_CUT_PROBABILITY)
        self.x_cut = brentq(lambda x: poisson.logsf(K, x) - target, K / 1000.0, K)
        self.n_cut = math.floor(math.log(self.x_cut) / measure.period)
        self.atoms = np.array([x for x, _ in measure.atoms])
        segments = measure.segments()
        self.lows = np.array([a for a, _, _ in segments])
        self.highs = np.array([b for _, b, _ in segments])
        weights = [
            v * (a ** (-alpha) - b ** (-alpha)) / alpha for a, b, v in segments
        ]
        weights += [w * x ** (-alpha) for x, w in measure.atoms]
        weights = np.array(weights)
        self.cdf = np.cumsum(weights) / weights.sum()
        logging.debug("tail sampler: x_cut=%.6g band %d", self.x_cut, self.n_cut)

    def _fundamental(self, rng, size):
        component = np.minimum(
            np.searchsorted(self.cdf, rng.random(size), side="right"),
            self.cdf.size - 1,
        )
        y = np.empty(size)
        n_seg = self.lows.size
        seg = component < n_seg
        if np.any(seg):
            a, b = self.lows[component[seg]], self.highs[component[seg]]
            u = rng.random(int(seg.sum()))
            lo, hi = a ** (-self.alpha), b ** (-self.alpha)
            y[seg] = (lo - u * (lo - hi)) ** (-1.0 / self.alpha)
        if np.any(~seg):
            y[~seg] = self.atoms[component[~seg] - n_seg]
        return y

    def draw(self, rng, size):
        """``size`` draws of N given N > K."""
        out = []
        need = size
        while need > 0:
            batch = max(2 * need, 1024)
            bands = self.n_cut + rng.geometric(1.0 - self.m**self.alpha, batch) - 1
            with np.errstate(over="ignore"):
                x = self._fundamental(rng, batch) * self.m ** (-bands.astype(float))
            x = np.minimum(x[x >= self.x_cut], float(VALUE_CAP))
            counts = np.empty(x.size)
            small = x < POISSON_NORMAL_LIMIT
            counts[small] = rng.poisson(x[small])
            counts[~small] = np.rint(
                x[~small] + np.sqrt(x[~small]) * rng.standard_normal(int((~small).sum()))
            )
            counts = np.minimum(counts, VALUE_CAP)
            accepted = counts[counts > self.K].astype(np.int64)[:need]
            out.append(accepted)
            need -= accepted.size
        return np.concatenate(out)


class QSDSampler:
    """Draws from the QSD with Levy measure x^-alpha Lambda(dx) and Yaglom law nu_min.

    Attributes:
        spec: The SubordinatorSpec.
        nlaw: The tabulated N-law (None in the drift case).
        tail: How draws beyond the table are resolved.
    """

    def __init__(self, spec, nu_min, K=256, tail=TailMode.exact, rel_tol=1e-10):
        """Initializes a QSDSampler.

        Args:
            spec: The SubordinatorSpec.
            nu_min: nu_min(1), nu_min(2), ...
            K: Order of the N-law table.
            tail: TailMode; ``strict`` doubles K at most twice and raises if
                the table misses more than STRICT_TAIL_LIMIT.
            rel_tol: Band-sum stopping threshold for the N-law.

        Raises:
            TailMassTooLarge: In strict mode, when the deficit stays too large.
        """
        self.spec = spec
        self.tail = TailMode.from_str(tail)
        nu_min = np.asarray(nu_min, dtype=float)
        self.pure_death = bool(nu_min[0] == 1.0 and not np.any(nu_min[1:]))
        self.cdf_min = np.cumsum(nu_min)
        weights = nu_min / nu_min.sum()
        support = np.arange(1, nu_min.size + 1)
        self.mean_min = float(weights @ support)
        self.var_min = float(weights @ support**2) - self.mean_min**2
        self.nlaw = None
        self._tail = None
        if spec.measure is None:
            return
        nlaw = nlaw_pmf(spec.alpha, spec.measure, K, rel_tol)
        if self.tail is TailMode.strict:
            for _ in range(2):
                if nlaw.deficit <= STRICT_TAIL_LIMIT:
                    break
                K *= 2
                nlaw = nlaw_pmf(spec.alpha, spec.measure, K, rel_tol)
            if nlaw.deficit > STRICT_TAIL_LIMIT:
                raise TailMassTooLarge(nlaw.deficit, K, STRICT_TAIL_LIMIT)
            self.cdf = np.cumsum(nlaw.pmf) / nlaw.pmf.sum()
        else:
            self.cdf = np.cumsum(nlaw.pmf)
            self._tail = _TailSampler(spec.measure, spec.alpha, K)
        self.nlaw = nlaw

    def _sums(self, counts, rng):
        """Sums of ``counts`` iid nu_min draws."""
        if self.pure_death:
            return counts
        out = np.empty(counts.size, dtype=np.int64)
        large = counts > SUM_NORMAL_LIMIT
        if np.any(large):
            n = counts[large].astype(float)
            approx = n * self.mean_min + np.sqrt(n * self.var_min) * rng.standard_normal(
                n.size
            )
            out[large] = np.clip(np.rint(approx), n, VALUE_CAP).astype(np.int64)
        index = np.flatnonzero(~large)
        cumulative = np.cumsum(counts[index])
        start = 0
        while start < index.size:
            base = cumulative[start - 1] if start else 0
            stop = max(
                start + 1,
                int(np.searchsorted(cumulative, base + CHUNK_INDIVIDUALS, side="right")),
            )
            chunk = counts[index[start:stop]]
            u = rng.random(int(chunk.sum())) * self.cdf_min[-1]
            draws = np.searchsorted(self.cdf_min, u, side="right") + 1
            offsets = np.concatenate([[0], np.cumsum(chunk)[:-1]])
            out[index[start:stop]] = np.add.reduceat(draws, offsets)
            start = stop
        return out

    def _counts(self, rng, size):
        u = rng.random(size)
        counts = np.searchsorted(self.cdf, u, side="right") + 1
        beyond = u >= self.cdf[-1]
        if self._tail is not None and np.any(beyond):
            counts[beyond] = self._tail.draw(rng, int(beyond.sum()))
        return counts.astype(np.int64)

    def sample(self, rng, size):
        """``size`` independent QSD draws as an int64 array."""
        out = []
        for start in range(0, size, BATCH):
            n = min(BATCH, size - start)
            if self.spec.measure is None:
                counts = np.ones(n, dtype=np.int64)
            else:
                counts = self._counts(rng, n)
            out.append(self._sums(counts, rng))
        return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def sample_qsd(spec, nu_min, rng, size=None, K=256, tail=TailMode.exact):
    """Draw from the QSD defined by a SubordinatorSpec and a Yaglom law.

    Args:
        spec: The SubordinatorSpec.
        nu_min: nu_min(1), nu_min(2), ...
        rng: A numpy Generator.
        size: Number of draws; a single int is returned when omitted.
        K: Order of the N-law table.
        tail: A TailMode.

    Returns:
        A positive integer or an int64 array.
    """
    sampler = QSDSampler(spec, nu_min, K, tail)
    if size is None:
        return int(sampler.sample(rng, 1)[0])
    return sampler.sample(rng, size)


@dataclass(frozen=True, eq=False)
class MCReport:
    """Comparison of an empirical law with a reference pmf on {1..K}.

    Mass beyond K (empirical) and the reference deficit are compared as one
    extra cell.

    Attributes:
        check_name: The experiment.
        n_samples: Number of draws compared.
        empirical_pmf: Empirical probabilities of 1..K.
        reference_pmf: Reference probabilities of 1..K.
        tv_distance: Total variation distance.
        chi2_stat: Pearson statistic over cells with expected count >= 5.
        seed: The master seed.
        threshold: 3 times the expected multinomial TV fluctuation, plus any
            declared allowance.
        details: Auxiliary numbers.
    """

    check_name: str
    n_samples: int
    empirical_pmf: np.ndarray
    reference_pmf: np.ndarray
    tv_distance: float
    chi2_stat: float
    seed: int
    threshold: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.tv_distance <= self.threshold

    def value(self, key):
        """Value of a report field, used by the formatters."""
        return {
            ReportField.check_name: self.check_name,
            ReportField.samples: str(self.n_samples),
            ReportField.tv_distance: "{0:.4g}".format(self.tv_distance),
            ReportField.threshold: "{0:.4g}".format(self.threshold),
            ReportField.chi2: "{0:.4g}".format(self.chi2_stat),
            ReportField.seed: str(self.seed),
            ReportField.passed: "yes" if self.passed else "NO",
        }[key]

    def to_dict(self):
        return {
            "check_name": self.check_name,
            "n_samples": self.n_samples,
            "tv_distance": self.tv_distance,
            "threshold": self.threshold,
            "chi2_stat": self.chi2_stat,
            "seed": self.seed,
            "passed": bool(self.passed),
            "empirical_pmf": self.empirical_pmf.tolist(),
            "reference_pmf": self.reference_pmf.tolist(),
            "details": _plain(self.details),
        }


def expected_tv(reference, n):
    """Expected TV distance of an n-sample empirical law from ``reference``."""
    p = np.append(reference, max(0.0, 1.0 - float(np.sum(reference))))
    return 0.5 * float(np.sum(np.sqrt(2.0 * p * (1.0 - p) / (math.pi * n))))


def _pearson(observed, expected):
    """Pearson statistic and p-value; cells with expected count < 5 are lumped.

    Observed counts in a cell of expected count 0 give an infinite statistic.
    """
    keep = expected >= 5
    lumped_obs = np.append(observed[keep], observed[~keep].sum())
    lumped_exp = np.append(expected[keep], expected[~keep].sum())
    if lumped_exp[-1] == 0:
        if lumped_obs[-1] > 0:
            return math.inf, 0.0
        lumped_obs, lumped_exp = lumped_obs[:-1], lumped_exp[:-1]
    if lumped_obs.size < 2:
        return 0.0, 1.0
    lumped_exp = lumped_exp * lumped_obs.sum() / lumped_exp.sum()
    result = chisquare(lumped_obs, lumped_exp)
    return float(result.statistic), float(result.pvalue)


def compare_with_reference(
    check_name, values, reference, seed, allowance=0.0, details=None
):
    """Build an MCReport from positive integer draws.

    Args:
        check_name: Name of the experiment.
        values: The draws.
        reference: Reference probabilities of 1..K.
        seed: The master seed.
        allowance: Added to the 3-sigma threshold (known systematic bias).
        details: Extra entries for the report.

    Returns:
        The MCReport.
    """
    reference = np.asarray(reference, dtype=float)
    K = reference.size
    n = values.size
    counts = np.bincount(np.minimum(values, K + 1), minlength=K + 2)[1:]
    empirical = counts[:K] / n
    overflow = counts[K] / n
    deficit = max(0.0, 1.0 - float(reference.sum()))
    tv = 0.5 * (float(np.abs(empirical - reference).sum()) + abs(overflow - deficit))
    statistic, pvalue = _pearson(
        counts.astype(float), np.append(reference, deficit) * n
    )
    base = 3.0 * expected_tv(reference, n)
    threshold = base + allowance
    info = {
        "overflow": overflow,
        "reference_deficit": deficit,
        "chi2_pvalue": pvalue,
        "base_threshold": base,
        "allowance": allowance,
    }
    info.update(details or {})
    return MCReport(
        check_name,
        n,
        empirical,
        reference,
        tv,
        statistic,
        seed,
        threshold,
        info,
    )


def qsd_sampling_test(
    spec, nu_min, reference, n_samples, seed=0, shards=1, K=256, tail=TailMode.exact
):
    """Compare sample_qsd draws with a constructed QSD table.

    Args:
        spec: The SubordinatorSpec.
        nu_min: The Yaglom law.
        reference: nu(1..K') of the constructed QSD (an InvariantMeasure or an
            array).
        n_samples: Number of draws.
        seed: Master seed.
        shards: Number of shards.
        K: Order of the N-law table.
        tail: A TailMode.

    Returns:
        An MCReport.
    """
    if isinstance(reference, InvariantMeasure):
        reference = reference.nu
    sampler = QSDSampler(spec, nu_min, K, tail)
    parts = run_sharded(sampler.sample, n_samples, seed, shards)
    return compare_with_reference("qsd_sampling", np.concatenate(parts), reference, seed)


def quasi_stationarity_test(dist, nu, n_samples, seed=0, shards=1):
    """One conditioned step started from nu must reproduce nu.

    The table is renormalized on {1..K}; the adjustment is logged and its
    size is added to the threshold. The sampling part alone is kept in
    ``details["base_threshold"]``; tables missing more than
    TABLE_DEFICIT_WARNING of their mass get a warning.

    Args:
        dist: The offspring law.
        nu: A QSD table (InvariantMeasure or pmf of 1..K).
        n_samples: Number of initial draws.
        seed: Master seed.
        shards: Number of shards.

    Returns:
        An MCReport over the surviving paths.
    """
    if isinstance(nu, InvariantMeasure):
        nu = nu.nu if nu.k_min == 1 else nu.nu[1:]
    nu = np.asarray(nu, dtype=float)
    mass = float(nu.sum())
    if mass <= 0:
        raise InvalidSpecError("quasi-stationarity", "the table has no mass")
    if abs(mass - 1.0) > 1e-12:
        logging.info("renormalizing the QSD table on {1..%d}: mass %.6g", nu.size, mass)
    if 1.0 - mass > TABLE_DEFICIT_WARNING:
        logging.warning(
            "QSD table misses %.3g of its mass; use a longer table for a sharp test",
            1.0 - mass,
        )
    reference = nu / mass
    cdf = np.cumsum(reference)

    def work(rng, count):
        start = np.searchsorted(cdf, rng.random(count) * cdf[-1], side="right") + 1
        return simulate_steps(dist, start, rng)

    after = np.concatenate(run_sharded(work, n_samples, seed, shards))
    survivors = after[after > 0]
    if survivors.size == 0:
        raise NoSurvivors(n_samples, 1)
    return compare_with_reference(
        "quasi_stationarity",
        survivors,
        reference,
        seed,
        allowance=abs(1.0 - mass),
        details={"table_mass": mass, "survivors": int(survivors.size)},
    )


def yaglom_mc(dist, n, n_samples, seed=0, shards=1, K=256, yaglom=None):
    """Simulate Z_n from one ancestor and compare the survivors with nu_min.

    Args:
        dist: The offspring law.
        n: Number of generations.
        n_samples: Number of paths.
        seed: Master seed.
        shards: Number of shards.
        K: Order of the Yaglom table.
        yaglom: A precomputed YaglomResult.

    Returns:
        An MCReport; details hold the survival fraction, p_n and the binomial
        standard error.

    Raises:
        NoSurvivors: If every path died out.
    """
    yaglom = yaglom or yaglom_limit(dist, K)

    def work(rng, count):
        z = np.ones(count, dtype=np.int64)
        for _ in range(n):
            z = simulate_steps(dist, z, rng)
        return z

    final = np.concatenate(run_sharded(work, n_samples, seed, shards))
    survivors = final[final > 0]
    if survivors.size == 0:
        raise NoSurvivors(n_samples, n)
    fraction = survivors.size / n_samples
    if fraction < 1e-4:
        logging.warning("only a fraction %.3g of the paths survived", fraction)
    p_n = survival_probability(dist, n)
    return compare_with_reference(
        "yaglom",
        survivors,
        yaglom.nu_min,
        seed,
        details={
            "generations": n,
            "survival_fraction": fraction,
            "p_n": p_n,
            "survival_sigma": math.sqrt(p_n * (1.0 - p_n) / n_samples),
        },
    )
