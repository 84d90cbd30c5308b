"""Construction of lambda-invariant measures, QSDs and the N-law.

Every measure here has a pgf of the form

    G(z) = int (e^{(H(z)-1)x} - e^{-x}) x^-alpha Lambda(dx)

with H the Yaglom pgf, or is one of the closed forms obtained for
Lambda = s dx/x. Coefficients of e^{(H-1)x} are compound Poisson
probabilities, so nu(k) is an integral of nonnegative functions of x.
"""

from dataclasses import dataclass, field
import logging
import math

import numpy as np
from scipy.special import gamma
from scipy.stats import poisson

from .branching import OffspringDistribution
from .domains import ClosedFormKind, ComposeMode, ElementaryFunction, MeasureSource
from .errors import (
    InvalidSpecError,
    KindAlphaMismatch,
    OutOfRangeAlpha,
    ZeroMass,
)
from .selfsimilar import GAUSS_NODES, SelfSimilarMeasure, integrate_selfsimilar
from .series import TruncatedSeries, evaluate, series_compose, series_elementary
from .yaglom import yaglom_limit

#: Values above this are rescaled in the compound Poisson recursion.
RESCALE_LIMIT = 1e250


@dataclass(frozen=True, eq=False)
class InvariantMeasure:
    """A lambda-invariant measure nu truncated at K.

    Attributes:
        nu: nu(k) for k = k_min..K.
        k_min: 1 for measures of the killed process, 0 when state 0 is kept.
        alpha: The exponent; lam = m^alpha.
        lam: The eigenvalue.
        includes_zero: True for true invariant measures (G(F(z)) = lam G(z)).
        source: How the measure was built.
        source_detail: Parameters of the construction (kind, t, ...).
        trunc_error_hint: Size of what the truncation or quadrature left out.
        offspring_spec: Spec of the offspring law, for table headers.
        measure_spec: Spec of Lambda when one was used.
    """

    nu: np.ndarray
    k_min: int
    alpha: float
    lam: float
    includes_zero: bool = False
    source: MeasureSource = MeasureSource.integral
    source_detail: dict = field(default_factory=dict)
    trunc_error_hint: float = 0.0
    offspring_spec: dict = field(default_factory=dict)
    measure_spec: dict | None = None

    def __post_init__(self):
        nu = np.array(self.nu, dtype=float).ravel()
        nu.setflags(write=False)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "source", MeasureSource.from_str(self.source))

    @property
    def order(self):
        """The truncation K."""
        return self.k_min + self.nu.size - 1

    def coefficients(self):
        """nu(0..K), with nu(0) = 0 unless the measure includes state 0."""
        out = np.zeros(self.order + 1)
        out[self.k_min :] = self.nu
        return out

    def series(self):
        """The pgf G as a truncated series of order K."""
        return TruncatedSeries(self.coefficients())

    def evaluate(self, z):
        """G(z) by Horner on the truncated coefficients."""
        return evaluate(self.series(), z)

    def total_mass(self):
        return float(self.nu.sum())

    def header(self):
        """JSON header written above the measure table."""
        return {
            "alpha": self.alpha,
            "lambda": self.lam,
            "k_min": self.k_min,
            "includes_zero": self.includes_zero,
            "source": str(self.source),
            "source_detail": self.source_detail,
            "trunc_error_hint": self.trunc_error_hint,
            "offspring_spec": self.offspring_spec,
            "measure_spec": self.measure_spec,
        }


@dataclass(frozen=True, eq=False)
class NLaw:
    """Law of the number of first-generation ancestors of a QSD draw.

    Attributes:
        pmf: P(N = k) for k = 1..K.
        alpha: The exponent.
        measure: The normalized Lambda it was computed from.
    """

    pmf: np.ndarray
    alpha: float
    measure: SelfSimilarMeasure | None = None

    @property
    def order(self):
        return self.pmf.size

    @property
    def deficit(self):
        """Mass of N beyond the tabulated range."""
        return max(0.0, 1.0 - float(self.pmf.sum()))


def compound_poisson_pmf(nu_min, x, K):
    """P(S = k), k = 0..K, for S a Poisson(x) sum of iid nu_min variables.

    Uses c_0 = e^-x, c_k = (x/k) sum_j j nu_min(j) c_(k-j). The recursion is
    run on e^x c_k for all rates at once and rescaled whenever a column grows
    beyond RESCALE_LIMIT, so rates far above K neither overflow nor lose the
    small values.

    Args:
        nu_min: nu_min(1), nu_min(2), ... (a sub-probability vector).
        x: A positive rate or an array of rates.
        K: Largest k.

    Returns:
        Shape (K+1,) for a scalar rate, (len(x), K+1) otherwise.
    """
    rates = np.atleast_1d(np.asarray(x, dtype=float))
    weights = np.zeros(K + 1)
    nu_min = np.asarray(nu_min, dtype=float)[:K]
    weights[1 : nu_min.size + 1] = np.arange(1, nu_min.size + 1) * nu_min
    if nu_min.size and nu_min[0] == 1.0 and not np.any(nu_min[1:]):
        out = poisson.pmf(np.arange(K + 1)[None, :], rates[:, None])
        return out[0] if np.ndim(x) == 0 else out
    values = np.zeros((K + 1, rates.size))
    values[0] = 1.0
    log_scale = -rates.copy()
    for k in range(1, K + 1):
        values[k] = rates / k * (weights[1 : k + 1] @ values[k - 1 :: -1])
        big = values[k] > RESCALE_LIMIT
        if np.any(big):
            factor = values[k, big]
            values[: k + 1, big] /= factor
            log_scale[big] += np.log(factor)
    with np.errstate(divide="ignore"):
        out = np.exp(np.log(values) + log_scale).T
    return out[0] if np.ndim(x) == 0 else out


def _default_nodes(K):
    return max(GAUSS_NODES, 2 * math.ceil(math.sqrt(K)))


def _upper_span(K):
    """Rates up to which the largest coefficient has not yet peaked."""
    return 2.0 * K + 10.0 * math.sqrt(K) + 50.0


def _check_ratio(dist, measure):
    if not math.isclose(measure.m, dist.mean, rel_tol=1e-10):
        raise InvalidSpecError(
            "measure",
            "ratio m={0!r} differs from the offspring mean {1!r}".format(
                measure.m, dist.mean
            ),
        )
    if measure.is_zero:
        raise ZeroMass()


def _integrate_coefficients(dist, measure, alpha, K, rel_tol, nodes, yaglom, first):
    yaglom = yaglom or yaglom_limit(dist, K)
    nu_min = yaglom.nu_min[:K]

    def integrand(x):
        return compound_poisson_pmf(nu_min, x, K)[:, first:]

    result = integrate_selfsimilar(
        measure,
        alpha,
        integrand,
        rel_tol=rel_tol,
        nodes=nodes or _default_nodes(K),
        span=(1.0, _upper_span(K)),
    )
    logging.debug(
        "coefficients 1..%d integrated over bands %s", K, result.bands_used
    )
    return np.clip(result.value, 0.0, None), float(np.max(result.tail_estimate))


def invariant_measure(
    dist, alpha, measure, K=256, rel_tol=1e-10, nodes=None, yaglom=None
):
    """The m^alpha-invariant measure with pgf int (e^{(H-1)x} - e^-x) x^-alpha dLambda.

    The e^-x term only removes the k = 0 coefficient, so it is dropped
    instead of subtracted.

    Args:
        dist: The offspring law.
        alpha: Exponent, alpha < 1.
        measure: Nonzero self-similar Lambda with ratio m = dist.mean.
        K: Truncation order.
        rel_tol: Band-sum stopping threshold.
        nodes: Gauss nodes per band, max(32, 2 ceil(sqrt K)) by default.
        yaglom: A precomputed YaglomResult of order >= K.

    Returns:
        An InvariantMeasure with k_min = 1.

    Raises:
        OutOfRangeAlpha: If alpha >= 1.
        ZeroMass: If Lambda vanishes.
    """
    if alpha >= 1:
        raise OutOfRangeAlpha(alpha, "(-inf, 1)", "the integral representation")
    _check_ratio(dist, measure)
    nu, hint = _integrate_coefficients(
        dist, measure, alpha, K, rel_tol, nodes, yaglom, first=1
    )
    return InvariantMeasure(
        nu,
        k_min=1,
        alpha=alpha,
        lam=dist.mean**alpha,
        source=MeasureSource.integral,
        trunc_error_hint=hint,
        offspring_spec=dist.spec,
        measure_spec=measure.to_spec(),
    )


def true_invariant_measure(
    dist, alpha, measure, K=256, rel_tol=1e-10, nodes=None, yaglom=None
):
    """A true m^alpha-invariant measure on {0, 1, ...} for alpha < 0.

    Args:
        dist: The offspring law.
        alpha: Exponent, alpha < 0.
        measure: Nonzero self-similar Lambda.
        K: Truncation order.
        rel_tol: Band-sum stopping threshold.
        nodes: Gauss nodes per band.
        yaglom: A precomputed YaglomResult.

    Returns:
        An InvariantMeasure with k_min = 0 and includes_zero set.

    Raises:
        OutOfRangeAlpha: If alpha >= 0.
    """
    if alpha >= 0:
        raise OutOfRangeAlpha(alpha, "(-inf, 0)", "true invariant measures")
    _check_ratio(dist, measure)
    nu, hint = _integrate_coefficients(
        dist, measure, alpha, K, rel_tol, nodes, yaglom, first=0
    )
    return InvariantMeasure(
        nu,
        k_min=0,
        alpha=alpha,
        lam=dist.mean**alpha,
        includes_zero=True,
        source=MeasureSource.integral,
        trunc_error_hint=hint,
        offspring_spec=dist.spec,
        measure_spec=measure.to_spec(),
    )


def closed_form_measure(dist, alpha, kind, K=256, yaglom=None):
    """Closed form invariant measures, the Lambda = s dx/x family.

    ===============  =====================  ===========
    kind             G(z)                   alpha
    ===============  =====================  ===========
    qsd_power        1 - (1 - H)^alpha      (0, 1]
    log              -log(1 - H)            0
    negative_power   (1 - H)^alpha - 1      < 0
    true_power       (1 - H)^alpha          < 0
    ===============  =====================  ===========

    Args:
        dist: The offspring law.
        alpha: The exponent.
        kind: A ClosedFormKind or its value.
        K: Truncation order.
        yaglom: A precomputed YaglomResult of order >= K.

    Returns:
        The InvariantMeasure (k_min = 0 for true_power, else 1).

    Raises:
        KindAlphaMismatch: If kind and alpha do not fit together.
    """
    kind = ClosedFormKind.from_str(kind)
    needs = {
        ClosedFormKind.qsd_power: ("alpha in (0, 1]", 0 < alpha <= 1),
        ClosedFormKind.log: ("alpha = 0", alpha == 0),
        ClosedFormKind.negative_power: ("alpha < 0", alpha < 0),
        ClosedFormKind.true_power: ("alpha < 0", alpha < 0),
    }[kind]
    if not needs[1]:
        raise KindAlphaMismatch(kind, needs[0], alpha)
    yaglom = yaglom or yaglom_limit(dist, K)
    H = yaglom.H.truncate(K)
    if kind is ClosedFormKind.qsd_power and alpha == 1:
        coeffs = H.coeffs
    elif kind is ClosedFormKind.log:
        coeffs = -series_elementary(1.0 - H, ElementaryFunction.log).coeffs
    else:
        power = series_elementary(1.0 - H, ElementaryFunction.pow, alpha).coeffs
        coeffs = -power if kind is ClosedFormKind.qsd_power else power
    includes_zero = kind is ClosedFormKind.true_power
    nu = np.array(coeffs) if includes_zero else np.array(coeffs[1:])
    if kind is ClosedFormKind.qsd_power:
        hint = max(0.0, 1.0 - float(nu.sum()))
    else:
        hint = float(abs(nu[-1]))
    return InvariantMeasure(
        nu,
        k_min=0 if includes_zero else 1,
        alpha=alpha,
        lam=dist.mean**alpha,
        includes_zero=includes_zero,
        source=MeasureSource.closed_form,
        source_detail={"kind": str(kind)},
        trunc_error_hint=hint,
        offspring_spec=dist.spec,
        measure_spec={"type": "log_uniform", "c": closed_form_scale(alpha, kind)},
    )


def closed_form_scale(alpha, kind):
    """The s with Lambda = s dx/x that produces a closed form.

    Args:
        alpha: The exponent.
        kind: A ClosedFormKind.

    Returns:
        alpha / Gamma(1 - alpha) for qsd_power, 1 for log and 1 / Gamma(-alpha)
        for the negative powers; None for alpha = 1, which has no integral
        representation.
    """
    kind = ClosedFormKind.from_str(kind)
    if kind is ClosedFormKind.log:
        return 1.0
    if kind is ClosedFormKind.qsd_power:
        return None if alpha == 1 else float(alpha / gamma(1.0 - alpha))
    return float(1.0 / gamma(-alpha))


def extremal_invariant_measure(dist, t, K=256, rel_tol=1e-10, yaglom=None):
    """The extremal 1-invariant measure nu_t.

    It is the alpha = 0 measure of a unit atom of Lambda at m^-t, with pgf
    sum_n [exp((H(z) - 1) m^(n-t)) - exp(-m^(n-t))].

    Args:
        dist: The offspring law.
        t: Position in [0, 1).
        K: Truncation order.
        rel_tol: Band-sum stopping threshold.
        yaglom: A precomputed YaglomResult.

    Returns:
        The InvariantMeasure.

    Raises:
        InvalidSpecError: If t is outside [0, 1).
    """
    if not 0 <= t < 1:
        raise InvalidSpecError("extremal", "t must lie in [0, 1)")
    measure = SelfSimilarMeasure.atom(dist.mean, dist.mean ** (-t))
    nu = invariant_measure(dist, 0.0, measure, K, rel_tol, yaglom=yaglom)
    return InvariantMeasure(
        nu.nu,
        k_min=1,
        alpha=0.0,
        lam=1.0,
        source=MeasureSource.extremal,
        source_detail={"t": t},
        trunc_error_hint=nu.trunc_error_hint,
        offspring_spec=dist.spec,
        measure_spec=measure.to_spec(),
    )


def mixture_of_extremals(
    dist, density=None, c=None, K=256, rel_tol=1e-10, n_nodes=32, yaglom=None
):
    """The mixture int nu_t mu(dt) of extremal measures.

    The t-integral is taken by the trapezoidal rule on the periodic grid
    t_j = j / n_nodes, which amounts to an atomic Lambda with atoms m^-t_j.

    Args:
        dist: The offspring law.
        density: Callable t -> mu density on [0, 1); uniform when omitted.
        c: Total mass of a uniform mu, log(1/m) by default (which gives
            Lambda = dx/x).
        K: Truncation order.
        rel_tol: Band-sum stopping threshold.
        n_nodes: Number of t-nodes.
        yaglom: A precomputed YaglomResult.

    Returns:
        The InvariantMeasure with alpha = 0.
    """
    m = dist.mean
    t = np.arange(n_nodes) / n_nodes
    if density is None:
        total = -math.log(m) if c is None else c
        weights = np.full(n_nodes, total / n_nodes)
    else:
        weights = np.asarray([density(tj) for tj in t], dtype=float) / n_nodes
    if np.any(weights < 0):
        raise InvalidSpecError("mixture", "mixing density must be >= 0")
    atoms = tuple((m ** (-tj), w) for tj, w in zip(t, weights) if w > 0)
    measure = SelfSimilarMeasure(
        m,
        atoms=atoms,
        spec={"type": "atoms", "atoms": [list(a) for a in atoms]},
    )
    nu = invariant_measure(dist, 0.0, measure, K, rel_tol, yaglom=yaglom)
    return InvariantMeasure(
        nu.nu,
        k_min=1,
        alpha=0.0,
        lam=1.0,
        source=MeasureSource.mixture,
        source_detail={"n_nodes": n_nodes},
        trunc_error_hint=nu.trunc_error_hint,
        offspring_spec=dist.spec,
        measure_spec=measure.to_spec(),
    )


def compose_with_pure_death(dist, alpha, beta, kind, K=256, yaglom=None):
    """Compose the QSD G_alpha of Z with an invariant measure of a pure death chain.

    G_alpha(F(z)) = 1 - m^alpha (1 - G_alpha(z)) is the pgf of the pure death
    law with mean m^alpha applied to G_alpha, so any m^(alpha beta)-invariant
    G_beta of that chain gives G_beta(G_alpha(z)), an m^(alpha beta)-invariant
    measure of Z.

    Args:
        dist: The offspring law.
        alpha: QSD exponent in (0, 1].
        beta: Exponent of the outer measure.
        kind: ClosedFormKind of the outer measure.
        K: Truncation order.
        yaglom: A precomputed YaglomResult.

    Returns:
        The InvariantMeasure with alpha replaced by alpha * beta.
    """
    inner = closed_form_measure(dist, alpha, ClosedFormKind.qsd_power, K, yaglom)
    death = OffspringDistribution(
        [1.0 - dist.mean**alpha, dist.mean**alpha],
        spec={"type": "pure_death", "m": dist.mean**alpha},
    )
    outer = closed_form_measure(death, beta, kind, K)
    composed = series_compose(outer.series(), inner.series(), ComposeMode.formal)
    coeffs = composed.coeffs
    nu = coeffs if outer.includes_zero else coeffs[1:]
    return InvariantMeasure(
        np.array(nu),
        k_min=0 if outer.includes_zero else 1,
        alpha=alpha * beta,
        lam=dist.mean ** (alpha * beta),
        includes_zero=outer.includes_zero,
        source=MeasureSource.composition,
        source_detail={"alpha": alpha, "beta": beta, "kind": str(kind)},
        trunc_error_hint=max(inner.trunc_error_hint, outer.trunc_error_hint),
        offspring_spec=dist.spec,
    )


def nlaw_pmf(alpha, measure, K=256, rel_tol=1e-10, nodes=None):
    """P(N = k) = int e^-x x^k / k! x^-alpha Lambda(dx), k = 1..K.

    Args:
        alpha: Exponent in (0, 1).
        measure: A QSD-normalized Lambda.
        K: Largest k.
        rel_tol: Band-sum stopping threshold.
        nodes: Gauss nodes per band.

    Returns:
        The NLaw.

    Raises:
        OutOfRangeAlpha: If alpha is outside (0, 1).
    """
    if not 0 < alpha < 1:
        raise OutOfRangeAlpha(alpha, "(0, 1)", "the N-law")
    k = np.arange(1, K + 1)
    result = integrate_selfsimilar(
        measure,
        alpha,
        lambda x: poisson.pmf(k[None, :], x[:, None]),
        rel_tol=rel_tol,
        nodes=nodes or _default_nodes(K),
        span=(1.0, _upper_span(K)),
    )
    pmf = np.clip(result.value, 0.0, None)
    pmf.setflags(write=False)
    return NLaw(pmf, alpha, measure)


def sibuya_pmf(alpha, K):
    """Coefficients 1..K of 1 - (1 - z)^alpha."""
    k = np.arange(1, K + 1)
    return alpha * np.cumprod(np.concatenate([[1.0], (k[:-1] - alpha) / (k[:-1] + 1)]))
