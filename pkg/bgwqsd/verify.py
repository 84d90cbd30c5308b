"""Independent checks of constructed measures.

Each check returns a :class:`VerificationReport`; none of them raises on a
failed verdict, the command line decides what a failure means.
"""

from dataclasses import dataclass, field
import logging
import math
from typing import NamedTuple
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .branching import transition_block
from .domains import ElementaryFunction
from .errors import (
    InsufficientSupport,
    InvalidSpecError,
    OutOfRangeAlpha,
    QuadratureFailure,
    ZeroMass,
)
from .reports import VerificationReport
from .selfsimilar import SelfSimilarMeasure
from .series import (
    TruncatedSeries,
    derivative,
    evaluate,
    series_div,
    series_elementary,
)
from .yaglom import DEFAULT_ZGRID, yaglom_limit

__all__ = [
    "CircleMeasure",
    "HoppeQ",
    "JoffeSums",
    "RecoveredMeasure",
    "VerificationReport",
    "compare_recovery",
    "eigen_residual",
    "functional_equation_residual",
    "hoppe_q",
    "hoppe_roundtrip",
    "joffe_partial_sums",
    "ks_convert",
    "ks_convert_inverse",
    "log_bins",
    "recover_lambda",
    "survival_probability",
    "tail_bound_profile",
]

#: Grid points above this are too close to the radius of convergence.
Z_MAX = 0.95

#: Largest P_{K+1}(Z_1 <= j) tolerated in the rows reported by default.
REPORT_ROW_LEAK = 1e-12

#: Bands beyond K summed by the truncation-leak bound.
LEAK_BANDS = 256


def _grid(zgrid):
    z = DEFAULT_ZGRID if zgrid is None else np.asarray(zgrid, dtype=float)
    if z.size == 0 or np.any(z <= 0) or np.any(z > Z_MAX):
        raise InvalidSpecError("zgrid", "points must lie in (0, {0}]".format(Z_MAX))
    return z


def _truncation_leak(nu, m, w):
    """Bound on sum_{k>K} nu(k) w^k from the last full m-band (K m, K].

    Every m-band beyond K carries at most the largest value of the last full
    band, times m^alpha per band for growing (alpha < 0) measures; the factor 2
    covers band edges falling between integers.
    """
    K = nu.order
    coeffs = nu.coefficients()
    peak = 2.0 * float(np.max(coeffs[max(nu.k_min, int(K * m)) :]))
    alpha = 0.0 if nu.alpha is None else min(float(nu.alpha), 0.0)
    growth = m**alpha
    total = 0.0
    start = K
    for band in range(LEAK_BANDS):
        stop = max(start + 1, math.ceil(start / m))
        head = w ** (start + 1)
        if head == 0.0:
            break
        term = peak * growth**band * (head - w ** (stop + 1)) / (1.0 - w)
        total += term
        if term <= 1e-17 * total:
            break
        start = stop
    return total


def functional_equation_residual(nu, dist, lam=None, zgrid=None, tolerance=1e-8):
    """sup |G(F(z)) - G(F(0)) - lam G(z)| over a z-grid.

    For measures including state 0 the residual is sup |G(F(z)) - lam G(z)|.
    The coefficients beyond K are missing from the Horner sums; (2 + lam)
    times a band-wise bound on sum_{k>K} nu(k) w^k, w = max(z, F(z)), is added
    to the tolerance and reported as ``leak_bound``. Tables long enough that
    w^K is negligible have a leak far below the base tolerance.

    Args:
        nu: The InvariantMeasure.
        dist: The offspring law.
        lam: Eigenvalue to test, nu.lam by default.
        zgrid: Points in (0, 0.95].
        tolerance: Base tolerance.

    Returns:
        A VerificationReport.
    """
    lam = nu.lam if lam is None else lam
    z = _grid(zgrid)
    G = nu.series()
    fz = dist.pgf_at(z)
    g_fz = evaluate(G, fz)
    g_z = evaluate(G, z)
    if nu.includes_zero:
        residuals = np.abs(g_fz - lam * g_z)
    else:
        residuals = np.abs(g_fz - evaluate(G, dist.pgf_at(0.0)) - lam * g_z)
    w = max(float(z.max()), float(fz.max()))
    leak = (2.0 + lam) * _truncation_leak(nu, dist.mean, w)
    return VerificationReport(
        "functional_equation",
        float(residuals.max()),
        tolerance + leak,
        {
            "zgrid": z,
            "residuals": residuals,
            "lambda": lam,
            "base_tolerance": tolerance,
            "leak_bound": leak,
        },
    )


def _default_report_rows(dist, block):
    """Rows j <= K // 4 that the missing states i > K reach with negligible mass.

    P_i(Z_1 <= j) decreases in i, so the row of state K + 1 bounds them all.
    """
    K = block.truncation
    last = np.concatenate([[block.zero_column[-1]], block.entries[-1]])
    cdf = np.cumsum(np.convolve(last, dist.pmf)[: K + 1])
    quiet = int(np.searchsorted(cdf, REPORT_ROW_LEAK, side="right")) - 1
    K_report = max(1, min(K // 4, quiet))
    logging.debug("eigen check reports %d rows", K_report)
    return K_report


def eigen_residual(nu, dist, lam=None, K=None, K_report=None, tolerance=1e-6):
    """L1 residual of nu P = lam nu on the first K_report states.

    (nu P)(j) uses the rows i <= K of the killed kernel. The residual is
    normalized by max(1, sum_{j <= K_report} nu(j)); the leakage through rows
    that overflow K is reported as ``leak_bound``.

    Args:
        nu: The InvariantMeasure.
        dist: The offspring law.
        lam: Eigenvalue, nu.lam by default.
        K: Kernel truncation, the order of nu by default.
        K_report: Reported states, at most K / 2. By default the rows j that
            state K + 1 reaches with probability <= REPORT_ROW_LEAK, capped
            at K // 4.
        tolerance: Tolerance of the verdict.

    Returns:
        A VerificationReport; for measures including 0 the row j = 0 counts.
    """
    lam = nu.lam if lam is None else lam
    K = nu.order if K is None else min(K, nu.order)
    if K_report is not None and K_report > K / 2:
        raise InvalidSpecError("eigen_residual", "K_report must not exceed K / 2")
    coeffs = nu.coefficients()[: K + 1]
    block = transition_block(dist, K)
    if K_report is None:
        K_report = _default_report_rows(dist, block)
    image = coeffs[1:] @ block.entries
    rows = np.abs(image[:K_report] - lam * coeffs[1 : K_report + 1])
    mass = float(coeffs[1 : K_report + 1].sum())
    if nu.includes_zero:
        at_zero = coeffs[0] + coeffs[1:] @ block.zero_column
        rows = np.concatenate([[abs(at_zero - lam * coeffs[0])], rows])
        mass += float(coeffs[0])
    normalizer = max(1.0, mass)
    residual = float(rows.sum()) / normalizer
    leak = float(coeffs[1:] @ block.overflow)
    return VerificationReport(
        "eigen",
        residual,
        tolerance,
        {
            "rows": rows / normalizer,
            "lambda": lam,
            "K": K,
            "K_report": K_report,
            "normalizer": normalizer,
            "leak_bound": leak,
        },
    )


def survival_probability(dist, n):
    """p_n = 1 - F_n(0), iterated as u -> 1 - F(1 - u) without cancellation."""
    phi = dist.death_polynomial()
    u = 1.0
    for _ in range(n):
        u = float(evaluate(phi, u))
    return u


def log_bins(window, per_band, m):
    """Edges of a log-scale histogram with ``per_band`` bins per m-band.

    Args:
        window: (lo, hi), 0 < lo < hi.
        per_band: Bins per band [x, x/m).
        m: The ratio.

    Returns:
        Increasing edges starting at lo; the last edge is the first >= hi.
    """
    lo, hi = window
    if not 0 < lo < hi:
        raise InvalidSpecError("bins", "window must satisfy 0 < lo < hi")
    step = -math.log(m) / per_band
    count = math.ceil(math.log(hi / lo) / step - 1e-9)
    return lo * np.exp(step * np.arange(count + 1))


@dataclass(frozen=True, eq=False)
class RecoveredMeasure:
    """Binned mu_n(A) = m^(-alpha n) nu(A / p_n).

    Attributes:
        edges: Bin edges.
        masses: mu_n of each bin.
        n: Generation.
        p_n: Survival probability used for the rescaling.
        alpha: The exponent.
        points: Number of lattice points p_n k inside the window.
        complete: False when the window reaches beyond p_n K.
    """

    edges: np.ndarray
    masses: np.ndarray
    n: int
    p_n: float
    alpha: float
    points: int
    complete: bool = True


def recover_lambda(nu, alpha, dist, n, bins=8, window=None):
    """Rescale nu along the lattice p_n N* and bin it on a log scale.

    Args:
        nu: The InvariantMeasure.
        alpha: The exponent used for the m^(-alpha n) factor.
        dist: The offspring law.
        n: Generation, n >= 0.
        bins: Bins per band, or explicit increasing edges.
        window: (lo, hi), [m^2, m^-2] by default; ignored for explicit edges.

    Returns:
        A RecoveredMeasure.

    Raises:
        InsufficientSupport: If fewer than 10 lattice points fall in the window.
    """
    m = dist.mean
    if np.ndim(bins) == 0:
        lo, hi = window if window is not None else (m**2, m**-2)
        edges = log_bins((lo, hi), int(bins), m)
    else:
        edges = np.asarray(bins, dtype=float)
    p_n = survival_probability(dist, n)
    k = np.arange(max(1, nu.k_min), nu.order + 1)
    weights = nu.coefficients()[k]
    x = p_n * k
    inside = (x >= edges[0]) & (x < edges[-1])
    found = int(inside.sum())
    if found < 10:
        raise InsufficientSupport(found, edges[0], edges[-1])
    masses, _ = np.histogram(x[inside], bins=edges, weights=weights[inside])
    masses = masses * m ** (-alpha * n)
    complete = bool(p_n * nu.order >= edges[-1])
    if not complete:
        logging.warning(
            "recovery window ends at %g beyond the table end p_n K = %g",
            edges[-1],
            p_n * nu.order,
        )
    return RecoveredMeasure(edges, masses, n, p_n, alpha, found, complete)


def compare_recovery(recovered, measure, alpha, tolerance=0.05):
    """Per-bin relative error of a recovered measure against x^-alpha Lambda(dx).

    Args:
        recovered: A RecoveredMeasure.
        measure: The SelfSimilarMeasure the table was built from.
        alpha: The exponent.
        tolerance: Largest admissible relative error.

    Returns:
        A VerificationReport over bins with positive target mass.
    """
    edges = recovered.edges
    target = np.array(
        [measure.mass(lo, hi, alpha) for lo, hi in zip(edges[:-1], edges[1:])]
    )
    positive = target > 0
    errors = np.zeros_like(target)
    errors[positive] = np.abs(recovered.masses[positive] / target[positive] - 1.0)
    return VerificationReport(
        "lambda_recovery",
        float(errors.max()) if positive.any() else math.inf,
        tolerance,
        {"edges": edges, "recovered": recovered.masses, "target": target},
    )


@dataclass(frozen=True, eq=False)
class HoppeQ:
    """Q(z) = log(1 - H(z)) / log m with Q(0) = 0 and Q(F(z)) = 1 + Q(z).

    Q is kept as the Yaglom pgf H it is a function of; ``series`` gives its
    Taylor coefficients.

    Attributes:
        H: The Yaglom pgf.
        m: The offspring mean.
    """

    H: TruncatedSeries
    m: float

    def series(self):
        """Q as a TruncatedSeries of the order of H."""
        log_series = series_elementary(1.0 - self.H, ElementaryFunction.log)
        return log_series * (1.0 / math.log(self.m))

    def __call__(self, z):
        """Q evaluated through H, which converges up to z = 1."""
        return np.log1p(-evaluate(self.H, z)) / math.log(self.m)

    def equation_residual(self, dist, zgrid=None):
        """sup |Q(F(z)) - 1 - Q(z)|."""
        z = _grid(zgrid)
        return float(np.max(np.abs(self(dist.pgf_at(z)) - 1.0 - self(z))))


def hoppe_q(dist, K=256, yaglom=None):
    """Build the HoppeQ of an offspring law."""
    yaglom = yaglom or yaglom_limit(dist, K)
    return HoppeQ(yaglom.H.truncate(K), dist.mean)


def hoppe_roundtrip(dist, alpha, K=256, zgrid=None, tolerance=1e-8, yaglom=None):
    """Rebuild the QSD pgf G_alpha from Q by quadrature and map it back.

    G_alpha(z) is the normalized integral of H'(w) m^((alpha-1) Q(w)) on [0, z].
    The normalizing integral over [0, 1] has the singular factor
    (1 - w)^(alpha - 1), which is taken as an algebraic quadrature weight
    while (1 - H) / (1 - w) is evaluated as a series quotient. The residuals
    are sup |G_alpha - (1 - (1 - H)^alpha)| and sup |Q_back - Q| with
    Q_back = log(1 - G_alpha) / log(m^alpha).

    Args:
        dist: The offspring law.
        alpha: Exponent in (0, 1).
        K: Series order.
        zgrid: Points in (0, 0.95].
        tolerance: Tolerance of the verdict.
        yaglom: A precomputed YaglomResult.

    Returns:
        A VerificationReport whose residual is the larger of the two.

    Raises:
        OutOfRangeAlpha: If alpha is outside (0, 1).
        QuadratureFailure: If the quadrature does not reach its accuracy; the
            exception carries the values computed so far.
    """
    if not 0 < alpha < 1:
        raise OutOfRangeAlpha(alpha, "(0, 1)", "the Hoppe roundtrip")
    z = _grid(zgrid)
    hq = hoppe_q(dist, K, yaglom)
    H = hq.H
    dH = derivative(H)
    ratio = series_div(1.0 - H, TruncatedSeries.polynomial([1.0, -1.0], order=K))

    def numerator_integrand(w):
        return evaluate(dH, w) * (1.0 - evaluate(H, w)) ** (alpha - 1.0)

    def regular_part(w):
        return evaluate(dH, w) * evaluate(ratio, w) ** (alpha - 1.0)

    values = []
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            denominator, _ = quad(
                regular_part,
                0.0,
                1.0,
                weight="alg",
                wvar=(0.0, alpha - 1.0),
                epsabs=1e-14,
                epsrel=1e-13,
                limit=200,
            )
            for point in z:
                value, _ = quad(
                    numerator_integrand,
                    0.0,
                    point,
                    epsabs=1e-14,
                    epsrel=1e-13,
                    limit=200,
                )
                values.append(value)
        except IntegrationWarning as e:
            raise QuadratureFailure(
                "Hoppe quadrature failed: {0}".format(e),
                {"zgrid": z[: len(values)].tolist(), "numerator": values},
            )
    g_alpha = np.array(values) / denominator
    h_z = evaluate(H, z)
    closed = 1.0 - (1.0 - h_z) ** alpha
    r1 = np.abs(g_alpha - closed)
    q_back = np.log1p(-g_alpha) / (alpha * math.log(dist.mean))
    r2 = np.abs(q_back - hq(z))
    q_equation = hq.equation_residual(dist, z)
    logging.debug("Hoppe denominator %.17g (expected %.17g)", denominator, 1 / alpha)
    return VerificationReport(
        "hoppe_roundtrip",
        max(float(r1.max()), float(r2.max())),
        tolerance,
        {
            "zgrid": z,
            "g_residual": r1,
            "q_residual": r2,
            "q_equation_residual": q_equation,
            "denominator": denominator,
        },
    )


@dataclass(frozen=True, eq=False)
class CircleMeasure:
    """A finite measure on [0, 1).

    Attributes:
        atoms: Tuple of (t, weight).
        cells: Density values on an equal partition of [0, 1).
        uniform: Density of an additional uniform part.
    """

    atoms: tuple = ()
    cells: np.ndarray = field(default_factory=lambda: np.zeros(0))
    uniform: float = 0.0

    def __post_init__(self):
        for t, w in self.atoms:
            if not 0 <= t < 1 or w < 0:
                raise InvalidSpecError("circle measure", "atoms need t in [0, 1)")
        object.__setattr__(self, "cells", np.asarray(self.cells, dtype=float))

    @property
    def total_mass(self):
        cells = float(self.cells.mean()) if self.cells.size else 0.0
        return sum(w for _, w in self.atoms) + cells + self.uniform


def ks_convert(mu, c, m):
    """Push c mu forward by t -> m^-t and extend it self-similarly.

    Args:
        mu: A CircleMeasure.
        c: Nonnegative total scale.
        m: The ratio.

    Returns:
        The SelfSimilarMeasure; densities pick up the Jacobian 1 / log(1/m)
        relative to dx/x.
    """
    period = -math.log(m)
    return SelfSimilarMeasure(
        m,
        log_uniform_weight=c * mu.uniform / period,
        atoms=tuple((m ** (-t), c * w) for t, w in mu.atoms),
        density=c * mu.cells / period,
    )


def ks_convert_inverse(measure):
    """Split a SelfSimilarMeasure into (mu, c) with mu a probability on [0, 1).

    Raises:
        ZeroMass: If the measure vanishes.
    """
    total = measure.fundamental_mass
    if total == 0:
        raise ZeroMass()
    period = measure.period
    atoms = tuple(
        (min(math.log(x) / period, math.nextafter(1.0, 0.0)), w / total)
        for x, w in measure.atoms
    )
    mu = CircleMeasure(
        atoms=atoms,
        cells=measure.density * period / total,
        uniform=measure.log_uniform_weight * period / total,
    )
    return mu, total


class JoffeSums(NamedTuple):
    """Partial sums S_n of prod_{k <= n} (1 - eta(q_k)).

    Attributes:
        partial_sums: S_1..S_N.
        increments: prod_{k <= n} (1 - eta(q_k)).
        q: q_k = F_k(0), k = 1..N.
    """

    partial_sums: np.ndarray
    increments: np.ndarray
    q: np.ndarray


def joffe_partial_sums(dist, N, K=None):
    """Partial sums of Joffe's series for the Q-process.

    eta is defined by 1 - F(z) = m (1 - z)(1 - eta(z)), so
    1 - eta = (1 - F)/(m (1 - z)) is a polynomial obtained by series division.
    The sequence is returned as data; it does not decide recurrence.

    Args:
        dist: The offspring law.
        N: Number of terms.
        K: Series order of the quotient, the offspring degree by default.

    Returns:
        JoffeSums.
    """
    K = dist.degree if K is None else K
    one_minus_f = TruncatedSeries.polynomial(
        np.concatenate([[1.0 - dist.pmf[0]], -dist.pmf[1:]]), order=K
    )
    quotient = series_div(one_minus_f, TruncatedSeries.polynomial([1.0, -1.0], K))
    q = np.zeros(N)
    current = 0.0
    for k in range(N):
        current = float(dist.pgf_at(current))
        q[k] = current
    increments = np.cumprod(evaluate(quotient, q) / dist.mean)
    return JoffeSums(np.cumsum(increments), increments, q)


def tail_bound_profile(nu, beta):
    """T_j 2^(j beta) with T_j = nu([2^j, K]), j = 0..floor(log2 K)."""
    coeffs = nu.coefficients()
    tails = np.cumsum(coeffs[::-1])[::-1]
    j = np.arange(int(math.log2(nu.order)) + 1)
    return tails[2**j] * 2.0 ** (j * beta)
