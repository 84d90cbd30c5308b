"""Yaglom limit, survival probabilities and the H-function identities."""

from dataclasses import dataclass
import logging

import numpy as np

from .domains import ComposeMode
from .errors import InvalidSpecError, NoConvergence
from .reports import VerificationReport
from .series import TruncatedSeries, evaluate, series_compose

#: Default z-grid {0.05, 0.10, ..., 0.95} used by grid residual checks.
DEFAULT_ZGRID = np.round(np.arange(1, 20) * 0.05, 2)

#: Survival probabilities below this are treated as underflow.
SURVIVAL_FLOOR = 1e-290


def iterate_pgf(dist, n, K):
    """The n-th iterate F_n = F o F_{n-1} with F_0(z) = z, truncated at order K.

    Args:
        dist: The offspring law.
        n: Number of generations, n >= 0.
        K: Series order.

    Returns:
        F_n as a TruncatedSeries.
    """
    if n < 0:
        raise InvalidSpecError("iteration", "n must be >= 0")
    outer = dist.pgf()
    current = TruncatedSeries.identity(K)
    for _ in range(n):
        current = series_compose(outer, current, ComposeMode.polynomial_outer)
    return current


@dataclass(frozen=True, eq=False)
class YaglomResult:
    """The Yaglom limit and the diagnostics of the iteration that produced it.

    Attributes:
        H: pgf of nu_min truncated at order K (H(0) = 0).
        p_seq: Survival probabilities p_n = 1 - F_n(0), n = 0..N.
        iterations: Number of generations N used.
        sup_delta: Final sup-norm change of the coefficients of H_n.
        mean: Offspring mean m.
    """

    H: TruncatedSeries
    p_seq: np.ndarray
    iterations: int
    sup_delta: float
    mean: float

    @property
    def nu_min(self):
        """nu_min(k) for k = 1..K."""
        return self.H.coeffs[1:]

    @property
    def ratio_seq(self):
        """p_(n+1) / p_n, converging to m."""
        return self.p_seq[1:] / self.p_seq[:-1]

    @property
    def order(self):
        return self.H.order


def yaglom_limit(dist, K=256, tol=1e-12, n_max=10_000):
    """Iterate H_n = (F_n - F_n(0)) / (1 - F_n(0)) to its limit.

    The iteration runs on R_n = 1 - F_n through phi(u) = 1 - F(1 - u), so
    that p_n = R_n(0) and the coefficients -R_n[k] / p_n of H_n are never
    obtained by cancellation.

    Args:
        dist: The offspring law.
        K: Series order.
        tol: Stopping threshold on sup_k |H_(n+1)[k] - H_n[k]|.
        n_max: Maximal number of generations.

    Returns:
        A YaglomResult.

    Raises:
        NoConvergence: If n_max is reached with sup_delta >= tol, or if the
            survival probability underflows first.
    """
    if tol <= 0:
        raise InvalidSpecError("yaglom", "tol must be positive")
    phi = dist.death_polynomial()
    remainder = TruncatedSeries.polynomial([1.0, -1.0], order=K)
    h_prev = TruncatedSeries.identity(K).coeffs
    p_seq = [1.0]
    delta = np.inf
    for n in range(1, n_max + 1):
        remainder = series_compose(phi, remainder, ComposeMode.polynomial_outer)
        p_n = float(remainder.coeffs[0])
        if not p_n > SURVIVAL_FLOOR:
            raise NoConvergence("Yaglom iteration (survival underflow)", n, delta)
        h = np.concatenate([[0.0], -remainder.coeffs[1:] / p_n])
        delta = float(np.max(np.abs(h - h_prev)))
        p_seq.append(p_n)
        h_prev = h
        if n % 50 == 0:
            logging.debug("yaglom step %d: p_n=%.3e sup_delta=%.3e", n, p_n, delta)
        if delta < tol:
            logging.debug("yaglom converged after %d steps (%.3e)", n, delta)
            return YaglomResult(
                H=TruncatedSeries(h),
                p_seq=np.array(p_seq),
                iterations=n,
                sup_delta=delta,
                mean=dist.mean,
            )
    raise NoConvergence("Yaglom iteration", n_max, delta)


def h_identity_report(res, dist, zgrid=None, tolerance=1e-9):
    """Residuals of the H identities on a z-grid.

    Measures sup |H(F(z)) - H(F(0)) - m H(z)|, sup |H(F(z)) - 1 - m(H(z) - 1)|
    and |H(F(0)) - (1 - m)|. H o F is evaluated pointwise.

    Args:
        res: A converged YaglomResult.
        dist: The offspring law.
        zgrid: Points in (0, 1), DEFAULT_ZGRID when omitted.
        tolerance: Tolerance for the verdict.

    Returns:
        A VerificationReport whose residual is the largest of the three.
    """
    z = DEFAULT_ZGRID if zgrid is None else np.asarray(zgrid, dtype=float)
    m = dist.mean
    h_z = evaluate(res.H, z)
    h_fz = evaluate(res.H, dist.pgf_at(z))
    h_f0 = float(evaluate(res.H, dist.pgf_at(0.0)))
    shifted = np.abs(h_fz - h_f0 - m * h_z)
    centered = np.abs(h_fz - 1.0 - m * (h_z - 1.0))
    at_zero = abs(h_f0 - (1.0 - m))
    residual = max(float(shifted.max()), float(centered.max()), at_zero)
    return VerificationReport(
        "h_identities",
        residual,
        tolerance,
        {
            "zgrid": z,
            "h_shift": shifted,
            "h_centered": centered,
            "h_at_f0": at_zero,
        },
    )
