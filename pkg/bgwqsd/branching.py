"""Offspring laws, their pgf, the killed transition kernel and simulation."""

from dataclasses import dataclass, field
import json
import logging

import numpy as np
from scipy.special import comb

from .errors import InvalidPmf, InvalidSpecError, NotSubcritical, ReportedError
from .series import TruncatedSeries

#: Cumulative tail mass at which infinite-support families are cut.
TAIL_CUTOFF = 1e-15

#: Largest number of individuals drawn at once by :func:`simulate_steps`.
CHUNK_INDIVIDUALS = 1 << 22


@dataclass(frozen=True, eq=False)
class OffspringDistribution:
    """A subcritical reproduction law with finite support.

    Attributes:
        pmf: Read-only probabilities p_0..p_d.
        spec: The offspring spec the law was built from (for provenance).
    """

    pmf: np.ndarray
    spec: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pmf = np.array(self.pmf, dtype=float).ravel()
        if pmf.size == 0 or not np.all(np.isfinite(pmf)):
            raise InvalidPmf("probabilities must be finite numbers")
        if np.any(pmf < 0):
            raise InvalidPmf("negative probability")
        total = pmf.sum()
        if abs(total - 1.0) > 1e-12:
            raise InvalidPmf("probabilities sum to {0!r}".format(total))
        pmf = np.trim_zeros(pmf, "b")
        mean = float(np.dot(np.arange(pmf.size), pmf))
        if mean >= 1.0:
            raise NotSubcritical(mean)
        if mean <= 0.0:
            raise InvalidPmf("degenerate law without offspring (mean 0)")
        pmf.setflags(write=False)
        object.__setattr__(self, "pmf", pmf)

    @property
    def degree(self):
        """Maximal litter size d."""
        return self.pmf.size - 1

    @property
    def mean(self):
        """Offspring mean m."""
        return float(np.dot(np.arange(self.pmf.size), self.pmf))

    @property
    def is_pure_death(self):
        """True for F(z) = 1 - m(1 - z)."""
        return self.degree == 1

    def pgf(self, order=None):
        """The offspring pgf F as an exact polynomial series."""
        return TruncatedSeries.polynomial(self.pmf, order=order)

    def pgf_at(self, z):
        """Evaluate F pointwise."""
        return np.polynomial.polynomial.polyval(z, self.pmf)

    def death_polynomial(self):
        """Coefficients of phi(u) = 1 - F(1 - u), a polynomial without constant.

        phi_j = (-1)^(j+1) sum_k C(k, j) p_k; the sums have positive terms
        only, so the coefficients carry no cancellation.
        """
        k = np.arange(self.pmf.size)
        phi = np.zeros(self.pmf.size)
        for j in range(1, self.pmf.size):
            phi[j] = (-1.0) ** (j + 1) * np.dot(comb(k, j), self.pmf)
        return TruncatedSeries.polynomial(phi)

    def cdf(self):
        return np.cumsum(self.pmf)


def load_offspring(spec):
    """Build an OffspringDistribution from an offspring spec.

    Accepted specs::

        {"type": "pmf", "p": [...]}        (alias "custom")
        {"type": "pure_death", "m": 0.5}
        {"type": "geometric", "b": 0.25}

    Geometric laws p_k = (1-b) b^k are cut once the remaining tail mass drops
    below 1e-15 and renormalized.

    Args:
        spec: A dict or a JSON string.

    Returns:
        The validated offspring law.

    Raises:
        InvalidSpecError: If the spec is malformed.
        InvalidPmf: If the probabilities are invalid.
        NotSubcritical: If the mean is not below one.
    """
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as e:
            raise InvalidSpecError("offspring", str(e))
    if not isinstance(spec, dict) or "type" not in spec:
        raise InvalidSpecError("offspring", "expected an object with a 'type'")
    kind = spec["type"]
    try:
        if kind in ("pmf", "custom"):
            pmf = np.asarray(spec["p"], dtype=float)
        elif kind == "pure_death":
            m = float(spec["m"])
            if m >= 1:
                raise NotSubcritical(m)
            if m <= 0:
                raise InvalidSpecError("offspring", "pure_death needs 0 < m < 1")
            pmf = np.array([1.0 - m, m])
        elif kind == "geometric":
            b = float(spec["b"])
            if not 0 < b < 1:
                raise InvalidSpecError("offspring", "geometric needs 0 < b < 1")
            if b >= 0.5:
                raise NotSubcritical(b / (1 - b))
            last = int(np.ceil(np.log(TAIL_CUTOFF) / np.log(b)))
            pmf = (1 - b) * b ** np.arange(last)
            pmf /= pmf.sum()
        else:
            raise InvalidSpecError("offspring", "unknown type {0!r}".format(kind))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, ReportedError):
            raise
        raise InvalidSpecError("offspring", "bad or missing parameter: {0}".format(e))
    logging.debug("offspring %s with %d atoms", kind, pmf.size)
    return OffspringDistribution(pmf, spec=dict(spec))


@dataclass(frozen=True, eq=False)
class TransitionRow:
    """Row i of the killed kernel restricted to {1..K}.

    Attributes:
        row: P_ij for j = 1..K.
        to_zero: P_i0, the mass sent to the absorbing state.
        overflow: Mass sent beyond K.
    """

    row: np.ndarray
    to_zero: float
    overflow: float

    @property
    def deficit(self):
        """Total row mass missing from {1..K}."""
        return self.to_zero + self.overflow


def _power_rows(dist, n_rows, order):
    """Coefficients 0..order of F^i for i = 1..n_rows, one row each."""
    out = np.zeros((n_rows, order + 1))
    current = np.zeros(order + 1)
    current[0] = 1.0
    pmf = dist.pmf
    for i in range(n_rows):
        current = np.convolve(current, pmf)[: order + 1]
        out[i, : current.size] = current
    return out


def transition_row(dist, i, K):
    """Row i of the killed transition matrix on {1..K}.

    Args:
        dist: The offspring law.
        i: The current state, i >= 1.
        K: The truncation.

    Returns:
        A TransitionRow with P_ij for j = 1..K, the mass to 0 and beyond K.
    """
    if i < 1 or K < 1:
        raise InvalidSpecError("transition", "need i >= 1 and K >= 1")
    coeffs = _power_rows(dist, i, K)[-1]
    row = coeffs[1:].copy()
    to_zero = float(coeffs[0])
    return TransitionRow(row, to_zero, max(0.0, 1.0 - row.sum() - to_zero))


@dataclass(frozen=True, eq=False)
class TransitionBlock:
    """The killed kernel P restricted to {1..K} x {1..K}.

    Attributes:
        entries: K x K matrix, entries[i-1, j-1] = P_ij.
        zero_column: P_i0 for i = 1..K.
        overflow: Mass leaving {0..K} from each row.
    """

    entries: np.ndarray
    zero_column: np.ndarray
    overflow: np.ndarray

    @property
    def truncation(self):
        return self.entries.shape[0]

    @property
    def row_deficit(self):
        """Per-row mass assigned to state 0 and to states beyond K."""
        return self.zero_column + self.overflow

    def with_zero(self):
        """The (K+1) x (K+1) kernel P_0 including the absorbing state 0."""
        k = self.truncation
        full = np.zeros((k + 1, k + 1))
        full[0, 0] = 1.0
        full[1:, 0] = self.zero_column
        full[1:, 1:] = self.entries
        return full


def transition_block(dist, K):
    """Build the whole TransitionBlock by repeated truncated multiplication."""
    rows = _power_rows(dist, K, K)
    entries = rows[:, 1:]
    zero_column = rows[:, 0]
    overflow = np.clip(1.0 - entries.sum(axis=1) - zero_column, 0.0, None)
    return TransitionBlock(entries, zero_column, overflow)


def q_process_block(block, m):
    """Kernel of the Q-process, Q_ij = P_ij j / (m i), on {1..K}.

    Args:
        block: The killed kernel.
        m: The offspring mean.

    Returns:
        A K x K matrix; its rows sum to one up to truncation.
    """
    states = np.arange(1, block.truncation + 1, dtype=float)
    return block.entries * states[None, :] / (m * states[:, None])


def simulate_steps(dist, populations, rng):
    """Advance many independent populations by one generation.

    Args:
        dist: The offspring law.
        populations: Integer array of current sizes (0 stays 0).
        rng: A numpy Generator owned by the calling thread.

    Returns:
        An int64 array with the next generation sizes.
    """
    z = np.asarray(populations, dtype=np.int64)
    out = np.zeros_like(z)
    if dist.is_pure_death:
        alive = z > 0
        out[alive] = rng.binomial(z[alive], dist.pmf[1])
        return out
    cdf = dist.cdf()
    alive = np.flatnonzero(z > 0)
    start = 0
    while start < alive.size:
        sizes = z[alive[start:]]
        stop = start + max(1, int(np.searchsorted(np.cumsum(sizes), CHUNK_INDIVIDUALS)))
        idx = alive[start:stop]
        counts = z[idx]
        kids = np.searchsorted(cdf, rng.random(int(counts.sum())), side="right")
        kids = np.minimum(kids, dist.degree)
        offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
        out[idx] = np.add.reduceat(kids, offsets)
        start = stop
    return out


def simulate_step(dist, z, rng):
    """One generation of a single population: the sum of z iid offspring.

    Args:
        dist: The offspring law.
        z: The current population, z >= 0.
        rng: A numpy Generator.

    Returns:
        The next population size (0 stays 0).
    """
    if z == 0:
        return 0
    return int(simulate_steps(dist, np.array([z]), rng)[0])
