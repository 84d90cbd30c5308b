"""Self-similar measures Lambda(A) = Lambda(mA) on (0, inf) and their integrals.

A measure is stored on the fundamental band [1, 1/m). Every other band
[m^-n, m^-n-1) carries the push-forward of the fundamental block under
x -> m^-n x, so integrals against x^-alpha Lambda(dx) are sums over bands of
fixed-rule integrals on the fundamental block.
"""

from dataclasses import dataclass, field
import json
import logging
import math
from typing import NamedTuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gamma

from .errors import (
    BandSumDiverging,
    InvalidSpecError,
    OutOfRangeAlpha,
    ZeroMass,
)

#: Gauss-Legendre nodes per band for the log-uniform part.
GAUSS_NODES = 32

#: Gauss-Legendre nodes per density cell.
CELL_NODES = 8

#: Bands per side beyond the requested span before giving up.
MAX_BANDS = 64


def fold_into_band(x, m):
    """Map x > 0 into [1, 1/m) by multiplication with an integer power of m."""
    period = -math.log(m)
    n = math.floor(math.log(x) / period)
    y = x * m**n
    if y >= 1.0 / m:
        y *= m
    elif y < 1.0:
        y /= m
    return y


@dataclass(frozen=True, eq=False)
class SelfSimilarMeasure:
    """A measure on (0, inf) with Lambda(A) = Lambda(mA), given on [1, 1/m).

    The fundamental block is c dy/y + sum_i v_i 1[cell_i](y) dy/y + sum of
    atoms, where the cells split [1, 1/m) into equal pieces in log y.

    Attributes:
        m: The self-similarity ratio, 0 < m < 1.
        log_uniform_weight: c >= 0, the coefficient of dx/x.
        atoms: Tuple of (position, weight) with positions in [1, 1/m).
        density: Cell values (relative to dx/x), or an empty array.
        spec: The measure spec it was built from, for provenance.
    """

    m: float
    log_uniform_weight: float = 0.0
    atoms: tuple = ()
    density: np.ndarray = field(default_factory=lambda: np.zeros(0))
    spec: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not 0.0 < self.m < 1.0:
            raise InvalidSpecError("measure", "ratio m must lie in (0, 1)")
        if not self.log_uniform_weight >= 0.0:
            raise InvalidSpecError("measure", "log-uniform weight must be >= 0")
        atoms = []
        for x, w in self.atoms:
            x, w = float(x), float(w)
            if x <= 0 or w < 0 or not np.isfinite(x * w):
                raise InvalidSpecError("measure", "bad atom ({0}, {1})".format(x, w))
            if w > 0:
                atoms.append((fold_into_band(x, self.m), w))
        density = np.array(self.density, dtype=float).ravel()
        if np.any(density < 0) or not np.all(np.isfinite(density)):
            raise InvalidSpecError("measure", "cell values must be finite and >= 0")
        density.setflags(write=False)
        object.__setattr__(self, "atoms", tuple(sorted(atoms)))
        object.__setattr__(self, "density", density)
        object.__setattr__(self, "log_uniform_weight", float(self.log_uniform_weight))

    @classmethod
    def log_uniform(cls, m, c=1.0):
        """The measure c dx/x."""
        return cls(m, log_uniform_weight=c, spec={"type": "log_uniform", "c": c})

    @classmethod
    def atom(cls, m, x, w=1.0):
        """A single atom at x (folded into the fundamental band), weight w."""
        return cls(m, atoms=((x, w),), spec={"type": "atoms", "atoms": [[x, w]]})

    @property
    def period(self):
        """log(1/m), the log-length of one band."""
        return -math.log(self.m)

    @property
    def is_zero(self):
        return self.fundamental_mass == 0.0

    @property
    def fundamental_mass(self):
        """Lambda([1, 1/m)), equal to Lambda([m, 1))."""
        cells = self.density.sum() * self.period / self.density.size if self.density.size else 0.0
        return (
            self.log_uniform_weight * self.period
            + float(cells)
            + sum(w for _, w in self.atoms)
        )

    def segments(self):
        """Continuous part as (y_lo, y_hi, value) pieces of the fundamental band."""
        if self.density.size:
            edges = np.exp(np.linspace(0.0, self.period, self.density.size + 1))
            edges[-1] = 1.0 / self.m
            return [
                (edges[i], edges[i + 1], v + self.log_uniform_weight)
                for i, v in enumerate(self.density)
                if v + self.log_uniform_weight > 0
            ]
        if self.log_uniform_weight > 0:
            return [(1.0, 1.0 / self.m, self.log_uniform_weight)]
        return []

    def scaled(self, s):
        """The measure s * Lambda."""
        return SelfSimilarMeasure(
            self.m,
            self.log_uniform_weight * s,
            tuple((x, w * s) for x, w in self.atoms),
            self.density * s,
            spec=dict(self.to_spec(), scale=self.to_spec().get("scale", 1.0) * s),
        )

    def __add__(self, other):
        if not math.isclose(self.m, other.m, rel_tol=1e-12):
            raise InvalidSpecError("measure", "cannot add measures with different m")
        if self.density.size and other.density.size:
            if self.density.size != other.density.size:
                raise InvalidSpecError("measure", "cell partitions differ")
            density = self.density + other.density
        else:
            density = self.density if self.density.size else other.density
        return SelfSimilarMeasure(
            self.m,
            self.log_uniform_weight + other.log_uniform_weight,
            self.atoms + other.atoms,
            density,
            spec={"type": "sum", "terms": [self.to_spec(), other.to_spec()]},
        )

    def fundamental_rule(self, nodes=GAUSS_NODES, cell_nodes=CELL_NODES):
        """Quadrature nodes y_j and weights w_j with sum w_j g(y_j) ~ int g dLambda_0.

        Continuous parts use Gauss-Legendre in u = log y; atoms are exact.
        A uniform band gets ``nodes`` points, each density cell gets
        ``cell_nodes`` scaled by nodes / GAUSS_NODES.
        """
        ys, ws = [], []
        pieces = self.segments()
        if self.density.size:
            count = max(1, round(cell_nodes * nodes / GAUSS_NODES))
        else:
            count = nodes
        if pieces:
            t, wt = leggauss(count)
            for lo, hi, value in pieces:
                a, b = math.log(lo), math.log(hi)
                half = 0.5 * (b - a)
                ys.append(np.exp(a + half * (t + 1.0)))
                ws.append(value * half * wt)
        if self.atoms:
            ys.append(np.array([x for x, _ in self.atoms]))
            ws.append(np.array([w for _, w in self.atoms]))
        if not ys:
            return np.zeros(0), np.zeros(0)
        return np.concatenate(ys), np.concatenate(ws)

    def mass(self, lo, hi, alpha=0.0):
        """Exact integral of x^-alpha Lambda(dx) over [lo, hi).

        Args:
            lo: Lower bound, > 0.
            hi: Upper bound.
            alpha: The exponent.

        Returns:
            The weighted mass.
        """
        if not 0 < lo < hi:
            return 0.0
        period = self.period
        first = math.floor(math.log(lo) / period) - 1
        last = math.ceil(math.log(hi) / period) + 1
        total = 0.0
        for n in range(first, last + 1):
            scale = self.m ** (-n)
            for a, b, value in self.segments():
                a, b = max(a * scale, lo), min(b * scale, hi)
                if b > a:
                    total += value * _power_integral(a, b, alpha)
            for x, w in self.atoms:
                xs = x * scale
                if lo <= xs < hi:
                    total += w * xs ** (-alpha)
        return total

    def to_spec(self):
        """A JSON friendly description used in table headers."""
        if self.spec:
            return dict(self.spec)
        out = {"type": "composite", "m": self.m, "c": self.log_uniform_weight}
        if self.atoms:
            out["atoms"] = [list(a) for a in self.atoms]
        if self.density.size:
            out["cells"] = self.density.tolist()
        return out


def _power_integral(a, b, alpha):
    """int_a^b x^(-alpha-1) dx."""
    if alpha == 0:
        return math.log(b / a)
    return (a ** (-alpha) - b ** (-alpha)) / alpha


def load_measure(spec, m):
    """Build a SelfSimilarMeasure from a measure spec.

    Accepted specs::

        {"type": "log_uniform", "c": 1.0}
        {"type": "atoms", "atoms": [[1.3, 0.5], ...]}
        {"type": "log_density", "cells": [...], "c": 0.0}

    Args:
        spec: A dict or JSON string.
        m: The ratio, inherited from the offspring law.

    Returns:
        The measure.

    Raises:
        InvalidSpecError: If the spec is malformed.
    """
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as e:
            raise InvalidSpecError("measure", str(e))
    if not isinstance(spec, dict) or "type" not in spec:
        raise InvalidSpecError("measure", "expected an object with a 'type'")
    kind = spec["type"]
    scale = spec.get("scale", 1.0)
    spec = {k: v for k, v in spec.items() if k not in ("scale", "m")}
    try:
        if kind == "sum":
            terms = [load_measure(term, m) for term in spec["terms"]]
            measure = terms[0]
            for term in terms[1:]:
                measure = measure + term
        elif kind == "composite":
            measure = SelfSimilarMeasure(
                m,
                float(spec.get("c", 0.0)),
                atoms=tuple((float(x), float(w)) for x, w in spec.get("atoms", [])),
                density=np.asarray(spec.get("cells", []), dtype=float),
            )
        elif kind == "log_uniform":
            measure = SelfSimilarMeasure(m, float(spec.get("c", 1.0)), spec=spec)
        elif kind == "atoms":
            atoms = tuple((float(x), float(w)) for x, w in spec["atoms"])
            measure = SelfSimilarMeasure(m, atoms=atoms, spec=spec)
        elif kind == "log_density":
            measure = SelfSimilarMeasure(
                m,
                float(spec.get("c", 0.0)),
                density=np.asarray(spec["cells"], dtype=float),
                spec=spec,
            )
        else:
            raise InvalidSpecError("measure", "unknown type {0!r}".format(kind))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, InvalidSpecError):
            raise
        raise InvalidSpecError("measure", "bad or missing parameter: {0}".format(e))
    if scale != 1.0:
        measure = measure.scaled(float(scale))
    return measure


class IntegralResult(NamedTuple):
    """Result of a band-sum integral.

    Attributes:
        value: The integral (an array for vector-valued integrands).
        bands_used: (n_lo, n_hi), the range of band indices summed.
        tail_estimate: Last change of the extrapolated partial sums.
    """

    value: float | np.ndarray
    bands_used: tuple
    tail_estimate: float | np.ndarray


class _Side:
    """Running state of the band sum on one side of the fundamental band."""

    def __init__(self):
        self.total = 0.0
        self.tail = 0.0
        self.last = None
        self.change = 0.0

    def add(self, contribution):
        previous = self.total + self.tail
        self.total = self.total + contribution
        if self.last is None:
            self.tail = np.zeros_like(contribution)
        else:
            # a rising side may start from subnormal band contributions
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                ratio = np.where(self.last != 0, contribution / self.last, 0.0)
            geometric = (ratio > 0) & (ratio < 1)
            ratio = np.where(geometric, ratio, 0.0)
            self.tail = np.where(geometric, contribution * ratio / (1 - ratio), 0.0)
        self.last = contribution
        self.change = np.abs(self.total + self.tail - previous)

    @property
    def estimate(self):
        return self.total + self.tail


def integrate_selfsimilar(
    measure,
    alpha,
    f,
    rel_tol=1e-10,
    nodes=GAUSS_NODES,
    max_bands=MAX_BANDS,
    span=None,
):
    """Integrate f(x) x^-alpha Lambda(dx) as a sum over bands.

    Bands are added outwards from the fundamental band, first towards
    infinity, then towards zero. A side stops once two consecutive bands are
    quiet: componentwise, either the band contribution or the change of the
    geometrically extrapolated side sum is at most rel_tol times the current
    estimate. The extrapolated tail c r / (1 - r), with r the ratio of the
    last two contributions, is included in the value.

    Args:
        measure: The self-similar measure.
        alpha: The exponent.
        f: Vectorized integrand; f(x) returns shape (n,) or (n, V).
        rel_tol: Relative stopping threshold.
        nodes: Gauss-Legendre nodes per band.
        max_bands: Bands allowed per side beyond ``span`` before failing.
        span: Optional (x_lo, x_hi) the band sum must cover before the
            stopping test applies (for integrands whose components vanish
            numerically on the fundamental band).

    Returns:
        An IntegralResult.

    Raises:
        BandSumDiverging: If a side does not settle within max_bands.
    """
    y, w = measure.fundamental_rule(nodes)
    if y.size == 0:
        raise ZeroMass()
    m = measure.m
    x_lo, x_hi = span if span is not None else (1.0, 1.0)

    def band(n):
        x = y * m ** (-n)
        values = np.asarray(f(x), dtype=float)
        return np.dot(w * x ** (-alpha), values)

    centre = band(0)
    up, down = _Side(), _Side()
    extent = [0, 0]
    for side, sign, name in ((up, 1, "infinity"), (down, -1, "zero")):
        quiet = 0
        beyond = 0
        i = 0
        while quiet < 2:
            i += 1
            n = sign * i
            side.add(band(n))
            if sign > 0:
                covered = m ** (-n) >= x_hi
            else:
                covered = m ** (-n - 1) <= x_lo
            if not covered:
                continue
            beyond += 1
            estimate = np.abs(centre + up.estimate + down.estimate)
            small = np.abs(side.last) <= rel_tol * estimate
            stable = side.change <= rel_tol * estimate
            quiet = quiet + 1 if np.all(small | stable) else 0
            if beyond >= max_bands and quiet < 2:
                raise BandSumDiverging(name, max_bands, alpha)
        extent[0 if sign < 0 else 1] = n
    value = centre + up.estimate + down.estimate
    tail = up.change + down.change
    if np.ndim(value) == 0:
        value, tail = float(value), float(tail)
    logging.debug("band sum over n in [%d, %d]", extent[0], extent[1])
    return IntegralResult(value, (extent[0], extent[1]), tail)


class GammaCheck(NamedTuple):
    """Quadrature against the closed form of int (e^-ax - e^-x) x^-alpha dx/x."""

    numeric: float
    closed_form: float
    rel_error: float


def gamma_closed_form(a, alpha):
    """Gamma(-alpha)(a^alpha - 1) for alpha != 0 and -log(a) for alpha = 0."""
    if alpha == 0:
        return -math.log(a)
    return float(gamma(-alpha)) * (a**alpha - 1.0)


def gamma_integral_check(a, alpha, rel_tol=1e-10, m=0.5):
    """Compare the band-sum quadrature with the closed Gamma form.

    The integral is taken against Lambda = dx/x (self-similar for any m) with
    integrand e^-ax - e^-x at exponent alpha.

    Args:
        a: Rate in (0, 1].
        alpha: Exponent, alpha < 1.
        rel_tol: Band-sum stopping threshold.
        m: Band ratio of the log-uniform measure.

    Returns:
        A GammaCheck (absolute error when the closed form vanishes).

    Raises:
        OutOfRangeAlpha: If alpha >= 1.
        InvalidSpecError: If a is outside (0, 1].
    """
    if not 0 < a <= 1:
        raise InvalidSpecError("gamma-check", "a must lie in (0, 1]")
    if alpha >= 1:
        raise OutOfRangeAlpha(alpha, "(-inf, 1)", "the Gamma integral")

    def integrand(x):
        out = np.empty_like(x)
        small = x < 1.0
        xs = x[small]
        out[small] = np.exp(-xs) * np.expm1((1.0 - a) * xs)
        xl = x[~small]
        out[~small] = np.exp(-a * xl) - np.exp(-xl)
        return out

    result = integrate_selfsimilar(
        SelfSimilarMeasure.log_uniform(m), alpha, integrand, rel_tol=rel_tol
    )
    closed = gamma_closed_form(a, alpha)
    error = abs(result.value - closed)
    rel = error / abs(closed) if closed != 0 else error
    return GammaCheck(result.value, closed, rel)


def normalize_for_qsd(measure, alpha, rel_tol=1e-12):
    """Scale Lambda so that int (1 - e^-x) x^-alpha Lambda(dx) = 1.

    Args:
        measure: A nonzero self-similar measure.
        alpha: Exponent in (0, 1).
        rel_tol: Band-sum stopping threshold.

    Returns:
        The normalized measure s * Lambda.

    Raises:
        OutOfRangeAlpha: If alpha is outside (0, 1).
        ZeroMass: If the measure vanishes.
    """
    if not 0 < alpha < 1:
        raise OutOfRangeAlpha(alpha, "(0, 1)", "QSD normalization")
    if measure.is_zero:
        raise ZeroMass()
    result = integrate_selfsimilar(
        measure, alpha, lambda x: -np.expm1(-x), rel_tol=rel_tol
    )
    logging.debug("QSD normalization integral %.17g", result.value)
    return measure.scaled(1.0 / result.value)
