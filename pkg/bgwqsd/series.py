"""Truncated formal power series arithmetic.

All generating functions of the package (offspring pgf F, its iterates F_n, the
Yaglom pgf H, invariant measure pgfs G and the Hoppe function Q) are handled as
:class:`TruncatedSeries`: a dense float64 coefficient vector a_0..a_K.

Series are immutable. Operations return new series whose order is the minimum
of the input orders unless a smaller order is requested explicitly.
"""

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import lfilter

from .domains import ArithOp, ComposeMode, ElementaryFunction
from .errors import (
    FormalCompositionRequiresZeroConstant,
    InvalidSpecError,
    NonFiniteCoefficients,
    NonPositiveConstantTerm,
    NotAnExactPolynomial,
    ZeroConstantTerm,
)


def _last_nonzero(coeffs):
    """Index of the last nonzero entry of ``coeffs`` (0 for the zero vector)."""
    nonzero = np.flatnonzero(coeffs)
    return int(nonzero[-1]) if nonzero.size else 0


class TruncatedSeries:
    """A formal power series a_0 + a_1 z + ... + a_K z^K known up to order K.

    Attributes:
        coeffs: Read-only float64 vector with exactly K + 1 entries.
        exact_degree: Degree of the series when it is known to be an exact
            polynomial (all coefficients beyond the degree are structurally
            zero), otherwise None.
    """

    __slots__ = ("coeffs", "exact_degree")

    def __init__(self, coeffs, order=None, exact_degree=None):
        """Create a truncated series.

        Args:
            coeffs: Coefficients a_0, a_1, ...; padded with zeros or cut to
                ``order + 1`` entries.
            order: Truncation order K, defaults to ``len(coeffs) - 1``.
            exact_degree: Declare the series an exact polynomial of at most
                this degree.

        Raises:
            NonFiniteCoefficients: If a coefficient is NaN or infinite.
            InvalidSpecError: If the order is negative.
        """
        values = np.array(coeffs, dtype=float).ravel()
        if values.size == 0:
            values = np.zeros(1)
        if order is None:
            order = values.size - 1
        if order < 0:
            raise InvalidSpecError("series", "order must be >= 0")
        if not np.all(np.isfinite(values)):
            raise NonFiniteCoefficients()
        if values.size > order + 1:
            if exact_degree is not None and np.any(values[order + 1 :]):
                exact_degree = None
            values = values[: order + 1].copy()
        elif values.size < order + 1:
            values = np.concatenate([values, np.zeros(order + 1 - values.size)])
        if exact_degree is not None:
            exact_degree = _last_nonzero(values)
        values.setflags(write=False)
        self.coeffs = values
        self.exact_degree = exact_degree

    @classmethod
    def polynomial(cls, coeffs, order=None):
        """Create an exact polynomial, e.g. an offspring pgf.

        Args:
            coeffs: Polynomial coefficients, lowest degree first.
            order: Truncation order, defaults to the polynomial degree.

        Returns:
            A TruncatedSeries with ``exact_degree`` set when the polynomial
            fits into the order.
        """
        return cls(coeffs, order=order, exact_degree=len(coeffs) - 1)

    @classmethod
    def identity(cls, order):
        """The series z at the given order."""
        if order == 0:
            return cls([0.0], order=0, exact_degree=0)
        return cls([0.0, 1.0], order=order, exact_degree=1)

    @classmethod
    def constant(cls, value, order):
        """The constant series ``value`` at the given order."""
        return cls([value], order=order, exact_degree=0)

    @property
    def order(self):
        """The truncation order K."""
        return self.coeffs.size - 1

    @property
    def support_degree(self):
        """Index of the last nonzero coefficient."""
        return _last_nonzero(self.coeffs)

    def truncate(self, order):
        """Return the series truncated to a smaller order."""
        if order >= self.order:
            return self
        return TruncatedSeries(self.coeffs, order=order, exact_degree=self.exact_degree)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return self.coeffs.size

    def __call__(self, z):
        """Evaluate the truncated series pointwise by Horner's scheme."""
        return evaluate(self, z)

    def __repr__(self):
        head = ", ".join("{0:.6g}".format(c) for c in self.coeffs[:6])
        more = ", ..." if self.order > 5 else ""
        return "TruncatedSeries([{0}{1}], order={2})".format(head, more, self.order)

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.constant(float(other), self.order)

    def __add__(self, other):
        return series_arith(self, self._coerce(other), ArithOp.add)

    __radd__ = __add__

    def __sub__(self, other):
        return series_arith(self, self._coerce(other), ArithOp.sub)

    def __rsub__(self, other):
        return series_arith(self._coerce(other), self, ArithOp.sub)

    def __neg__(self):
        return series_arith(self, -1.0, ArithOp.scale)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_arith(self, other, ArithOp.mul)
        return series_arith(self, other, ArithOp.scale)

    __rmul__ = __mul__


def _truncated_product(a, b, order):
    """Cauchy product of two coefficient vectors cut to ``order``."""
    a = np.trim_zeros(a, "b")
    b = np.trim_zeros(b, "b")
    out = np.zeros(order + 1)
    if a.size == 0 or b.size == 0:
        return out
    prod = np.convolve(a, b)[: order + 1]
    out[: prod.size] = prod
    return out


def series_arith(a, b, op, order=None):
    """Add, subtract, multiply or scale truncated series.

    Args:
        a: Left operand.
        b: Right operand; a real number for ``op=scale``.
        op: One of :class:`ArithOp` (or its string value).
        order: Optional smaller result order.

    Returns:
        A TruncatedSeries of order min(a.order, b.order, order).

    Raises:
        NonFiniteCoefficients: If the scale factor is not finite.
    """
    op = ArithOp.from_str(op)
    if op is ArithOp.scale:
        factor = float(b)
        if not np.isfinite(factor):
            raise NonFiniteCoefficients()
        k = a.order if order is None else min(order, a.order)
        return TruncatedSeries(
            a.coeffs[: k + 1] * factor, order=k, exact_degree=a.exact_degree
        )
    k = min(a.order, b.order)
    if order is not None:
        k = min(k, order)
    x = a.coeffs[: k + 1]
    y = b.coeffs[: k + 1]
    exact = a.exact_degree is not None and b.exact_degree is not None
    if op is ArithOp.add:
        return TruncatedSeries(x + y, order=k, exact_degree=k if exact else None)
    if op is ArithOp.sub:
        return TruncatedSeries(x - y, order=k, exact_degree=k if exact else None)
    degree = None
    if exact and a.exact_degree + b.exact_degree <= k:
        degree = k
    return TruncatedSeries(_truncated_product(x, y, k), order=k, exact_degree=degree)


def series_compose(outer, inner, mode, order=None):
    """Compose two series, outer(inner(z)), by Horner's scheme.

    In ``polynomial_outer`` mode the outer series must be an exact polynomial
    and the inner constant term is arbitrary; the result is exact in the inner
    coefficients. In ``formal`` mode the inner constant term must vanish so
    that only the first K + 1 outer coefficients matter. Both modes run the
    same Horner loop, so they agree bit for bit when inner(0) = 0.

    Args:
        outer: The outer series.
        inner: The inner series.
        mode: A :class:`ComposeMode` (or its string value).
        order: Optional smaller result order; defaults to the inner order.

    Returns:
        The truncated composition.

    Raises:
        FormalCompositionRequiresZeroConstant: If mode is formal and
            inner(0) != 0.
        NotAnExactPolynomial: If mode is polynomial_outer and the outer series
            has no exact degree.
    """
    mode = ComposeMode.from_str(mode)
    k = inner.order if order is None else min(order, inner.order)
    if mode is ComposeMode.formal:
        if inner.coeffs[0] != 0:
            raise FormalCompositionRequiresZeroConstant(float(inner.coeffs[0]))
        k = min(k, outer.order)
    elif outer.exact_degree is None:
        raise NotAnExactPolynomial()
    coeffs = outer.coeffs
    if inner.coeffs[0] == 0:
        # terms z^j with j > k cannot reach the first k + 1 coefficients
        coeffs = coeffs[: k + 1]
    top = _last_nonzero(coeffs)
    x = np.trim_zeros(inner.coeffs[: k + 1], "b")
    acc = np.array([coeffs[top]])
    for j in range(top - 1, -1, -1):
        if x.size:
            acc = np.convolve(acc, x)[: k + 1]
        else:
            acc = np.zeros(1)
        acc[0] += coeffs[j]
    degree = None
    if (
        outer.exact_degree is not None
        and inner.exact_degree is not None
        and outer.exact_degree * inner.exact_degree <= k
    ):
        degree = k
    return TruncatedSeries(acc, order=k, exact_degree=degree)


def _exp_coeffs(c):
    order = c.size - 1
    out = np.zeros(order + 1)
    out[0] = np.exp(c[0])
    jc = np.arange(order + 1) * c
    d = _last_nonzero(jc)
    for k in range(1, order + 1):
        j = min(k, d)
        if j == 0:
            break
        out[k] = np.dot(jc[1 : j + 1], out[k - j : k][::-1]) / k
    return out


def _log_coeffs(c):
    order = c.size - 1
    a0 = c[0]
    out = np.zeros(order + 1)
    out[0] = np.log(a0)
    d = _last_nonzero(c)
    if d == 1:
        k = np.arange(1, order + 1)
        out[1:] = -((-c[1] / a0) ** k) / k
        return out
    for k in range(1, order + 1):
        lo = max(1, k - d)
        j = np.arange(lo, k)
        acc = np.dot(j * out[lo:k], c[k - lo : 0 : -1][: j.size]) if j.size else 0.0
        ak = c[k] if k <= d else 0.0
        out[k] = (ak - acc / k) / a0
    return out


def _pow_coeffs(c, alpha):
    order = c.size - 1
    a0 = c[0]
    out = np.zeros(order + 1)
    out[0] = a0**alpha
    d = _last_nonzero(c)
    if d == 0 or order == 0:
        return out
    if d == 1:
        k = np.arange(1, order + 1)
        ratios = (alpha + 1.0 - k) / k * (c[1] / a0)
        out[1:] = out[0] * np.cumprod(ratios)
        return out
    for k in range(1, order + 1):
        j = np.arange(1, min(k, d) + 1)
        weights = ((alpha + 1.0) * j - k) * c[j]
        out[k] = np.dot(weights, out[k - j]) / (k * a0)
    return out


def series_elementary(a, f, alpha=None):
    """Apply exp, log or a real power to a truncated series.

    The recursions only touch the support of ``a``, so exact polynomials of
    low degree (such as 1 - z) can be expanded to very large orders.

    Args:
        a: The argument series.
        f: An :class:`ElementaryFunction`; ``log1p_of`` is the logarithm of
            the series itself.
        alpha: The exponent for ``pow``.

    Returns:
        f(a) truncated at the order of ``a``.

    Raises:
        NonPositiveConstantTerm: For log and pow when a_0 <= 0.
        InvalidSpecError: If ``pow`` is requested without an exponent.
    """
    f = ElementaryFunction.from_str(f)
    c = a.coeffs
    if f is ElementaryFunction.exp:
        return TruncatedSeries(_exp_coeffs(c))
    if c[0] <= 0:
        raise NonPositiveConstantTerm(str(f), float(c[0]))
    if f is ElementaryFunction.log:
        return TruncatedSeries(_log_coeffs(c))
    if alpha is None:
        raise InvalidSpecError("series", "pow needs an exponent")
    alpha = float(alpha)
    degree = None
    if a.exact_degree is not None and float(alpha).is_integer() and alpha >= 0:
        if a.exact_degree * alpha <= a.order:
            degree = a.order
    return TruncatedSeries(_pow_coeffs(c, alpha), exact_degree=degree)


def series_div(a, b, order=None):
    """Truncated quotient a / b for a divisor with nonzero constant term.

    Args:
        a: Dividend.
        b: Divisor.
        order: Optional smaller result order.

    Returns:
        The quotient series.

    Raises:
        ZeroConstantTerm: If b_0 == 0.
    """
    if b.coeffs[0] == 0:
        raise ZeroConstantTerm()
    k = min(a.order, b.order) if b.exact_degree is None else a.order
    if order is not None:
        k = min(k, order)
    divisor = np.trim_zeros(b.coeffs[: k + 1], "b")
    return TruncatedSeries(lfilter([1.0], divisor, a.coeffs[: k + 1]), order=k)


def derivative(a):
    """Formal derivative; the result has order K - 1 (order 0 stays 0)."""
    if a.order == 0:
        return TruncatedSeries([0.0], exact_degree=0)
    return TruncatedSeries(
        npoly.polyder(a.coeffs),
        exact_degree=a.exact_degree,
    )


def evaluate(a, z):
    """Evaluate a truncated series at real points by Horner's scheme.

    Args:
        a: The series.
        z: A scalar or an array of points.

    Returns:
        The value(s) of the truncated polynomial at ``z``.
    """
    coeffs = a.coeffs[: a.support_degree + 1]
    return npoly.polyval(z, coeffs)
