"""Provides custom exception classes for the application."""


class ReportedError(Exception):
    """Raise on exceptions that can only be reported but not handled.

    Attributes:
        return_code: The exit code the command line uses for the error.
    """

    return_code = 1


class InputError(ReportedError, ValueError):
    """Base class for errors caused by invalid input data or parameters."""


class InvalidSpecError(InputError):
    """Raise when an offspring, measure or configuration spec is malformed."""

    _msg = "Invalid {kind} spec: {reason}"

    def __init__(self, kind, reason):
        """Initializes an InvalidSpecError.

        Args:
            kind: What kind of spec was rejected (offspring, measure, ...).
            reason: Human readable description of the problem.
        """
        super().__init__(self._msg.format(kind=kind, reason=reason))


class ConflictingOptions(InputError):
    """Raise when mutually exclusive options are combined."""


class UsageError(InputError):
    """Raise when the command line cannot be parsed."""


class NonFiniteCoefficients(InputError):
    """Raise when a series receives NaN or infinite coefficients."""

    def __init__(self):
        super().__init__("Series coefficients must be finite.")


class FormalCompositionRequiresZeroConstant(InputError):
    """Raise when a formal composition is attempted with inner(0) != 0."""

    _msg = (
        "Formal composition needs an inner series with zero constant term, "
        "got {0!r}."
    )

    def __init__(self, constant):
        """Initializes a FormalCompositionRequiresZeroConstant.

        Args:
            constant: The offending constant term of the inner series.
        """
        super().__init__(self._msg.format(constant))


class NotAnExactPolynomial(InputError):
    """Raise when polynomial composition gets an outer series without degree."""

    def __init__(self):
        super().__init__(
            "Polynomial composition needs an outer series with an exact degree."
        )


class NonPositiveConstantTerm(InputError):
    """Raise when log or a real power is taken of a series with a0 <= 0."""

    _msg = "{op} needs a positive constant term, got {a0!r}."

    def __init__(self, op, a0):
        """Initializes a NonPositiveConstantTerm.

        Args:
            op: Name of the operation.
            a0: The constant term of the series.
        """
        super().__init__(self._msg.format(op=op, a0=a0))


class ZeroConstantTerm(InputError):
    """Raise when dividing by a series whose constant term vanishes."""

    def __init__(self):
        super().__init__("Series division needs a divisor with nonzero constant term.")


class InvalidPmf(InputError):
    """Raise when an offspring pmf is negative or not normalized."""

    _msg = "Invalid offspring pmf: {0}"

    def __init__(self, reason):
        super().__init__(self._msg.format(reason))


class NotSubcritical(InputError):
    """Raise when the offspring mean is not below one."""

    _msg = "Offspring mean m={0!r} is not subcritical (need 0 < m < 1)."

    def __init__(self, mean):
        """Initializes a NotSubcritical error.

        Args:
            mean: The offending offspring mean.
        """
        super().__init__(self._msg.format(mean))
        self.mean = mean


class OutOfRangeAlpha(InputError):
    """Raise when alpha lies outside the range an operation supports."""

    _msg = "alpha={alpha!r} outside {allowed} for {what}."

    def __init__(self, alpha, allowed, what):
        """Initializes an OutOfRangeAlpha error.

        Args:
            alpha: The rejected exponent.
            allowed: Textual description of the admissible range.
            what: The operation that rejected it.
        """
        super().__init__(self._msg.format(alpha=alpha, allowed=allowed, what=what))
        self.alpha = alpha


class KindAlphaMismatch(InputError):
    """Raise when a closed form kind does not fit the sign of alpha."""

    _msg = "Closed form '{kind}' needs {needs}, got alpha={alpha!r}."

    def __init__(self, kind, needs, alpha):
        super().__init__(self._msg.format(kind=kind, needs=needs, alpha=alpha))


class ZeroMass(InputError):
    """Raise when a measure that must be nonzero carries no mass."""

    def __init__(self, what="measure"):
        super().__init__("The {0} has zero mass.".format(what))


class NotNormalizedError(InputError):
    """Raise when a subordinator cumulant does not satisfy kappa(1) = 1."""

    _msg = "kappa(1)={0!r} differs from 1 by more than {1:g}; normalize the measure."

    def __init__(self, kappa_at_1, tolerance):
        super().__init__(self._msg.format(kappa_at_1, tolerance))


class ComputationError(ReportedError):
    """Base class for numerical procedures that could not deliver a result."""


class NoConvergence(ComputationError):
    """Raise when an iteration hits its step limit before the stopping rule."""

    _msg = "{what} did not converge after {steps} steps (residual {residual:.3e})."

    def __init__(self, what, steps, residual):
        """Initializes a NoConvergence error.

        Args:
            what: The iteration that failed.
            steps: Number of steps performed.
            residual: The last stopping residual.
        """
        super().__init__(self._msg.format(what=what, steps=steps, residual=residual))
        self.steps = steps
        self.residual = residual


class BandSumDiverging(ComputationError):
    """Raise when band contributions do not decay on one side of the band sum."""

    _msg = (
        "Band contributions did not decay within {bands} bands towards {side}; "
        "the integrand is not integrable against x^-{alpha} Lambda(dx)."
    )

    def __init__(self, side, bands, alpha):
        super().__init__(self._msg.format(side=side, bands=bands, alpha=alpha))


class QuadratureFailure(ComputationError):
    """Raise when adaptive quadrature cannot reach its accuracy target.

    Attributes:
        partial: Whatever results were computed before the failure.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial if partial is not None else {}


class InsufficientSupport(ComputationError):
    """Raise when too few lattice points fall into the recovery window."""

    _msg = "Only {found} lattice points in window [{lo:g}, {hi:g}); need {needed}."

    def __init__(self, found, lo, hi, needed=10):
        super().__init__(self._msg.format(found=found, lo=lo, hi=hi, needed=needed))


class TailMassTooLarge(ComputationError):
    """Raise when the truncated N-law keeps a tail mass above the threshold."""

    _msg = "N-law tail mass {mass:.3e} at order {order} exceeds {limit:g}."

    def __init__(self, mass, order, limit):
        super().__init__(self._msg.format(mass=mass, order=order, limit=limit))


class NoSurvivors(ComputationError):
    """Raise when no simulated path survives to the requested time."""

    _msg = "No path out of {0} survived until generation {1}."

    def __init__(self, n_samples, n):
        super().__init__(self._msg.format(n_samples, n))


class VerificationFailed(ReportedError):
    """Raise when a requested verification does not pass its tolerance."""

    return_code = 2

    _msg = "Verification failed: {0}"

    def __init__(self, reports):
        """Initializes a VerificationFailed error.

        Args:
            reports: The reports that did not pass.
        """
        names = ", ".join(
            "{0} ({1:.3e} > {2:.3e})".format(r.check_name, r.residual, r.tolerance)
            for r in reports
        )
        super().__init__(self._msg.format(names))
        self.reports = list(reports)
