"""Defines domain enumerations that name the choices operations accept."""

from enum import Enum

from .errors import InvalidSpecError


class Choice(Enum):
    """Base for string-valued choices that can be parsed from user input."""

    def __str__(self):
        """Returns the string representation of the choice.

        Returns:
            The value of the member.
        """
        return self.value

    @classmethod
    def from_str(cls, value):
        """Gets a member from its string value (members pass through unchanged).

        Args:
            value: A member or the string value of a member.

        Returns:
            The matching member.

        Raises:
            InvalidSpecError: If the string does not match any member.
        """
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value == value or member.name == value:
                return member
        raise InvalidSpecError(
            cls.__name__,
            "unknown value {0!r} (choose from {1})".format(
                value, ", ".join(str(m) for m in cls)
            ),
        )


class ArithOp(Choice):
    """Coefficientwise operations on truncated series."""

    add = "add"
    sub = "sub"
    mul = "mul"
    scale = "scale"


class ComposeMode(Choice):
    """How a composition outer(inner(z)) is carried out."""

    polynomial_outer = "polynomial_outer"
    formal = "formal"


class ElementaryFunction(Choice):
    """Elementary functions applied to a truncated series."""

    exp = "exp"
    log = "log1p_of"
    pow = "pow"


class ClosedFormKind(Choice):
    """Closed form families of invariant measures for Lambda = s dx/x.

    qsd_power is 1 - (1-H)^alpha, log is -log(1-H), negative_power is
    (1-H)^alpha - 1 and true_power is (1-H)^alpha including the state 0.
    """

    qsd_power = "qsd_power"
    log = "log"
    negative_power = "negative_power"
    true_power = "true_power"


class MeasureSource(Choice):
    """Provenance of an invariant measure."""

    integral = "integral"
    closed_form = "closed_form"
    extremal = "extremal"
    mixture = "mixture"
    composition = "composition"
    table = "table"


class TailMode(Choice):
    """How sample_qsd resolves draws beyond the tabulated N-law."""

    exact = "exact"
    strict = "strict"


class MCMode(Choice):
    """Monte Carlo experiments offered by the command line."""

    qsd = "qsd"
    stationarity = "stationarity"
    yaglom = "yaglom"
