"""Provides the field enumerations for configuration keys and report columns."""

from enum import Enum

from .errors import InputError


def levenshtein(first, second):
    """Edit distance between two field names, every edit costing 1.

    Used to suggest the intended key for a misspelled one.
    """
    previous = list(range(len(second) + 1))
    for i, a in enumerate(first, start=1):
        current = [i]
        for j, b in enumerate(second, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (a != b))
            )
        previous = current
    return previous[-1]


class InvalidFieldsError(InputError):
    """Raise when a configuration or report names non-existent fields."""

    _msg = "Unknown fields: {0}. Did you mean: {1}. (Available fields: {2})"

    def __init__(self, bad_fields, field_enum=None):
        """Initializes an InvalidFieldsError.

        Args:
            bad_fields: A list of invalid field names.
            field_enum: The enumeration of valid fields, ConfigField by default.
        """
        self.field_enum = field_enum or ConfigField
        suggestions = self._get_suggestions(bad_fields)
        super().__init__(
            self._msg.format(
                ", ".join(map(repr, bad_fields)),
                ", ".join(sorted(suggestions)),
                ", ".join(map(str, self.field_enum)),
            )
        )

    def _get_suggestions(self, bad_fields):
        """Gets suggestions for invalid fields.

        Args:
            bad_fields: A list of invalid fields.

        Returns:
            A set of suggested fields.
        """
        names = [str(f) for f in self.field_enum]
        return {min(names, key=lambda n: levenshtein(n, bad)) for bad in bad_fields}


class KeyedField(Enum):
    """Enum members carrying (enum_id, key) tuples.

    Attributes:
        enum_id: The integer ID of the enum member.
        key: The external name of the field.
    """

    def __init__(self, enum_id, key):
        self.enum_id = enum_id
        self.key = key

    def __str__(self):
        return self.key

    @classmethod
    def from_str(cls, field):
        """Gets a member from its external name.

        Args:
            field: The string to convert.

        Returns:
            The matching member.

        Raises:
            InvalidFieldsError: If the string does not match any field.
        """
        for f in cls:
            if f.key == field:
                return f
        raise InvalidFieldsError([field], cls)


class ConfigField(KeyedField):
    """All keys a run configuration file may contain."""

    offspring = (0, "offspring")
    measure = (1, "measure")
    alpha = (2, "alpha")
    order = (3, "order")
    tol = (4, "tol")
    rel_tol = (5, "rel_tol")
    n_max = (6, "n_max")
    seed = (7, "seed")
    samples = (8, "samples")
    steps = (9, "steps")
    kind = (10, "kind")
    t = (11, "t")
    zgrid = (12, "zgrid")
    output_dir = (13, "output_dir")
    normalize = (14, "normalize")
    verify = (15, "verify")
    input = (16, "input")
    k_report = (17, "k_report")
    bins = (18, "bins")
    tail = (19, "tail")
    shards = (20, "shards")
    true_measure = (21, "true")
    mode = (22, "mode")
    a = (23, "a")
    lam = (24, "lambda")


class ReportField(KeyedField):
    """Columns that can be displayed for verification and Monte Carlo reports."""

    check_name = (0, "Check")
    residual = (1, "Residual")
    tolerance = (2, "Tolerance")
    passed = (3, "Passed")
    samples = (4, "Samples")
    tv_distance = (5, "TV")
    threshold = (6, "Threshold")
    chi2 = (7, "Chi2")
    seed = (8, "Seed")


#: Columns printed for verification reports.
VERIFICATION_FIELDS = [
    ReportField.check_name,
    ReportField.residual,
    ReportField.tolerance,
    ReportField.passed,
]

#: Columns printed for Monte Carlo reports.
MC_FIELDS = [
    ReportField.check_name,
    ReportField.samples,
    ReportField.tv_distance,
    ReportField.threshold,
    ReportField.chi2,
    ReportField.seed,
    ReportField.passed,
]
