"""Run configuration merged from an optional JSON file and command-line flags."""

from dataclasses import dataclass, fields
from json import load
from json.decoder import JSONDecodeError
import logging
import os

from .branching import load_offspring
from .domains import ClosedFormKind, MCMode, TailMode
from .errors import InvalidSpecError
from .fields import ConfigField, InvalidFieldsError
from .parsers import load_spec
from .selfsimilar import load_measure
from .yaglom import DEFAULT_ZGRID


def _float_list(value):
    """A list of floats from a JSON list or a comma separated string."""
    if isinstance(value, str):
        value = value.split(",")
    if not isinstance(value, (list, tuple)):
        raise TypeError("expected a list of numbers, got {0!r}".format(value))
    return [float(v) for v in value]


@dataclass
class RunConfig:
    """Everything a subcommand needs; attribute names follow ConfigField.

    Attributes:
        command: The subcommand.
        offspring: Offspring spec.
        measure: Measure spec (without m, which comes from the offspring law).
        alpha: Exponent; lambda = m^alpha.
        order: Truncation K.
        tol: Yaglom stopping threshold.
        rel_tol: Band-sum stopping threshold.
        n_max: Yaglom step limit.
        seed: Master seed of Monte Carlo runs.
        samples: Number of Monte Carlo draws or paths.
        steps: Generations (Yaglom Monte Carlo, recovery n, Joffe N).
        kind: Closed form kind.
        t: Position of an extremal measure.
        zgrid: Grid of functional-equation checks.
        output_dir: Directory for CSV and JSON artifacts.
        normalize: Normalize Lambda for a QSD first.
        verify: Run the verification checks on the result.
        input: CSV table to verify instead of constructing one.
        k_report: Reported rows of the eigen check.
        bins: Recovery bins per band.
        tail: TailMode of the QSD sampler.
        shards: Monte Carlo shards.
        true_measure: Build a true invariant measure (state 0 kept).
        mode: MCMode.
        a: Rate of the Gamma check.
        lam: Eigenvalue override for verification.
    """

    command: str
    offspring: dict | None = None
    measure: dict | None = None
    alpha: float | None = None
    order: int = 256
    tol: float = 1e-12
    rel_tol: float = 1e-10
    n_max: int = 10_000
    seed: int = 0
    samples: int = 100_000
    steps: int = 10
    kind: str | None = None
    t: float | None = None
    zgrid: list | None = None
    output_dir: str = "."
    normalize: bool = False
    verify: bool = False
    input: str | None = None
    k_report: int | None = None
    bins: int = 8
    tail: str = "exact"
    shards: int = 1
    true_measure: bool = False
    mode: str = "qsd"
    a: float = 0.5
    lam: float | None = None

    @classmethod
    def from_sources(cls, command, flags, config_file=None):
        """Merge a JSON config file with command-line flags (flags win).

        Args:
            command: The subcommand.
            flags: Mapping of ConfigField member names to values; None means
                not given.
            config_file: Optional path of a JSON object with ConfigField keys.

        Returns:
            A validated RunConfig.

        Raises:
            InvalidFieldsError: If the file contains unknown keys.
            InvalidSpecError: If a value is out of range.
        """
        values = {}
        if config_file:
            try:
                with open(config_file) as f:
                    data = load(f)
            except (OSError, JSONDecodeError) as e:
                raise InvalidSpecError("config", str(e))
            if not isinstance(data, dict):
                raise InvalidSpecError("config", "expected a JSON object")
            known = {str(f) for f in ConfigField}
            bad = [k for k in data if k not in known]
            if bad:
                raise InvalidFieldsError(bad)
            for key, value in data.items():
                values[ConfigField.from_str(key).name] = value
        names = {f.name for f in fields(cls)}
        for name, value in flags.items():
            if value is not None and name in names:
                values[name] = value
        logging.debug("run configuration: %s", values)
        config = cls(command=command, **values)
        config.validate()
        return config

    def validate(self):
        """Check types and ranges before anything is computed."""
        try:
            self.order = int(self.order)
            self.n_max = int(self.n_max)
            self.seed = int(self.seed)
            self.samples = int(self.samples)
            self.steps = int(self.steps)
            self.shards = int(self.shards)
            self.bins = int(self.bins)
            self.tol = float(self.tol)
            self.rel_tol = float(self.rel_tol)
            self.a = float(self.a)
            if self.alpha is not None:
                self.alpha = float(self.alpha)
            if self.t is not None:
                self.t = float(self.t)
            if self.lam is not None:
                self.lam = float(self.lam)
            if self.k_report is not None:
                self.k_report = int(self.k_report)
            if self.zgrid is not None:
                self.zgrid = _float_list(self.zgrid)
        except (TypeError, ValueError) as e:
            raise InvalidSpecError("config", str(e))
        if self.input is not None and not os.path.isfile(str(self.input)):
            raise InvalidSpecError("input", "no such file: {0}".format(self.input))
        checks = [
            (self.order >= 1, "order must be >= 1"),
            (self.tol > 0, "tol must be positive"),
            (self.rel_tol > 0, "rel_tol must be positive"),
            (self.n_max >= 1, "n_max must be >= 1"),
            (self.seed >= 0, "seed must be >= 0"),
            (self.samples >= 1, "samples must be >= 1"),
            (self.steps >= 0, "steps must be >= 0"),
            (self.shards >= 1, "shards must be >= 1"),
            (self.bins >= 1, "bins must be >= 1"),
        ]
        for ok, reason in checks:
            if not ok:
                raise InvalidSpecError("config", reason)
        if self.offspring is not None:
            self.offspring = load_spec(self.offspring, "offspring")
        if self.measure is not None:
            self.measure = load_spec(self.measure, "measure")
        self.tail = str(TailMode.from_str(self.tail))
        self.mode = str(MCMode.from_str(self.mode))
        if self.kind is not None:
            self.kind = str(ClosedFormKind.from_str(self.kind))

    def distribution(self):
        """The offspring law of the run."""
        if self.offspring is None:
            raise InvalidSpecError("offspring", "an offspring spec is required")
        return load_offspring(self.offspring)

    def self_similar_measure(self, m):
        """Lambda of the run with ratio m."""
        if self.measure is None:
            raise InvalidSpecError("measure", "a measure spec is required")
        return load_measure(self.measure, m)

    def grid(self):
        return DEFAULT_ZGRID if self.zgrid is None else self.zgrid

    def require_alpha(self):
        if self.alpha is None:
            raise InvalidSpecError("config", "alpha is required")
        return self.alpha
