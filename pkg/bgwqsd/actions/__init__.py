"""A collection of actions run by the subcommands."""

from .constructaction import ConstructAction
from .gammaaction import GammaCheckAction
from .hoppeaction import HoppeAction
from .joffeaction import JoffeAction
from .mcaction import MCAction
from .recoveraction import RecoverAction
from .verifyaction import VerifyAction
from .yaglomaction import YaglomAction

__all__ = [
    "ConstructAction",
    "GammaCheckAction",
    "HoppeAction",
    "JoffeAction",
    "MCAction",
    "RecoverAction",
    "VerifyAction",
    "YaglomAction",
]
