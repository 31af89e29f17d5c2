"""Shared enums and the exception hierarchy."""

from __future__ import annotations

from enum import Enum


class MeanEquiError(Exception):
    """Base class of all errors raised by meanequi."""


class MixedSpaceError(MeanEquiError, ValueError):
    """Points do not belong to the state space of the system."""


class HorizonError(MeanEquiError, ValueError):
    """A horizon, window or index is out of range."""


class EmptyScheduleError(MeanEquiError, ValueError):
    """A schedule or list of window lengths is empty or not increasing."""


class CapabilityError(MeanEquiError, ValueError):
    """The system does not support the requested sampling."""


class PreconditionError(MeanEquiError, ValueError):
    """An operation was called outside of its precondition."""


class ResolutionError(MeanEquiError, ValueError):
    """A radius is below what the point representation can resolve."""


class ConfigError(MeanEquiError, ValueError):
    """Invalid configuration; ``field`` is the dotted path of the culprit."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class SeriesError(MeanEquiError, LookupError):
    """A plot series selector did not match."""


class SpaceKind(str, Enum):
    """The representation used by the points of a system."""

    TORUS = "torus"
    INTERVAL = "interval"
    SYMBOLIC = "symbolic"
    FINITE = "finite"
    PRODUCT = "product"


class PairOutcome(str, Enum):
    """Outcome of a test on a single pair of points."""

    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"


class Outcome(str, Enum):
    """Outcome of a system-level property check."""

    CERTIFIED = "CertifiedAtScale"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"


class Expectation(str, Enum):
    """Catalog metadata about the classification of a system."""

    TRUE = "True"
    FALSE = "False"
    UNKNOWN = "Unknown"


class Property(str, Enum):
    """System properties that can be scanned for a modulus."""

    EQUICONTINUOUS = "equicontinuous"
    MEAN_EQ = "mean_eq"
    EQ_IN_MEAN = "eq_in_mean"
    WEYL_MEAN_EQ = "weyl_mean_eq"
    MEAN_L_STABLE = "mean_l_stable"
