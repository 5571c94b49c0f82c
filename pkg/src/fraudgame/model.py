"""Model parameters, regime classification and strategy descriptors.

The game is parameterised by a discount rate r, a deactivation cost M and
a prior probability p that the fraudster is active.  The boundary value

    M_hat(r) = sqrt(pi) / (2 sqrt(r))

splits the parameter space: for M <= M_hat the stopper uses a pure
threshold rule, for M > M_hat the equilibrium requires randomized
stopping.  Strategies are declarative value objects (no callbacks) so
that experiment configurations serialize to flat text files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import DomainError

__all__ = [
    "ModelParams",
    "Regime",
    "m_hat",
    "classify",
    "EquilibriumRate",
    "ConstantRate",
    "ScaledEquilibrium",
    "NullFraud",
    "FraudStrategy",
    "Threshold",
    "RandomizedIntensity",
    "Immediate",
    "Never",
    "StopperStrategy",
    "parse_fraud",
    "parse_stopper",
    "format_fraud",
    "format_stopper",
]


@dataclass(frozen=True)
class ModelParams:
    """Game parameters: discount rate r > 0, stopping cost M > 0, prior p in (0,1)."""

    r: float
    M: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0.0):
            raise DomainError(f"discount rate r must be positive, got {self.r!r}")
        if not (math.isfinite(self.M) and self.M > 0.0):
            raise DomainError(f"stopping cost M must be positive, got {self.M!r}")
        if not (math.isfinite(self.p) and 0.0 < self.p < 1.0):
            raise DomainError(f"prior p must lie in (0, 1), got {self.p!r}")


@dataclass(frozen=True)
class Regime:
    """Classification result: kind is 'pure' or 'mixed', m_hat the boundary cost."""

    kind: str
    m_hat: float

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"


def m_hat(r: float) -> float:
    """Boundary stopping cost sqrt(pi)/(2 sqrt(r)) separating the regimes."""
    if not (math.isfinite(r) and r > 0.0):
        raise DomainError(f"discount rate r must be positive, got {r!r}")
    return math.sqrt(math.pi) / (2.0 * math.sqrt(r))


def classify(params: ModelParams) -> Regime:
    """Pure when M <= m_hat(r), mixed otherwise.  The tie goes to pure,
    since the pure-threshold equilibrium is valid up to and including the
    boundary cost."""
    boundary = m_hat(params.r)
    return Regime(kind="pure" if params.M <= boundary else "mixed", m_hat=boundary)


# --- fraud strategies -------------------------------------------------------


@dataclass(frozen=True)
class EquilibriumRate:
    """Steal at the equilibrium rate lambda*(P) of the active regime."""


@dataclass(frozen=True)
class ConstantRate:
    """Steal at a fixed rate regardless of the belief."""

    rate: float

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate >= 0.0):
            raise DomainError(f"constant fraud rate must be >= 0, got {self.rate!r}")


@dataclass(frozen=True)
class ScaledEquilibrium:
    """Steal at scale * lambda*(P) for a fixed scale > 0."""

    scale: float

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise DomainError(f"equilibrium scale must be > 0, got {self.scale!r}")


@dataclass(frozen=True)
class NullFraud:
    """Never steal."""


FraudStrategy = Union[EquilibriumRate, ConstantRate, ScaledEquilibrium, NullFraud]


# --- stopper strategies -----------------------------------------------------


@dataclass(frozen=True)
class Threshold:
    """Deactivate at the first grid time the belief reaches the level."""

    level: float

    def __post_init__(self):
        if not (math.isfinite(self.level) and 0.0 < self.level < 1.0):
            raise DomainError(f"threshold level must lie in (0, 1), got {self.level!r}")


@dataclass(frozen=True)
class RandomizedIntensity:
    """Stop at rate beta(P) against an Exp(1) clock, surely once P >= a.

    Only valid with a mixed-regime equilibrium."""


@dataclass(frozen=True)
class Immediate:
    """Deactivate at time zero."""


@dataclass(frozen=True)
class Never:
    """Never deactivate."""


StopperStrategy = Union[Threshold, RandomizedIntensity, Immediate, Never]


# --- flat-text serialization ------------------------------------------------

def format_fraud(strategy: FraudStrategy) -> str:
    if isinstance(strategy, EquilibriumRate):
        return "equilibrium"
    if isinstance(strategy, ConstantRate):
        return f"constant:{strategy.rate:.17g}"
    if isinstance(strategy, ScaledEquilibrium):
        return f"scaled:{strategy.scale:.17g}"
    if isinstance(strategy, NullFraud):
        return "null"
    raise DomainError(f"unknown fraud strategy {strategy!r}")


def parse_fraud(text: str) -> FraudStrategy:
    """Parse 'equilibrium', 'null', 'constant:<rate>' or 'scaled:<c>'."""
    head, _, arg = text.strip().partition(":")
    head = head.lower()
    try:
        if head == "equilibrium" and not arg:
            return EquilibriumRate()
        if head == "null" and not arg:
            return NullFraud()
        if head == "constant":
            return ConstantRate(rate=float(arg))
        if head == "scaled":
            return ScaledEquilibrium(scale=float(arg))
    except ValueError as exc:
        raise DomainError(f"bad fraud strategy {text!r}: {exc}") from exc
    raise DomainError(f"unknown fraud strategy {text!r}")


def format_stopper(strategy: StopperStrategy) -> str:
    if isinstance(strategy, Threshold):
        return f"threshold:{strategy.level:.17g}"
    if isinstance(strategy, RandomizedIntensity):
        return "intensity"
    if isinstance(strategy, Immediate):
        return "immediate"
    if isinstance(strategy, Never):
        return "never"
    raise DomainError(f"unknown stopper strategy {strategy!r}")


def parse_stopper(text: str) -> StopperStrategy:
    """Parse 'threshold:<level>', 'intensity', 'immediate' or 'never'."""
    head, _, arg = text.strip().partition(":")
    head = head.lower()
    try:
        if head == "threshold":
            return Threshold(level=float(arg))
        if head == "intensity" and not arg:
            return RandomizedIntensity()
        if head == "immediate" and not arg:
            return Immediate()
        if head == "never" and not arg:
            return Never()
    except ValueError as exc:
        raise DomainError(f"bad stopper strategy {text!r}: {exc}") from exc
    raise DomainError(f"unknown stopper strategy {text!r}")
