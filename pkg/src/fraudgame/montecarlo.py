"""Monte-Carlo estimators of the game payoffs and best-response sweeps.

Three estimators:

  * account cost     E[ theta * integral e^{-rs} dLambda_s + e^{-r tau} M ],
                     hidden state drawn Bernoulli(p) per path;
  * interim payoff   the fraudster's expected discounted theft given
                     theta = 1 (every path runs with the fraudster active);
  * ex-ante payoff   p times the interim payoff, exactly, by definition.

Deviation sweeps re-run an estimator over a family of strategies while
holding the seed fixed, so every entry sees the same Brownian increments,
hidden states and stopping clocks (common random numbers); differences
between entries are then far sharper than their individual errors.
Reductions use numpy's fixed-order pairwise summation over the per-path
arrays, which together with counter-based path randomness makes every
estimate reproducible bit for bit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .dynamics import PathConfig, simulate_batch
from .errors import DomainError
from .mixed import MixedEquilibrium
from .model import (
    EquilibriumRate,
    FraudStrategy,
    ModelParams,
    RandomizedIntensity,
    StopperStrategy,
    Threshold,
)

__all__ = [
    "PayoffEstimate",
    "estimate_account_cost",
    "estimate_fraud_payoff_interim",
    "estimate_fraud_payoff_exante",
    "deviation_sweep_stopper",
    "deviation_sweep_fraud",
    "equilibrium_stopper",
]


@dataclass(frozen=True)
class PayoffEstimate:
    """Sample mean with its standard error and the run configuration."""

    mean: float
    std_error: float
    n_paths: int
    dt_used: float
    horizon_used: float


def _estimate(values: np.ndarray, config: PathConfig) -> PayoffEstimate:
    n = values.size
    if n < 2:
        raise DomainError(f"need at least 2 paths for a standard error, got {n}")
    mean = float(np.sum(values) / n)
    var = float(np.sum(np.square(values - mean)) / (n - 1))
    return PayoffEstimate(
        mean=mean,
        std_error=math.sqrt(var / n),
        n_paths=n,
        dt_used=config.dt,
        horizon_used=config.horizon,
    )


def equilibrium_stopper(eq) -> StopperStrategy:
    """The stopper side of the Nash pair for eq's regime."""
    if isinstance(eq, MixedEquilibrium):
        return RandomizedIntensity()
    return Threshold(level=eq.b)


def estimate_account_cost(params: ModelParams, eq, stopper: StopperStrategy,
                          fraud: FraudStrategy, n: int,
                          config: PathConfig) -> PayoffEstimate:
    """Expected discounted cost of the account holder, theta ~ Bernoulli(p).

    Truncated paths pay no stopping cost (their stop_discount is zero)."""
    res = simulate_batch(params, eq, fraud, stopper, "prior", n, config)
    cost = res["theft"] + res["stop_discount"] * eq.M
    return _estimate(cost, config)


def estimate_fraud_payoff_interim(params: ModelParams, eq,
                                  stopper: StopperStrategy,
                                  fraud: FraudStrategy, n: int,
                                  config: PathConfig) -> PayoffEstimate:
    """Expected discounted theft conditional on an active fraudster."""
    res = simulate_batch(params, eq, fraud, stopper, "fixed1", n, config)
    return _estimate(res["theft"], config)


def estimate_fraud_payoff_exante(params: ModelParams, eq,
                                 stopper: StopperStrategy,
                                 fraud: FraudStrategy, n: int,
                                 config: PathConfig) -> PayoffEstimate:
    """Unconditional fraudster payoff: p times the interim estimate."""
    interim = estimate_fraud_payoff_interim(params, eq, stopper, fraud, n, config)
    return PayoffEstimate(
        mean=params.p * interim.mean,
        std_error=params.p * interim.std_error,
        n_paths=interim.n_paths,
        dt_used=interim.dt_used,
        horizon_used=interim.horizon_used,
    )


def deviation_sweep_stopper(params: ModelParams, eq, levels: Sequence[float],
                            n: int, config: PathConfig,
                            fraud: Optional[FraudStrategy] = None,
                            ) -> list[tuple[float, PayoffEstimate]]:
    """Account cost of threshold deviations against the equilibrium fraudster.

    All levels run on the same seed (common random numbers)."""
    fraud = fraud if fraud is not None else EquilibriumRate()
    out = []
    for level in levels:
        est = estimate_account_cost(params, eq, Threshold(level=level), fraud, n, config)
        out.append((float(level), est))
    return out


def deviation_sweep_fraud(params: ModelParams, eq,
                          strategies: Iterable[FraudStrategy], n: int,
                          config: PathConfig,
                          stopper: Optional[StopperStrategy] = None,
                          ) -> list[tuple[FraudStrategy, PayoffEstimate]]:
    """Interim payoff of fraud deviations against the equilibrium stopper."""
    stopper = stopper if stopper is not None else equilibrium_stopper(eq)
    out = []
    for strategy in strategies:
        est = estimate_fraud_payoff_interim(params, eq, stopper, strategy, n, config)
        out.append((strategy, est))
    return out
