"""Euler-Maruyama simulation of the belief process under arbitrary strategies.

The account holder filters with the equilibrium intensity lambda* of the
active regime whatever the fraudster actually does, so one belief SDE
covers equilibrium play and deviations alike:

    dP = lam*(P) P (1-P) (theta * rate_t - lam*(P) P) dt
         - lam*(P) P (1-P) dW.

With rate_t = lam*(P) and theta = 1 the drift reduces to
(lam*)^2 P (1-P)^2, with theta = 0 to -(lam*)^2 P^2 (1-P); a flat theft
path is the most pessimistic drift the fraudster can induce.  Paths are
clamped into [clamp_eps, 1 - clamp_eps], a numerical stand-in for the
analytic fact that P never reaches 0 in finite time; an empirical
no-explosion check lives in the test suite.

Stopping is detected on the time grid (no bridge correction): a
Threshold stopper fires at the first grid time with P >= level, a
RandomizedIntensity stopper integrates Gamma += beta(P) dt against a
per-path Exp(1) level drawn once at the start, firing as soon as Gamma
exceeds it and outright whenever P >= a.  The O(sqrt(dt)) grid-crossing
bias is absorbed by the acceptance tolerances downstream.

Paths are pure functions of (seed, path_index); see _kernels for the
counter-based randomness that makes this hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels as K
from .errors import DomainError, RegimeError
from .mixed import MixedEquilibrium
from .model import (
    ConstantRate,
    EquilibriumRate,
    FraudStrategy,
    Immediate,
    ModelParams,
    Never,
    NullFraud,
    RandomizedIntensity,
    ScaledEquilibrium,
    StopperStrategy,
    Threshold,
)
from .pure import PureEquilibrium

__all__ = [
    "PathConfig",
    "PathOutcome",
    "NEVER_STOPPED",
    "belief_step",
    "simulate_path",
    "simulate_path_with_trace",
    "simulate_batch",
]

Equilibrium = Union[PureEquilibrium, MixedEquilibrium]

# stop_time marker for paths the horizon truncated
NEVER_STOPPED = float("inf")

DEFAULT_CLAMP_EPS = 1e-9


@dataclass(frozen=True)
class PathConfig:
    """Discretization, clamping, seeding and trace options for simulation."""

    dt: float
    horizon: float
    clamp_eps: float = DEFAULT_CLAMP_EPS
    seed: int = 0
    record_path: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise DomainError(f"dt must be positive, got {self.dt!r}")
        if not (math.isfinite(self.horizon) and self.horizon >= self.dt):
            raise DomainError(f"horizon must be at least dt, got {self.horizon!r}")
        if not (0.0 < self.clamp_eps < 0.01):
            raise DomainError(f"clamp_eps must lie in (0, 0.01), got {self.clamp_eps!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))


@dataclass(frozen=True)
class PathOutcome:
    """Per-path simulation result.

    stop_time is NEVER_STOPPED when the horizon truncated the path, in
    which case stop_discount is 0 (no stopping cost is ever paid).
    discounted_theft is the left-endpoint sum of e^{-r t_i} rate(P_i) dt
    on {theta = 1} and identically zero on {theta = 0}.
    """

    theta: int
    stop_time: float
    discounted_theft: float
    stop_discount: float
    final_belief: float
    truncated: bool


def _fraud_code(fraud: FraudStrategy) -> tuple[int, float]:
    if isinstance(fraud, EquilibriumRate):
        return K.FRAUD_EQUILIBRIUM, 0.0
    if isinstance(fraud, ConstantRate):
        return K.FRAUD_CONSTANT, fraud.rate
    if isinstance(fraud, ScaledEquilibrium):
        return K.FRAUD_SCALED, fraud.scale
    if isinstance(fraud, NullFraud):
        return K.FRAUD_NULL, 0.0
    raise DomainError(f"unknown fraud strategy {fraud!r}")


def _stopper_code(stopper: StopperStrategy, eq: Equilibrium) -> tuple[int, float]:
    if isinstance(stopper, Threshold):
        return K.STOP_THRESHOLD, stopper.level
    if isinstance(stopper, RandomizedIntensity):
        if not isinstance(eq, MixedEquilibrium):
            raise RegimeError(
                "RandomizedIntensity stopping requires a mixed-regime equilibrium"
            )
        return K.STOP_INTENSITY, 0.0
    if isinstance(stopper, Immediate):
        return K.STOP_IMMEDIATE, 0.0
    if isinstance(stopper, Never):
        return K.STOP_NEVER, 0.0
    raise DomainError(f"unknown stopper strategy {stopper!r}")


def _eq_constants(eq: Equilibrium) -> tuple[float, float, float, float]:
    """(b, one_minus_a, coef_q, a_hi) consumed by the kernels.

    coef_q maps the belief to the survival argument q = coef_q * p/(1-p)
    below b; a_hi is the coefficient of the 1/p rate rule above b.  The
    pure regime has no upper boundary; one_minus_a = 0 is inert there.
    """
    if isinstance(eq, PureEquilibrium):
        coef_q = (1.0 - eq.b) / (2.0 * eq.b)
        a_hi = 2.0 * eq.b * math.sqrt(eq.r) / math.sqrt(math.pi)
        return eq.b, 0.0, coef_q, a_hi
    if isinstance(eq, MixedEquilibrium):
        coef_q = eq.psi_b * (1.0 - eq.b) / eq.b
        return eq.b, eq.one_minus_a, coef_q, eq.r * eq.M
    raise DomainError(f"unknown equilibrium object {eq!r}")


def belief_step(eq: Equilibrium, p: float, theta: int, fraud_rate: float,
                dt: float, z: float, clamp_eps: float = DEFAULT_CLAMP_EPS) -> float:
    """One Euler update of the belief given the Gaussian draw z."""
    if not (np.isfinite(p) and 0.0 < p < 1.0):
        raise DomainError(f"belief p must lie in (0, 1), got {p!r}")
    if theta not in (0, 1):
        raise DomainError(f"theta must be 0 or 1, got {theta!r}")
    if not (np.isfinite(fraud_rate) and fraud_rate >= 0.0):
        raise DomainError(f"fraud_rate must be >= 0, got {fraud_rate!r}")
    b, _, coef_q, a_hi = _eq_constants(eq)
    return float(K.belief_step(
        p, theta, fraud_rate, dt, z, b, coef_q, a_hi,
        math.sqrt(2.0 * eq.r), clamp_eps, 1.0 - clamp_eps,
    ))


def _outcome(theta: int, stop_step: int, theft: float, disc: float,
             final_p: float, dt: float) -> PathOutcome:
    stopped = stop_step >= 0
    return PathOutcome(
        theta=int(theta),
        stop_time=stop_step * dt if stopped else NEVER_STOPPED,
        discounted_theft=theft,
        stop_discount=disc if stopped else 0.0,
        final_belief=float(final_p),
        truncated=not stopped,
    )


def simulate_path(params: ModelParams, eq: Equilibrium, fraud: FraudStrategy,
                  stopper: StopperStrategy, theta: int, config: PathConfig,
                  path_index: int = 0) -> PathOutcome:
    """Simulate a single path with the given hidden state theta."""
    if theta not in (0, 1):
        raise DomainError(f"theta must be 0 or 1, got {theta!r}")
    fk, fp = _fraud_code(fraud)
    sk, sp = _stopper_code(stopper, eq)
    b, one_minus_a, coef_q, a_hi = _eq_constants(eq)
    th, ss, tf, dc, fin, _ = K.run_path(
        np.uint64(config.seed), np.uint64(path_index), int(theta), params.p,
        b, one_minus_a, coef_q, a_hi, eq.r, eq.M,
        fk, fp, sk, sp,
        params.p, config.dt, config.n_steps,
        config.clamp_eps, 1.0 - config.clamp_eps,
    )
    return _outcome(th, ss, tf, dc, fin, config.dt)


def simulate_path_with_trace(params: ModelParams, eq: Equilibrium,
                             fraud: FraudStrategy, stopper: StopperStrategy,
                             theta: int, config: PathConfig,
                             path_index: int = 0):
    """As simulate_path, additionally returning the per-grid-time trace.

    The trace is a (rows, 4) array with columns time, belief, clock
    integral Gamma, cumulative discounted theft.
    """
    if theta not in (0, 1):
        raise DomainError(f"theta must be 0 or 1, got {theta!r}")
    fk, fp = _fraud_code(fraud)
    sk, sp = _stopper_code(stopper, eq)
    b, one_minus_a, coef_q, a_hi = _eq_constants(eq)
    n = config.n_steps
    out_t = np.empty(n + 1)
    out_p = np.empty(n + 1)
    out_g = np.empty(n + 1)
    out_f = np.empty(n + 1)
    th, ss, tf, dc, fin, _, rows = K.run_path_recorded(
        np.uint64(config.seed), np.uint64(path_index), int(theta), params.p,
        b, one_minus_a, coef_q, a_hi, eq.r, eq.M,
        fk, fp, sk, sp,
        params.p, config.dt, n,
        config.clamp_eps, 1.0 - config.clamp_eps,
        out_t, out_p, out_g, out_f,
    )
    trace = np.column_stack([out_t[:rows], out_p[:rows], out_g[:rows], out_f[:rows]])
    return _outcome(th, ss, tf, dc, fin, config.dt), trace


def simulate_batch(params: ModelParams, eq: Equilibrium, fraud: FraudStrategy,
                   stopper: StopperStrategy, theta_mode: str, n_paths: int,
                   config: PathConfig) -> dict:
    """Simulate n_paths paths with path indices 0..n_paths-1.

    theta_mode is 'fixed0', 'fixed1' or 'prior' (Bernoulli(p) drawn from
    each path's own stream, so common random numbers carry across
    strategy sweeps).  Returns dense per-path arrays: theta, stop_step,
    theft, stop_discount, final_belief, touched_lower_clamp.
    """
    modes = {"fixed0": K.THETA_FIXED0, "fixed1": K.THETA_FIXED1, "prior": K.THETA_PRIOR}
    if theta_mode not in modes:
        raise DomainError(f"theta_mode must be one of {sorted(modes)}, got {theta_mode!r}")
    if n_paths < 1:
        raise DomainError(f"n_paths must be >= 1, got {n_paths!r}")
    fk, fp = _fraud_code(fraud)
    sk, sp = _stopper_code(stopper, eq)
    b, one_minus_a, coef_q, a_hi = _eq_constants(eq)
    out_theta = np.empty(n_paths, dtype=np.int64)
    out_stop = np.empty(n_paths, dtype=np.int64)
    out_theft = np.empty(n_paths)
    out_disc = np.empty(n_paths)
    out_final = np.empty(n_paths)
    out_touched = np.empty(n_paths, dtype=np.bool_)
    K.run_batch(
        np.uint64(config.seed), n_paths, modes[theta_mode], params.p,
        b, one_minus_a, coef_q, a_hi, eq.r, eq.M,
        fk, fp, sk, sp,
        params.p, config.dt, config.n_steps,
        config.clamp_eps, 1.0 - config.clamp_eps,
        out_theta, out_stop, out_theft, out_disc, out_final, out_touched,
    )
    stopped = out_stop >= 0
    return {
        "theta": out_theta,
        "stop_step": out_stop,
        "stop_time": np.where(stopped, out_stop * config.dt, NEVER_STOPPED),
        "theft": out_theft,
        "stop_discount": np.where(stopped, out_disc, 0.0),
        "final_belief": out_final,
        "touched_lower_clamp": out_touched,
        "stopped": stopped,
    }
