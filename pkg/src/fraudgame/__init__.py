"""Nash equilibria of a fraud-detection stopping game, with simulation
and verification tooling.

An account holder watches a wealth process that a hidden fraudster may be
skimming and can pay M to deactivate them; the fraudster trades theft
intensity against detection.  The package constructs the closed-form
equilibrium of both regimes (threshold stopping for cheap deactivation,
randomized stopping for expensive), simulates the filtering belief under
arbitrary strategy pairs, and verifies the equilibrium property both
analytically (ODE residuals, smooth fit, variational scans) and
empirically (Monte-Carlo best-response sweeps).
"""

from .errors import DomainError, RegimeError
from .gaussians import NormalTriple, mills_F, normal_eval, quantile
from .model import (
    ConstantRate,
    EquilibriumRate,
    Immediate,
    ModelParams,
    Never,
    NullFraud,
    RandomizedIntensity,
    Regime,
    ScaledEquilibrium,
    Threshold,
    classify,
    m_hat,
)
from .pure import PureEquilibrium, build_pure
from .mixed import MixedEquilibrium, build_mixed, root_fn, STOP_NOW
from .dynamics import (
    NEVER_STOPPED,
    PathConfig,
    PathOutcome,
    belief_step,
    simulate_batch,
    simulate_path,
    simulate_path_with_trace,
)
from .montecarlo import (
    PayoffEstimate,
    deviation_sweep_fraud,
    deviation_sweep_stopper,
    equilibrium_stopper,
    estimate_account_cost,
    estimate_fraud_payoff_exante,
    estimate_fraud_payoff_interim,
)
from .verify import CheckResult, VerifyReport, hjb_scan, inequality_scan, residual_suite

__version__ = "0.1.0"

__all__ = [
    "DomainError", "RegimeError",
    "NormalTriple", "normal_eval", "quantile", "mills_F",
    "ModelParams", "Regime", "m_hat", "classify",
    "EquilibriumRate", "ConstantRate", "ScaledEquilibrium", "NullFraud",
    "Threshold", "RandomizedIntensity", "Immediate", "Never",
    "PureEquilibrium", "build_pure",
    "MixedEquilibrium", "build_mixed", "root_fn", "STOP_NOW",
    "PathConfig", "PathOutcome", "NEVER_STOPPED",
    "belief_step", "simulate_path", "simulate_path_with_trace", "simulate_batch",
    "PayoffEstimate", "estimate_account_cost", "estimate_fraud_payoff_interim",
    "estimate_fraud_payoff_exante", "deviation_sweep_stopper",
    "deviation_sweep_fraud", "equilibrium_stopper",
    "CheckResult", "VerifyReport", "residual_suite", "hjb_scan", "inequality_scan",
]
