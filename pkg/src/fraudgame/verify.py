"""Analytic verification of the closed-form equilibria.

Every check reduces to a single number `value` that passes iff
value <= tolerance: residuals are absolute, ordering checks report a
signed margin (negative is good), bounds report the worst violation.
Second derivatives come from fourth-order central finite differences so
the checks do not reuse the analytic derivative being verified; first
derivatives use the analytic evaluators (their own consistency against
finite differences is asserted in the test suite).

Failures are reported, never raised: the report is a diagnostic surface
and the caller decides what a failure means (the CLI turns it into a
nonzero exit code).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import gaussians as g
from .errors import DomainError
from .mixed import MixedEquilibrium, build_mixed, root_fn
from .model import m_hat
from .pure import PureEquilibrium

__all__ = ["CheckResult", "VerifyReport", "residual_suite", "hjb_scan", "inequality_scan"]


@dataclass(frozen=True)
class CheckResult:
    """One named check: passes iff value <= tolerance."""

    name: str
    value: float
    tolerance: float
    passed: bool
    grid: str


def _check(name: str, value: float, tolerance: float, grid: str) -> CheckResult:
    value = float(value)
    return CheckResult(name=name, value=value, tolerance=tolerance,
                       passed=bool(value <= tolerance), grid=grid)


@dataclass(frozen=True)
class VerifyReport:
    regime: str
    r: float
    M: float
    checks: tuple

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def names(self) -> list[str]:
        return [c.name for c in self.checks]

    def entry(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> str:
        payload = {
            "regime": self.regime,
            "r": self.r,
            "M": self.M,
            "passed": self.all_passed,
            "checks": [
                {
                    "name": c.name,
                    "value": c.value,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                    "grid": c.grid,
                }
                for c in self.checks
            ],
        }
        return json.dumps(payload, indent=2)

    def format_table(self) -> str:
        width = max(len(c.name) for c in self.checks)
        lines = [f"verification report ({self.regime} regime, r={self.r:g}, M={self.M:g})"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(
                f"  {status}  {c.name:<{width}}  value={c.value: .3e}"
                f"  tol={c.tolerance: .1e}  [{c.grid}]"
            )
        lines.append("  => " + ("ALL PASS" if self.all_passed else "FAILURES PRESENT"))
        return "\n".join(lines)


def _fd_second(f: Callable, p: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central difference for the second derivative.

    Values are centered on f(p) before differencing (exact, the stencil
    weights sum to zero), which keeps the rounding floor proportional to
    the local variation of f instead of its absolute size."""
    fp = f(p)
    return (-(f(p + 2 * h) - fp) + 16 * (f(p + h) - fp)
            + 16 * (f(p - h) - fp) - (f(p - 2 * h) - fp)) / (12.0 * h * h)


def _fd_first(f: Callable, p: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central difference for the first derivative."""
    return (-f(p + 2 * h) + 8 * f(p + h) - 8 * f(p - h) + f(p - 2 * h)) / (12.0 * h)


def _hjb_expression(eq, p: np.ndarray, lam_dev: np.ndarray, upp_is_fd: bool = True):
    """Left side of the fraudster's variational inequality on (0, b).

    lam_dev broadcasts against p; the expression is linear in the
    deviation rate with slope lambda* p (1-p) v' + 1, which vanishes at
    the equilibrium by the first-order condition.  v'' is differenced
    from the analytic v' (itself checked against v elsewhere): the
    1e-8 pass level leaves no room for the evaluation noise a direct
    second difference of v would pick up.
    """
    span = eq.b - 0.02
    h = 2e-5 * span  # v''''' blows up toward p = 0; keep edge truncation << 1e-8
    v = np.asarray(eq.v(p))
    vp = np.asarray(eq.v_prime(p))
    vpp = _fd_first(lambda x: np.asarray(eq.v_prime(x)), p, h)
    lam_star = np.asarray(eq.lambda_star(p))
    quad = lam_star ** 2 * p * p * (1.0 - p)
    base = 0.5 * quad * (1.0 - p) * vpp - quad * vp - eq.r * v
    slope = lam_star * p * (1.0 - p) * vp + 1.0
    return base + lam_dev * slope


def hjb_scan(eq, p_grid: Optional[np.ndarray] = None,
             lambda_grid: Optional[np.ndarray] = None) -> list[CheckResult]:
    """Scan the variational inequality over deviation rates in [0, 100].

    Returns two entries: the maximum of the expression over the grid
    (must not exceed ~0) and its value at the equilibrium rate (must
    vanish)."""
    if p_grid is None:
        p_grid = np.linspace(0.01, eq.b - 0.01, 400)
    if lambda_grid is None:
        lambda_grid = np.linspace(0.0, 100.0, 201)
    lam_max = float(np.max(lambda_grid))
    if lam_max < 100.0:
        raise DomainError(f"lambda_grid must reach at least 100, got max {lam_max!r}")
    p = np.asarray(p_grid, dtype=float)
    grid_note = f"p in [{p[0]:.4g}, {p[-1]:.4g}] x lambda in [0, {lam_max:g}]"
    expr = _hjb_expression(eq, p[None, :], np.asarray(lambda_grid)[:, None])
    at_star = _hjb_expression(eq, p, np.asarray(eq.lambda_star(p)))
    return [
        _check("hjb_scan_max", np.max(expr), 1e-8, grid_note),
        _check("hjb_equality_at_lambda_star", np.max(np.abs(at_star)), 1e-8,
               f"p in [{p[0]:.4g}, {p[-1]:.4g}], lambda = lambda*(p)"),
    ]


def _common_checks(eq, grid_size: int) -> list[CheckResult]:
    """Checks shared by both regimes on the continuation region (0, b)."""
    r = eq.r
    lo, hi = 0.01, eq.b - 0.01
    p = np.linspace(lo, hi, grid_size)
    span = hi - lo
    h = 1e-4 * span
    note = f"{grid_size} points on [{lo:.4g}, {hi:.4g}]"

    v = np.asarray(eq.v(p))
    vp = np.asarray(eq.v_prime(p))
    lam = np.asarray(eq.lambda_star(p))
    u = np.asarray(eq.u(p))

    checks = [
        _check("first_order_condition",
               np.max(np.abs(lam * p * (1.0 - p) * vp + 1.0)), 1e-10, note),
    ]

    vpp = _fd_second(lambda x: np.asarray(eq.v(x)), p, h)
    checks.append(_check(
        "fraudster_ode",
        np.max(np.abs(vpp / (2.0 * vp) - 1.0 / (1.0 - p) - r * v * vp)),
        1e-6, note))

    upp = _fd_second(lambda x: np.asarray(eq.u(x)), p, h)
    checks.append(_check(
        "account_ode",
        np.max(np.abs(0.5 * lam ** 2 * p * p * np.square(1.0 - p) * upp - r * u + p * lam)),
        1e-6, note))

    checks.extend(hjb_scan(eq))

    checks.append(_check("v_decreasing", np.max(vp), 0.0, note))
    checks.append(_check("u_concave", np.max(upp), 0.0, note))

    p_full = np.linspace(1e-4, 1.0 - 1e-4, grid_size)
    checks.append(_check(
        "u_below_cost", np.max(np.asarray(eq.u(p_full))) - eq.M, 1e-12,
        f"{grid_size} points on (0, 1)"))

    checks.append(_check(
        "smooth_fit", abs(float(eq.u_prime(eq.b * (1.0 - 1e-10)))), 1e-8,
        "u'(b-) at p = b(1 - 1e-10)"))
    checks.append(_check(
        "boundary_value_at_b", abs(float(eq.u(eq.b)) - eq.M), 0.0, "u(b) = M"))
    return checks


def _pure_checks(eq: PureEquilibrium, grid_size: int) -> list[CheckResult]:
    checks = _common_checks(eq, grid_size)
    slack = -eq.r * eq.M + 2.0 * eq.b * math.sqrt(eq.r) / math.sqrt(math.pi)
    checks.append(_check(
        "stopping_region_slack", -slack, 1e-12,
        "-rM + 2 b sqrt(r)/sqrt(pi) >= 0 above b"))
    return checks


def _mixed_checks(eq: MixedEquilibrium, grid_size: int) -> list[CheckResult]:
    r, M = eq.r, eq.M
    checks = [
        _check("root_residual", abs(float(root_fn(r, M, eq.v_b))), 1e-10,
               "scalar equation at v_b"),
    ]
    checks.append(_check("root_in_range", max(-eq.v_b, eq.v_b - M / 2.0), 0.0,
                         "v_b in (0, M/2)"))
    checks.append(_check("boundaries_ordered",
                         max(eq.b - eq.a, -eq.one_minus_a, -eq.b), 0.0,
                         "0 < b < a < 1 (via the complement of a)"))

    v_left = float(eq.v(eq.b))
    v_right = math.log((1.0 - eq.b) / (1.0 - eq.a)) / (r * M)
    checks.append(_check(
        "v_continuity_b", max(abs(v_left - eq.v_b), abs(v_right - eq.v_b)), 1e-10,
        "both branches at p = b"))
    checks.append(_check("v_zero_at_a", abs(float(eq.v(eq.a))), 1e-12, "v(a) = 0"))

    vp_left = float(eq.v_prime(eq.b))
    vp_right = -1.0 / (r * M * (1.0 - eq.b))
    checks.append(_check("vp_continuity_b", abs(vp_left - vp_right), 1e-8,
                         "v'(b-) vs -1/(rM(1-b))"))

    checks.extend(_common_checks(eq, grid_size))

    # nonlinear ODE with the stopping intensity on the randomized band.
    # The band is ~0.02 wide; the default 1e-4-of-span step drowns the
    # fourth-order stencil in rounding noise, so use 2% of the span.
    lo, hi = eq.b + 1e-3, eq.a - 1e-3
    pm = np.linspace(lo, hi, grid_size)
    h = 0.02 * (hi - lo)
    beta = np.asarray(eq.beta(pm))
    v_mid = np.asarray(eq.v(pm))
    vp_mid = -1.0 / (r * M * (1.0 - pm))
    vpp_fd = _fd_second(lambda x: np.asarray(eq.v(x)), pm, h)
    nonlin = vpp_fd / (2.0 * vp_mid) - r * v_mid * vp_mid - beta * v_mid * vp_mid \
        - 1.0 / (1.0 - pm)
    checks.append(_check(
        "nonlinear_ode_with_intensity", np.max(np.abs(nonlin)), 1e-6,
        f"{grid_size} points on [b+1e-3, a-1e-3], h = 2% of span"))

    checks.append(_check(
        "indifference", np.max(np.abs(-r * M + pm * np.asarray(eq.lambda_star(pm)))),
        1e-12, "r M = p lambda*(p) on (b, a)"))
    checks.append(_check("beta_positive", -np.min(beta), 0.0, "beta > 0 on (b, a)"))
    checks.append(_check("beta_nondecreasing", np.max(beta[:-1] - beta[1:]), 1e-12,
                         "beta monotone on (b, a)"))

    pa = np.linspace(eq.b, 1.0 - 1e-6, grid_size)
    checks.append(_check(
        "u_constant_above_b", np.max(np.abs(np.asarray(eq.u(pa)) - M)), 0.0,
        f"{grid_size} points on [b, 1)"))

    worst_b = -np.inf
    for r_sweep in (0.01, 0.05, 0.5):
        bound = m_hat(r_sweep)
        for mult in np.linspace(1.001, 10.0, 100):
            worst_b = max(worst_b, build_mixed(r_sweep, mult * bound).b)
    checks.append(_check(
        "b_below_one_sweep", worst_b - 1.0, 0.0,
        "M on (m_hat, 10 m_hat], r in {0.01, 0.05, 0.5}"))
    return checks


def residual_suite(eq, grid_size: int = 1000) -> VerifyReport:
    """Evaluate every equilibrium invariant on uniform grids."""
    if grid_size < 100:
        raise DomainError(f"grid_size must be >= 100, got {grid_size!r}")
    if isinstance(eq, PureEquilibrium):
        return VerifyReport(regime="pure", r=eq.r, M=eq.M,
                            checks=tuple(_pure_checks(eq, grid_size)))
    if isinstance(eq, MixedEquilibrium):
        return VerifyReport(regime="mixed", r=eq.r, M=eq.M,
                            checks=tuple(_mixed_checks(eq, grid_size)))
    raise DomainError(f"unknown equilibrium object {eq!r}")


def inequality_scan() -> list[CheckResult]:
    """Special-function inequalities underpinning the construction."""
    z = np.linspace(1e-3, 10.0, 10_000)
    dens = g.pdf(z)
    surv = np.asarray(g.sf(z))
    ratio = dens / surv
    note = "1e4 points on (0, 10]"

    checks = [
        _check("mills_inequality",
               1.0 - np.min(2.0 * ratio ** 2 - 3.0 * z * ratio + z * z), 0.0, note),
        _check("pdf_bound", np.max(z * dens - (1.0 + z * z) * surv), 0.0, note),
        _check("survival_bound", np.max(z * surv - dens), 0.0, note),
    ]

    x = np.linspace(2.0, 8.0, 2000)
    feller = g.pdf(x) / (np.sqrt(np.log(1.0 / np.asarray(g.sf(x)))) * np.asarray(g.sf(x)))
    checks.append(_check("feller_ratio_bounded", np.max(feller), 10.0,
                         "phi/(sqrt(ln(1/Psi)) Psi) on [2, 8], B = 2"))

    y = np.linspace(0.0, 40.0, 4001)
    Fy = np.asarray(g.mills_F(y))
    checks.append(_check("F_nonnegative", -np.min(Fy), 0.0, "y in [0, 40]"))
    checks.append(_check("F_limit_zero", float(g.mills_F(40.0)), 1e-12, "F(40)"))
    checks.append(_check(
        "F_at_origin", abs(float(g.mills_F(0.0)) - 1.0 / g.SQRT_2PI), 1e-12, "F(0)"))
    slope = (float(g.mills_F(1e-5)) - float(g.mills_F(0.0))) / 1e-5
    checks.append(_check("F_slope_at_origin", abs(slope + 0.5), 1e-4,
                         "forward difference at step 1e-5"))
    return checks
