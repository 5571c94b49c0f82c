"""Mixed-stopping Nash equilibrium (randomized stopping, M > M_hat).

The construction reduces to a scalar root problem: v_b := v(b) solves

    sqrt(2r) (M - z) F(sqrt(2r) z) - Psi(sqrt(2r) z) = 0,

which has a unique root in (0, M/2) whenever M > M_hat (the left side is
positive at 0, strictly decreasing up to M/2 and negative at M).  The
boundaries follow in closed form:

    b = sqrt(r) M Psi(sqrt(2r) v_b) / (sqrt(2) phi(sqrt(2r) v_b)),
    a = 1 - (1 - b) exp(-r M v_b),

with b < a < 1.  The value functions are piecewise:

    v(p) = Psi^{-1}-form on (0, b]   (survival identity with Psi_b scale),
         = ln((1-p)/(1-a)) / (r M) on (b, a],
         = 0 above a,

    u(p) = p v(p) + (M - b v_b) (1-p) F(sqrt(2r) v(p)) / ((1-b) F(sqrt(2r) v_b))
           on (0, b], and u = M above b.

The middle branch of v is written with denominator (1-a): that is the
only form compatible with both v(a) = 0 and continuity at b (equivalently
with the definition of a above).  The stopping intensity is

    beta(p) = 0 on (0, b],  r M / (2 v(p)) - r on (b, a),  STOP_NOW above,

where STOP_NOW is a symbolic marker (the simulator stops outright at
p >= a instead of feeding an infinity into the clock integral).  The
fraud rate is lambda*(p) = sqrt(2r) * Mills(sqrt(2r) v(p)) on (0, b] and
r M / p above b, which makes the stopper exactly indifferent there:
p lambda*(p) = r M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gaussians as g
from .errors import DomainError, RegimeError
from .model import m_hat

__all__ = ["MixedEquilibrium", "build_mixed", "root_fn", "STOP_NOW"]

# Symbolic "stop immediately" intensity returned by beta for p >= a.
STOP_NOW = float("inf")

_BISECT_MAX_ITER = 200


def root_fn(r: float, M: float, z):
    """Left side of the scalar equation determining v(b)."""
    z_arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z_arr)):
        raise DomainError(f"z must be finite, got {z!r}")
    s2r = math.sqrt(2.0 * r)
    y = s2r * z_arr
    out = s2r * (M - z_arr) * g.mills_F(y) - g.sf(y)
    return float(out) if np.ndim(z) == 0 else out


def _as_belief(p, lo: float = 0.0, hi: float = 1.0, name: str = "p"):
    arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= lo) or np.any(arr >= hi):
        raise DomainError(f"{name} must lie in ({lo}, {hi}), got {p!r}")
    return arr


def _maybe_scalar(out, p):
    return float(out) if np.ndim(p) == 0 else out


@dataclass(frozen=True)
class MixedEquilibrium:
    """Root v_b, boundaries b < a, and evaluators for v, u, beta, lambda*.

    The upper boundary is carried as its complement one_minus_a =
    (1-b) exp(-r M v_b): for large M the boundary sits within a few
    ulps of 1 and the complement is the only form that keeps the middle
    branch of v computable.  a itself is stored for display."""

    r: float
    M: float
    v_b: float
    b: float
    a: float
    one_minus_a: float
    m_hat: float
    # cached values at the lower boundary
    y_b: float
    psi_b: float
    phi_b: float
    F_b: float

    # -- fraudster value -----------------------------------------------------

    def v(self, p):
        arr = _as_belief(p)
        s2r = math.sqrt(2.0 * self.r)
        out = np.zeros_like(arr)
        low = arr <= self.b
        # arr < a guards the ulp where 1 - a exceeds the stored complement
        mid = (~low) & (arr < self.a) & (1.0 - arr >= self.one_minus_a)
        pl = arr[low]
        q = (1.0 - self.b) * pl / (self.b * (1.0 - pl)) * self.psi_b
        out[low] = g.survival_quantile(q) / s2r
        out[mid] = np.log((1.0 - arr[mid]) / self.one_minus_a) / (self.r * self.M)
        return _maybe_scalar(out, p)

    def v_prime(self, p):
        """dv/dp on (0, a); the two branches agree at b by construction."""
        arr = _as_belief(p, hi=self.a)
        s2r = math.sqrt(2.0 * self.r)
        out = np.empty_like(arr)
        low = arr <= self.b
        pl = arr[low]
        y = s2r * np.asarray(self.v(pl))
        out[low] = -(1.0 - self.b) * self.psi_b / (
            self.b * s2r * np.square(1.0 - pl) * g.pdf(y)
        )
        out[~low] = -1.0 / (self.r * self.M * (1.0 - arr[~low]))
        return _maybe_scalar(out, p)

    # -- account holder value --------------------------------------------------

    def u(self, p):
        arr = _as_belief(p)
        out = np.full_like(arr, self.M)
        low = arr <= self.b
        pl = arr[low]
        vv = np.asarray(self.v(pl))
        y = math.sqrt(2.0 * self.r) * vv
        coef = (self.M - self.b * self.v_b) / ((1.0 - self.b) * self.F_b)
        out[low] = pl * vv + coef * (1.0 - pl) * g.mills_F(y)
        return _maybe_scalar(out, p)

    def u_prime(self, p):
        """du/dp on (0, b); tends to zero at b- by smooth fit."""
        arr = _as_belief(p, hi=self.b)
        s2r = math.sqrt(2.0 * self.r)
        vv = np.asarray(self.v(arr))
        vp = np.asarray(self.v_prime(arr))
        y = s2r * vv
        coef = (self.M - self.b * self.v_b) / ((1.0 - self.b) * self.F_b)
        out = vv + arr * vp - coef * (g.mills_F(y) + (1.0 - arr) * g.sf(y) * s2r * vp)
        return _maybe_scalar(out, p)

    # -- stopping intensity -----------------------------------------------------

    def beta(self, p):
        """Randomized stopping intensity; STOP_NOW marks the sure-stop region."""
        arr = _as_belief(p)
        out = np.zeros_like(arr)
        mid = (arr > self.b) & (arr < self.a) & (1.0 - arr > self.one_minus_a)
        out[mid] = self.r * self.M / (2.0 * np.asarray(self.v(arr[mid]))) - self.r
        out[(~mid) & (arr > self.b)] = STOP_NOW
        return _maybe_scalar(out, p)

    # -- equilibrium fraud rate -----------------------------------------------

    def lambda_star(self, p):
        arr = _as_belief(p)
        s2r = math.sqrt(2.0 * self.r)
        out = np.empty_like(arr)
        low = arr <= self.b
        y = s2r * np.asarray(self.v(arr[low]))
        out[low] = s2r * g.mills_ratio(y)
        out[~low] = self.r * self.M / arr[~low]
        return _maybe_scalar(out, p)


def build_mixed(r: float, M: float, tol: float = 1e-12) -> MixedEquilibrium:
    """Solve for v(b) by bisection on (0, M/2) and assemble the equilibrium.

    Monotonicity of the root function on (0, M/2) makes plain bisection
    both sufficient and bullet-proof; tol bounds the final bracket width.
    """
    boundary = m_hat(r)
    if not (math.isfinite(M) and M > 0.0):
        raise DomainError(f"stopping cost M must be positive, got {M!r}")
    if M <= boundary:
        raise RegimeError(
            f"M={M!r} is at or below the bound m_hat={boundary!r}; "
            "use the pure (threshold) equilibrium"
        )
    if not (0.0 < tol <= 1e-10):
        raise DomainError(f"tol must lie in (0, 1e-10], got {tol!r}")

    lo, hi = 0.0, M / 2.0
    if not (root_fn(r, M, lo) > 0.0 and root_fn(r, M, hi) < 0.0):
        raise RuntimeError("root bracket failed; should not happen for M > m_hat")
    for _ in range(_BISECT_MAX_ITER):
        midpoint = 0.5 * (lo + hi)
        if root_fn(r, M, midpoint) > 0.0:
            lo = midpoint
        else:
            hi = midpoint
        if hi - lo <= tol:
            break
    v_b = 0.5 * (lo + hi)

    s2r = math.sqrt(2.0 * r)
    y_b = s2r * v_b
    psi_b = float(g.sf(y_b))
    phi_b = float(g.pdf(y_b))
    F_b = float(g.mills_F(y_b))
    b = math.sqrt(r) * M * psi_b / (math.sqrt(2.0) * phi_b)
    one_minus_a = (1.0 - b) * math.exp(-r * M * v_b)
    if not (0.0 < b < 1.0 and 0.0 < one_minus_a < 1.0 - b):
        raise RuntimeError(f"boundary ordering violated: b={b!r}, 1-a={one_minus_a!r}")
    return MixedEquilibrium(
        r=r, M=M, v_b=v_b, b=b, a=1.0 - one_minus_a, one_minus_a=one_minus_a,
        m_hat=boundary, y_b=y_b, psi_b=psi_b, phi_b=phi_b, F_b=F_b,
    )
