"""Closed-form pure Nash equilibrium (threshold stopping, M <= M_hat).

The stopper deactivates at the first time the belief P reaches

    b = M pi sqrt(r) / (sqrt(pi) + 2 M sqrt(r)),

which lies in (0, pi/4], with b = pi/4 exactly at M = M_hat.  Below the
threshold the fraudster's value v solves the nonlinear ODE

    v'' / (2 v') - 1/(1-p) - r v v' = 0,

whose solution is pinned down by v(b) = 0 and v(0+) = infinity:

    Psi(sqrt(2r) v(p)) = (1-b) p / (2 b (1-p)).

The survival form above is the one actually evaluated: the cdf form
loses every digit once p drops below ~1e-6.  The account holder's value
is

    u(p) = p v(p) + M sqrt(2*pi) (1-p)/(1-b) F(sqrt(2r) v(p)),   p < b,

with u = M above the threshold, and the equilibrium fraud rate is
lambda*(p) = -1/(p (1-p) v'(p)) below b, extended continuously by
2 b sqrt(r) / (p sqrt(pi)) above.  On (0, b) the rate collapses to
sqrt(2r) times the Mills ratio at sqrt(2r) v(p), which is how it is
computed here.

Derivatives are shipped analytically; finite differences live in the
verify module as the independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gaussians as g
from .errors import DomainError, RegimeError
from .model import m_hat

__all__ = ["PureEquilibrium", "build_pure"]


def _as_belief(p, lo: float = 0.0, hi: float = 1.0, name: str = "p"):
    arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= lo) or np.any(arr >= hi):
        raise DomainError(f"{name} must lie in ({lo}, {hi}), got {p!r}")
    return arr


def _maybe_scalar(out, p):
    return float(out) if np.ndim(p) == 0 else out


@dataclass(frozen=True)
class PureEquilibrium:
    """Threshold b plus evaluators for v, u, lambda* and exact derivatives."""

    r: float
    M: float
    b: float
    m_hat: float

    # -- fraudster value -----------------------------------------------------

    def v(self, p):
        """Interim equilibrium value of the fraudster; zero at and above b."""
        arr = _as_belief(p)
        s2r = math.sqrt(2.0 * self.r)
        out = np.zeros_like(arr)
        below = arr < self.b
        pb = arr[below]
        q = (1.0 - self.b) * pb / (2.0 * self.b * (1.0 - pb))
        out[below] = g.survival_quantile(q) / s2r
        return _maybe_scalar(out, p)

    def v_prime(self, p):
        """dv/dp on (0, b), from differentiating the survival form."""
        arr = _as_belief(p, hi=self.b)
        s2r = math.sqrt(2.0 * self.r)
        y = s2r * np.asarray(self.v(arr))
        dens = g.pdf(y)
        out = -(1.0 - self.b) / (2.0 * self.b * s2r * np.square(1.0 - arr) * dens)
        return _maybe_scalar(out, p)

    # -- account holder value --------------------------------------------------

    def u(self, p):
        """Equilibrium expected cost of the account holder; M at and above b."""
        arr = _as_belief(p)
        out = np.full_like(arr, self.M)
        below = arr < self.b
        pb = arr[below]
        vv = np.asarray(self.v(pb))
        y = math.sqrt(2.0 * self.r) * vv
        out[below] = pb * vv + self.M * g.SQRT_2PI * (1.0 - pb) / (1.0 - self.b) * g.mills_F(y)
        return _maybe_scalar(out, p)

    def u_prime(self, p):
        """du/dp on (0, b); tends to zero at b- by smooth fit."""
        arr = _as_belief(p, hi=self.b)
        s2r = math.sqrt(2.0 * self.r)
        vv = np.asarray(self.v(arr))
        vp = np.asarray(self.v_prime(arr))
        y = s2r * vv
        coef = self.M * g.SQRT_2PI / (1.0 - self.b)
        out = vv + arr * vp - coef * (g.mills_F(y) + (1.0 - arr) * g.sf(y) * s2r * vp)
        return _maybe_scalar(out, p)

    # -- equilibrium fraud rate -----------------------------------------------

    def lambda_star(self, p):
        """Equilibrium fraud intensity; continuous across b and positive."""
        arr = _as_belief(p)
        s2r = math.sqrt(2.0 * self.r)
        out = np.empty_like(arr)
        below = arr < self.b
        y = s2r * np.asarray(self.v(arr[below]))
        out[below] = s2r * g.mills_ratio(y)
        out[~below] = 2.0 * self.b * math.sqrt(self.r) / (arr[~below] * math.sqrt(math.pi))
        return _maybe_scalar(out, p)


def build_pure(r: float, M: float) -> PureEquilibrium:
    """Construct the pure equilibrium; requires M <= m_hat(r)."""
    boundary = m_hat(r)
    if not (math.isfinite(M) and M > 0.0):
        raise DomainError(f"stopping cost M must be positive, got {M!r}")
    if M > boundary:
        raise RegimeError(
            f"M={M!r} exceeds the pure-regime bound m_hat={boundary!r}; "
            "use the mixed (randomized stopping) equilibrium"
        )
    sr = math.sqrt(r)
    b = M * math.pi * sr / (math.sqrt(math.pi) + 2.0 * M * sr)
    return PureEquilibrium(r=r, M=M, b=b, m_hat=boundary)
