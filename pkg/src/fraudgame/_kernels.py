"""Compiled per-path simulation kernels.

Everything here is numba-compiled and deterministic.  Randomness is
counter-based: each path owns a Philox4x32-10 key derived from
(seed, path_index) by two rounds of splitmix64, and every draw is
addressed by a (step, purpose) counter rather than by consuming a
stream.  Purposes: 0 = the per-step Gaussian increments, 1 = the Exp(1)
clock of a randomized stopper, 2 = the Bernoulli draw of the hidden
state.  A path's outcome is therefore a pure function of
(seed, path_index, model constants), which is what makes batch runs
bit-identical to one-path-at-a-time runs regardless of scheduling.

Uniforms are built from 53 bits of Philox output shifted into (0, 1);
normals come from the AS241 double-precision inverse cdf, accurate to
~1e-16 (validated against scipy in the test suite).

The per-step model work mirrors the closed forms of the equilibrium
modules.  Below the threshold b the filter intensity is

    lambda*(p) = sqrt(2r) * phi(y) / q,   y = Psi^{-1}(q),

with q = coef_q * p/(1-p); the regime only changes coef_q and the
above-threshold rule lambda*(p) = a_hi / p (pure: a_hi = 2 b sqrt(r)
/ sqrt(pi), mixed: a_hi = r M).  Coefficients are cached while the
belief is pinned at a clamp, which is where frozen no-fraud paths
spend most of a long horizon.
"""

import math

import numpy as np
from numba import njit, prange

U64 = np.uint64
MASK32 = U64(0xFFFFFFFF)
_GOLDEN = U64(0x9E3779B97F4A7C15)
_INV53 = 1.0 / 9007199254740992.0
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# fraud strategy codes
FRAUD_EQUILIBRIUM = 0
FRAUD_CONSTANT = 1
FRAUD_SCALED = 2
FRAUD_NULL = 3

# stopper strategy codes
STOP_THRESHOLD = 0
STOP_INTENSITY = 1
STOP_IMMEDIATE = 2
STOP_NEVER = 3

# theta modes
THETA_FIXED0 = 0
THETA_FIXED1 = 1
THETA_PRIOR = 2


@njit(cache=True, inline="always")
def _splitmix64(x):
    z = x + _GOLDEN
    z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def _path_key(seed, path_index):
    return _splitmix64(_splitmix64(seed) ^ (path_index * _GOLDEN + U64(1)))


@njit(cache=True, inline="always")
def _philox4x32(c0, c1, c2, c3, k0, k1):
    # 10 rounds; all lanes are 32-bit values carried in uint64.
    M0 = U64(0xD2511F53)
    M1 = U64(0xCD9E8D57)
    W0 = U64(0x9E3779B9)
    W1 = U64(0xBB67AE85)
    for _ in range(10):
        p0 = M0 * c0
        p1 = M1 * c2
        n0 = (p1 >> U64(32)) ^ c1 ^ k0
        n2 = (p0 >> U64(32)) ^ c3 ^ k1
        c0 = n0
        c1 = p1 & MASK32
        c2 = n2
        c3 = p0 & MASK32
        k0 = (k0 + W0) & MASK32
        k1 = (k1 + W1) & MASK32
    return c0, c1, c2, c3


@njit(cache=True, inline="always")
def _uniform53(a, b):
    # 27 + 26 bits -> (0, 1), shifted half a ulp off the endpoints
    return ((a >> U64(5)) * 67108864.0 + (b >> U64(6)) + 0.5) * _INV53


@njit(cache=True, inline="always")
def _uniform_at(k0, k1, step, purpose):
    x0, x1, _, _ = _philox4x32(step & MASK32, step >> U64(32), purpose, U64(0), k0, k1)
    return _uniform53(x0, x1)


@njit(cache=True, inline="always")
def _ppnd16(u):
    # AS241 PPND16: double-precision inverse of the standard normal cdf.
    q = u - 0.5
    if abs(q) <= 0.425:
        s = 0.180625 - q * q
        num = (((((((2.5090809287301226727e3 * s + 3.3430575583588128105e4) * s
            + 6.7265770927008700853e4) * s + 4.5921953931549871457e4) * s
            + 1.3731693765509461125e4) * s + 1.9715909503065514427e3) * s
            + 1.3314166789178437745e2) * s + 3.3871328727963666080e0)
        den = (((((((5.2264952788528545610e3 * s + 2.8729085735721942674e4) * s
            + 3.9307895800092710610e4) * s + 2.1213794301586595867e4) * s
            + 5.3941960214247511077e3) * s + 6.8718700749205790830e2) * s
            + 4.2313330701600911252e1) * s + 1.0)
        return q * num / den
    if q < 0.0:
        s = u
    else:
        s = 1.0 - u
    s = math.sqrt(-math.log(s))
    if s <= 5.0:
        s = s - 1.6
        num = (((((((7.74545014278341407640e-4 * s + 2.27238449892691845833e-2) * s
            + 2.41780725177450611770e-1) * s + 1.27045825245236838258e0) * s
            + 3.64784832476320460504e0) * s + 5.76949722146069140550e0) * s
            + 4.63033784615654529590e0) * s + 1.42343711074968357734e0)
        den = (((((((1.05075007164441684324e-9 * s + 5.47593808499534494600e-4) * s
            + 1.51986665636164571966e-2) * s + 1.48103976427480074590e-1) * s
            + 6.89767334985100004550e-1) * s + 1.67638483018380384940e0) * s
            + 2.05319162663775882187e0) * s + 1.0)
    else:
        s = s - 5.0
        num = (((((((2.01033439929228813265e-7 * s + 2.71155556874348757815e-5) * s
            + 1.24266094738807843860e-3) * s + 2.65321895265761230930e-2) * s
            + 2.96560571828504891230e-1) * s + 1.78482653991729133580e0) * s
            + 5.46378491116411436990e0) * s + 6.65790464350110377720e0)
        den = (((((((2.04426310338993978564e-15 * s + 1.42151175831644588870e-7) * s
            + 1.84631831751005468180e-5) * s + 7.86869131145613259100e-4) * s
            + 1.48753612908506148525e-2) * s + 1.36929880922735805310e-1) * s
            + 5.99832206555887937690e-1) * s + 1.0)
    x = num / den
    if q < 0.0:
        x = -x
    return x


@njit(cache=True)
def normal_at(seed, path_index, step):
    """The Gaussian increment a path consumes at a given step (test hook)."""
    k = _path_key(seed, path_index)
    return _ppnd16(_uniform_at(k & MASK32, (k >> U64(32)) & MASK32, U64(step), U64(0)))


@njit(cache=True)
def theta_at(seed, path_index, p_theta):
    """The Bernoulli(p_theta) hidden-state draw of a path (test hook)."""
    k = _path_key(seed, path_index)
    u = _uniform_at(k & MASK32, (k >> U64(32)) & MASK32, U64(0), U64(2))
    return 1 if u < p_theta else 0


@njit(cache=True)
def exp_clock_at(seed, path_index):
    """The Exp(1) randomization level of a path (test hook)."""
    k = _path_key(seed, path_index)
    return -math.log(_uniform_at(k & MASK32, (k >> U64(32)) & MASK32, U64(0), U64(1)))


@njit(cache=True, inline="always")
def _lam_sig(p, b, coef_q, a_hi, sqrt2r):
    # filter intensity lambda*(p) and diffusion coefficient lambda* p (1-p)
    if p < b:
        q = coef_q * p / (1.0 - p)
        y = -_ppnd16(q)
        lam = sqrt2r * math.exp(-0.5 * y * y) * _INV_SQRT_2PI / q
    else:
        lam = a_hi / p
    return lam, lam * p * (1.0 - p)


@njit(cache=True)
def belief_step(p, theta, fraud_rate, dt, z, b, coef_q, a_hi, sqrt2r,
                clamp_lo, clamp_hi):
    """One Euler update of the belief, clamped to [clamp_lo, clamp_hi]."""
    lam, sig = _lam_sig(p, b, coef_q, a_hi, sqrt2r)
    rate = fraud_rate if theta == 1 else 0.0
    pn = p + sig * (rate - lam * p) * dt - sig * math.sqrt(dt) * z
    if pn < clamp_lo:
        pn = clamp_lo
    elif pn > clamp_hi:
        pn = clamp_hi
    return pn


@njit(cache=True)
def run_path(seed, path_index, theta_mode, p_theta,
             b, one_minus_a, coef_q, a_hi, r, M,
             fraud_kind, fraud_param, stopper_kind, stopper_param,
             p0, dt, n_steps, clamp_lo, clamp_hi):
    """Simulate one path on the time grid 0, dt, ..., n_steps*dt.

    At every grid time the stopper is checked first, then theft and the
    stopping clock accrue over the coming step and the belief advances.
    Returns (theta, stop_step, theft, discount, final_belief, touched_lo)
    with stop_step = -1 when the horizon truncates the path; discount is
    exp(-r t) at the stop time (or at the horizon if unstopped).
    """
    k = _path_key(seed, path_index)
    k0 = k & MASK32
    k1 = (k >> U64(32)) & MASK32

    if theta_mode == THETA_PRIOR:
        theta = 1 if _uniform_at(k0, k1, U64(0), U64(2)) < p_theta else 0
    else:
        theta = theta_mode

    clock = 0.0
    if stopper_kind == STOP_INTENSITY:
        clock = -math.log(_uniform_at(k0, k1, U64(0), U64(1)))

    sqrt2r = math.sqrt(2.0 * r)
    sqrt_dt = math.sqrt(dt)
    edt = math.exp(-r * dt)
    rm = r * M

    p = p0
    disc = 1.0
    theft = 0.0
    gamma = 0.0
    touched = False
    p_prev = -1.0
    lam = 0.0
    sig = 0.0

    for i in range(n_steps + 1):
        # stop checks at grid time i*dt
        if stopper_kind == STOP_THRESHOLD:
            if p >= stopper_param:
                return theta, i, theft, disc, p, touched
        elif stopper_kind == STOP_INTENSITY:
            if 1.0 - p <= one_minus_a or gamma > clock:
                return theta, i, theft, disc, p, touched
        elif stopper_kind == STOP_IMMEDIATE:
            return theta, i, theft, disc, p, touched
        if i == n_steps:
            break

        if p != p_prev:
            lam, sig = _lam_sig(p, b, coef_q, a_hi, sqrt2r)
            p_prev = p

        rate = 0.0
        if theta == 1:
            if fraud_kind == FRAUD_EQUILIBRIUM:
                rate = lam
            elif fraud_kind == FRAUD_CONSTANT:
                rate = fraud_param
            elif fraud_kind == FRAUD_SCALED:
                rate = fraud_param * lam
            theft += disc * rate * dt

        if stopper_kind == STOP_INTENSITY and p > b:
            v_mid = math.log((1.0 - p) / one_minus_a) / rm
            gamma += (rm / (2.0 * v_mid) - r) * dt

        st = U64(i)
        x0, x1, _, _ = _philox4x32(st & MASK32, st >> U64(32), U64(0), U64(0), k0, k1)
        z = _ppnd16(_uniform53(x0, x1))
        pn = p + sig * (rate - lam * p) * dt - sig * sqrt_dt * z
        if pn < clamp_lo:
            pn = clamp_lo
            touched = True
        elif pn > clamp_hi:
            pn = clamp_hi
        p = pn
        disc *= edt

    return theta, -1, theft, disc, p, touched


@njit(cache=True)
def run_path_recorded(seed, path_index, theta_mode, p_theta,
                      b, one_minus_a, coef_q, a_hi, r, M,
                      fraud_kind, fraud_param, stopper_kind, stopper_param,
                      p0, dt, n_steps, clamp_lo, clamp_hi,
                      out_t, out_p, out_gamma, out_theft):
    """run_path variant that also records (t, P, Gamma, theft) per grid time.

    The out arrays must hold n_steps + 1 entries; the number of rows
    written is returned alongside the outcome tuple.
    """
    k = _path_key(seed, path_index)
    k0 = k & MASK32
    k1 = (k >> U64(32)) & MASK32

    if theta_mode == THETA_PRIOR:
        theta = 1 if _uniform_at(k0, k1, U64(0), U64(2)) < p_theta else 0
    else:
        theta = theta_mode

    clock = 0.0
    if stopper_kind == STOP_INTENSITY:
        clock = -math.log(_uniform_at(k0, k1, U64(0), U64(1)))

    sqrt2r = math.sqrt(2.0 * r)
    sqrt_dt = math.sqrt(dt)
    edt = math.exp(-r * dt)
    rm = r * M

    p = p0
    disc = 1.0
    theft = 0.0
    gamma = 0.0
    touched = False
    p_prev = -1.0
    lam = 0.0
    sig = 0.0
    rows = 0

    for i in range(n_steps + 1):
        out_t[i] = i * dt
        out_p[i] = p
        out_gamma[i] = gamma
        out_theft[i] = theft
        rows = i + 1
        if stopper_kind == STOP_THRESHOLD:
            if p >= stopper_param:
                return theta, i, theft, disc, p, touched, rows
        elif stopper_kind == STOP_INTENSITY:
            if 1.0 - p <= one_minus_a or gamma > clock:
                return theta, i, theft, disc, p, touched, rows
        elif stopper_kind == STOP_IMMEDIATE:
            return theta, i, theft, disc, p, touched, rows
        if i == n_steps:
            break

        if p != p_prev:
            lam, sig = _lam_sig(p, b, coef_q, a_hi, sqrt2r)
            p_prev = p

        rate = 0.0
        if theta == 1:
            if fraud_kind == FRAUD_EQUILIBRIUM:
                rate = lam
            elif fraud_kind == FRAUD_CONSTANT:
                rate = fraud_param
            elif fraud_kind == FRAUD_SCALED:
                rate = fraud_param * lam
            theft += disc * rate * dt

        if stopper_kind == STOP_INTENSITY and p > b:
            v_mid = math.log((1.0 - p) / one_minus_a) / rm
            gamma += (rm / (2.0 * v_mid) - r) * dt

        st = U64(i)
        x0, x1, _, _ = _philox4x32(st & MASK32, st >> U64(32), U64(0), U64(0), k0, k1)
        z = _ppnd16(_uniform53(x0, x1))
        pn = p + sig * (rate - lam * p) * dt - sig * sqrt_dt * z
        if pn < clamp_lo:
            pn = clamp_lo
            touched = True
        elif pn > clamp_hi:
            pn = clamp_hi
        p = pn
        disc *= edt

    return theta, -1, theft, disc, p, touched, rows


@njit(cache=True, parallel=True)
def run_batch(seed, n_paths, theta_mode, p_theta,
              b, one_minus_a, coef_q, a_hi, r, M,
              fraud_kind, fraud_param, stopper_kind, stopper_param,
              p0, dt, n_steps, clamp_lo, clamp_hi,
              out_theta, out_stop, out_theft, out_disc, out_final, out_touched):
    """Run n_paths independent paths; each writes only its own slot, so the
    result does not depend on the number of worker threads."""
    for idx in prange(n_paths):
        th, ss, tf, dc, fp, tl = run_path(
            seed, U64(idx), theta_mode, p_theta,
            b, one_minus_a, coef_q, a_hi, r, M,
            fraud_kind, fraud_param, stopper_kind, stopper_param,
            p0, dt, n_steps, clamp_lo, clamp_hi,
        )
        out_theta[idx] = th
        out_stop[idx] = ss
        out_theft[idx] = tf
        out_disc[idx] = dc
        out_final[idx] = fp
        out_touched[idx] = tl
