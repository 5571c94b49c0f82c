"""Belief-SDE simulation: single-step drift identities, trivial path
outcomes, counter-based randomness quality, and batch/per-path
bit-equality (worker-count independence)."""

import math

import numpy as np
import pytest
from scipy import special, stats

import fraudgame as fg
from fraudgame import _kernels as K

R = 0.05


@pytest.fixture(scope="module")
def cfg():
    return fg.PathConfig(dt=1e-3, horizon=10.0, seed=123)


class TestPathConfig:
    @pytest.mark.parametrize("kwargs", [
        dict(dt=0.0, horizon=1.0),
        dict(dt=-1e-3, horizon=1.0),
        dict(dt=1e-3, horizon=1e-4),
        dict(dt=1e-3, horizon=1.0, clamp_eps=0.0),
        dict(dt=1e-3, horizon=1.0, clamp_eps=0.02),
    ])
    def test_validation(self, kwargs):
        with pytest.raises(fg.DomainError):
            fg.PathConfig(**kwargs)

    def test_step_count(self):
        assert fg.PathConfig(dt=1e-3, horizon=10.0).n_steps == 10_000


class TestBeliefStep:
    def test_inactive_drift(self, pure_eq):
        p, dt = 0.3, 1e-3
        lam = float(pure_eq.lambda_star(p))
        drift = (fg.belief_step(pure_eq, p, 0, 0.7, dt, 0.0) - p) / dt
        assert drift == pytest.approx(-(lam**2) * p * p * (1 - p), rel=1e-9)

    def test_active_equilibrium_drift(self, pure_eq):
        p, dt = 0.3, 1e-3
        lam = float(pure_eq.lambda_star(p))
        drift = (fg.belief_step(pure_eq, p, 1, lam, dt, 0.0) - p) / dt
        assert drift == pytest.approx(lam**2 * p * (1 - p) ** 2, rel=1e-9)

    def test_active_flat_theft_drift(self, pure_eq):
        # an active fraudster who steals nothing pushes the belief down
        # exactly as the inactive state does
        p, dt = 0.3, 1e-3
        lam = float(pure_eq.lambda_star(p))
        drift = (fg.belief_step(pure_eq, p, 1, 0.0, dt, 0.0) - p) / dt
        assert drift == pytest.approx(-(lam**2) * p * p * (1 - p), rel=1e-9)
        assert drift < 0.0

    def test_general_drift_form(self, mixed_eq):
        p, dt, rate = 0.5, 1e-3, 0.37
        lam = float(mixed_eq.lambda_star(p))
        sig = lam * p * (1 - p)
        drift = (fg.belief_step(mixed_eq, p, 1, rate, dt, 0.0) - p) / dt
        assert drift == pytest.approx(sig * (rate - lam * p), rel=1e-9)

    def test_diffusion_sign(self, pure_eq):
        p, dt = 0.3, 1e-3
        up = fg.belief_step(pure_eq, p, 0, 0.0, dt, -1.0)
        down = fg.belief_step(pure_eq, p, 0, 0.0, dt, 1.0)
        assert up > p > down

    def test_clamping(self, pure_eq):
        assert fg.belief_step(pure_eq, 0.3, 0, 0.0, 1.0, 50.0) == 1e-9
        assert fg.belief_step(pure_eq, 0.3, 1, 200.0, 1.0, -50.0) == 1 - 1e-9
        assert fg.belief_step(pure_eq, 0.3, 0, 0.0, 1.0, 50.0, clamp_eps=1e-4) == 1e-4

    def test_domain_errors(self, pure_eq):
        with pytest.raises(fg.DomainError):
            fg.belief_step(pure_eq, 0.0, 0, 0.0, 1e-3, 0.0)
        with pytest.raises(fg.DomainError):
            fg.belief_step(pure_eq, 0.5, 2, 0.0, 1e-3, 0.0)
        with pytest.raises(fg.DomainError):
            fg.belief_step(pure_eq, 0.5, 0, -1.0, 1e-3, 0.0)


class TestTrivialPaths:
    def test_idle_game(self, pure_params, pure_eq, cfg):
        out = fg.simulate_path(pure_params, pure_eq, fg.NullFraud(), fg.Never(), 0, cfg)
        assert out.discounted_theft == 0.0
        assert out.stop_time == fg.NEVER_STOPPED
        assert out.stop_discount == 0.0
        assert out.truncated

    @pytest.mark.parametrize("theta", [0, 1])
    def test_immediate_stop(self, pure_params, pure_eq, cfg, theta):
        out = fg.simulate_path(pure_params, pure_eq, fg.EquilibriumRate(),
                               fg.Immediate(), theta, cfg)
        assert out.stop_time == 0.0
        assert out.stop_discount == 1.0
        assert out.discounted_theft == 0.0
        assert not out.truncated

    def test_threshold_already_crossed(self, pure_params, pure_eq, cfg):
        out = fg.simulate_path(pure_params, pure_eq, fg.EquilibriumRate(),
                               fg.Threshold(0.25), 1, cfg)
        assert out.stop_time == 0.0
        assert out.discounted_theft == 0.0

    def test_inactive_never_steals(self, pure_params, pure_eq, cfg):
        out = fg.simulate_path(pure_params, pure_eq, fg.ConstantRate(5.0),
                               fg.Never(), 0, cfg)
        assert out.discounted_theft == 0.0

    def test_intensity_requires_mixed(self, pure_params, pure_eq, cfg):
        with pytest.raises(fg.RegimeError):
            fg.simulate_path(pure_params, pure_eq, fg.EquilibriumRate(),
                             fg.RandomizedIntensity(), 1, cfg)


class TestDeterminism:
    def test_same_seed_same_outcome(self, pure_params, pure_eq, cfg):
        args = (pure_params, pure_eq, fg.EquilibriumRate(), fg.Threshold(pure_eq.b), 1, cfg)
        assert fg.simulate_path(*args, path_index=5) == fg.simulate_path(*args, path_index=5)

    def test_paths_differ_by_index(self, pure_params, pure_eq, cfg):
        args = (pure_params, pure_eq, fg.EquilibriumRate(), fg.Never(), 1, cfg)
        a = fg.simulate_path(*args, path_index=0)
        b = fg.simulate_path(*args, path_index=1)
        assert a.final_belief != b.final_belief

    def test_batch_matches_per_path(self, mixed_params, mixed_eq):
        cfg = fg.PathConfig(dt=1e-3, horizon=5.0, seed=99)
        res = fg.simulate_batch(mixed_params, mixed_eq, fg.EquilibriumRate(),
                                fg.RandomizedIntensity(), "prior", 128, cfg)
        for i in range(128):
            theta = K.theta_at(np.uint64(99), np.uint64(i), mixed_params.p)
            out = fg.simulate_path(mixed_params, mixed_eq, fg.EquilibriumRate(),
                                   fg.RandomizedIntensity(), int(theta), cfg, path_index=i)
            assert out.theta == res["theta"][i]
            assert out.discounted_theft == res["theft"][i]
            assert out.stop_discount == res["stop_discount"][i]
            assert out.final_belief == res["final_belief"][i]


class TestKernelRandomness:
    def test_inverse_cdf_matches_scipy(self):
        u = np.concatenate([
            np.linspace(1e-12, 1 - 1e-12, 50_001),
            10.0 ** np.arange(-300.0, -1.0),
        ])
        mine = np.array([K._ppnd16(x) for x in u])
        ref = special.ndtri(u)
        assert np.max(np.abs(mine - ref) / np.maximum(np.abs(ref), 1.0)) < 1e-13

    def test_normal_stream_moments(self):
        z = np.array([K.normal_at(np.uint64(7), np.uint64(0), np.uint64(t))
                      for t in range(200_000)])
        n = z.size
        assert abs(z.mean()) < 5.0 / math.sqrt(n)
        assert abs(z.std() - 1.0) < 5.0 / math.sqrt(n)
        assert abs(np.mean(z[1:] * z[:-1])) < 5.0 / math.sqrt(n)
        # normality of the body, not just moments
        ks = stats.kstest(z[:20_000], "norm")
        assert ks.pvalue > 1e-4

    def test_streams_uncorrelated_across_paths(self):
        z0 = np.array([K.normal_at(np.uint64(7), np.uint64(0), np.uint64(t))
                       for t in range(50_000)])
        z1 = np.array([K.normal_at(np.uint64(7), np.uint64(1), np.uint64(t))
                       for t in range(50_000)])
        assert abs(np.corrcoef(z0, z1)[0, 1]) < 5.0 / math.sqrt(50_000)

    def test_theta_frequency(self):
        draws = np.array([K.theta_at(np.uint64(11), np.uint64(i), 0.3)
                          for i in range(20_000)])
        assert abs(draws.mean() - 0.3) < 5.0 * math.sqrt(0.21 / 20_000)

    def test_exp_clock_moments(self):
        u = np.array([K.exp_clock_at(np.uint64(3), np.uint64(i)) for i in range(20_000)])
        assert np.all(u > 0.0)
        assert abs(u.mean() - 1.0) < 5.0 / math.sqrt(20_000)


class TestTrace:
    def test_trace_structure(self, pure_params, pure_eq):
        cfg = fg.PathConfig(dt=1e-2, horizon=2.0, seed=4, record_path=True)
        out, trace = fg.simulate_path_with_trace(
            pure_params, pure_eq, fg.EquilibriumRate(), fg.Never(), 1, cfg)
        assert trace.shape == (201, 4)
        assert trace[0, 0] == 0.0
        assert trace[0, 1] == pure_params.p
        assert np.allclose(np.diff(trace[:, 0]), 1e-2)
        assert np.all(np.diff(trace[:, 3]) >= 0.0)  # cumulative theft
        assert trace[-1, 3] == out.discounted_theft

    def test_trace_stops_with_path(self, mixed_params, mixed_eq):
        cfg = fg.PathConfig(dt=1e-3, horizon=200.0, seed=21, record_path=True)
        out, trace = fg.simulate_path_with_trace(
            mixed_params, mixed_eq, fg.EquilibriumRate(), fg.RandomizedIntensity(), 1, cfg)
        if not out.truncated:
            assert trace[-1, 0] == pytest.approx(out.stop_time, abs=1e-12)
            assert np.all(np.diff(trace[:, 2]) >= 0.0)  # clock integral


class TestClampBehaviour:
    def test_beliefs_stay_in_band(self, pure_params, pure_eq):
        cfg = fg.PathConfig(dt=1e-3, horizon=5.0, seed=17)
        res = fg.simulate_batch(pure_params, pure_eq, fg.EquilibriumRate(),
                                fg.Never(), "prior", 2000, cfg)
        assert np.all(res["final_belief"] >= cfg.clamp_eps)
        assert np.all(res["final_belief"] <= 1 - cfg.clamp_eps)

    def test_no_collapse_on_moderate_horizon(self, pure_eq):
        # beliefs started at p >= 0.1 should essentially never be driven
        # to the lower clamp within a filter-calibration time scale
        params = fg.ModelParams(r=R, M=3.0, p=0.1)
        cfg = fg.PathConfig(dt=1e-3, horizon=5.0, seed=31)
        res = fg.simulate_batch(params, pure_eq, fg.EquilibriumRate(),
                                fg.Never(), "prior", 10_000, cfg)
        assert res["touched_lower_clamp"].mean() < 0.01


@pytest.mark.slow
class TestStoppingTimeFiniteness:
    def test_active_paths_stop_before_long_horizon(self, pure_params, pure_eq):
        cfg = fg.PathConfig(dt=1e-3, horizon=12.0 / R, seed=5)
        res = fg.simulate_batch(pure_params, pure_eq, fg.EquilibriumRate(),
                                fg.Threshold(pure_eq.b), "fixed1", 5000, cfg)
        assert np.mean(~res["stopped"]) < 0.02


@pytest.mark.slow
class TestWeakConvergence:
    def test_halving_dt_changes_estimate_within_noise(self, pure_params, pure_eq):
        estimates = []
        for dt in (4e-3, 2e-3):
            cfg = fg.PathConfig(dt=dt, horizon=120.0, seed=13)
            res = fg.simulate_batch(pure_params, pure_eq, fg.EquilibriumRate(),
                                    fg.Threshold(pure_eq.b), "fixed1", 5000, cfg)
            theft = res["theft"]
            estimates.append((theft.mean(), theft.std(ddof=1) / math.sqrt(theft.size)))
        (m1, s1), (m2, s2) = estimates
        assert abs(m1 - m2) < 3.0 * math.hypot(s1, s2)
