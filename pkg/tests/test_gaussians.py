"""Normal-kernel oracles: closed-form spot values, a bisection oracle for
the quantile, and the tail inequalities the equilibrium construction
relies on."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from fraudgame import DomainError, mills_F, normal_eval, quantile
from fraudgame.gaussians import cdf, mills_ratio, pdf, sf, survival_quantile

SQRT_2PI = math.sqrt(2.0 * math.pi)


def bisect_quantile(q: float, tol: float = 1e-12) -> float:
    """Independent quantile oracle: plain bisection on scipy's normal cdf."""
    lo, hi = -40.0, 40.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if stats.norm.cdf(mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestNormalEval:
    def test_at_zero(self):
        t = normal_eval(0.0)
        assert t.pdf == pytest.approx(1.0 / SQRT_2PI, abs=1e-15)
        assert t.cdf == 0.5
        assert t.sf == 0.5

    def test_at_one_direct_arithmetic(self):
        t = normal_eval(1.0)
        assert t.pdf == pytest.approx(math.exp(-0.5) / SQRT_2PI, abs=1e-16)

    @given(st.floats(-8.0, 8.0))
    @settings(max_examples=200, deadline=None)
    def test_symmetry_and_complement(self, y):
        t = normal_eval(y)
        m = normal_eval(-y)
        assert t.pdf == pytest.approx(m.pdf, abs=1e-16)
        assert t.cdf == pytest.approx(m.sf, abs=1e-15)
        assert abs(t.cdf + t.sf - 1.0) <= 1e-14
        assert t.pdf >= 0.0

    def test_cdf_nondecreasing(self):
        y = np.linspace(-12.0, 12.0, 4001)
        c = cdf(y)
        assert np.all(np.diff(c) >= 0.0)

    def test_cdf_relative_accuracy_against_mpmath(self):
        import mpmath
        y = np.concatenate([np.linspace(-8.0, 8.0, 81), [-7.77, -5.5, 3.33]])
        ref = np.array([float(mpmath.ncdf(v)) for v in y])
        rel = np.abs(np.asarray(cdf(y)) - ref) / ref
        assert rel.max() <= 1e-12

    def test_sf_direct_not_complement(self):
        # at y = 30 the complement 1 - cdf would be exactly 0 in doubles
        assert 1.0 - float(cdf(30.0)) == 0.0
        assert sf(30.0) > 0.0
        assert sf(30.0) == pytest.approx(stats.norm.sf(30.0), rel=1e-12)

    def test_rejects_non_finite(self):
        for bad in (math.nan, math.inf, -math.inf):
            with pytest.raises(DomainError):
                normal_eval(bad)


class TestQuantile:
    def test_median(self):
        assert quantile(0.5) == 0.0

    @pytest.mark.parametrize("q", [0.75, 0.975, 0.2, 1e-4, 1 - 1e-6])
    def test_against_bisection_oracle(self, q):
        assert quantile(q) == pytest.approx(bisect_quantile(q), abs=1e-9)

    def test_frozen_values(self):
        # frozen from the bisection oracle
        assert quantile(0.75) == pytest.approx(0.6744897501960817, abs=1e-9)
        assert quantile(0.975) == pytest.approx(1.959963984540054, abs=1e-9)

    def test_roundtrip_cdf_quantile(self):
        q = np.concatenate([
            np.linspace(1e-10, 1 - 1e-10, 2001),
            10.0 ** np.arange(-12, -1),
        ])
        x = quantile(q)
        assert np.max(np.abs(cdf(x) - q)) <= 1e-10

    def test_roundtrip_quantile_cdf(self):
        # each half is inverted through its well-conditioned tail: cdf(y)
        # near 1 only resolves y to ~2e-8 in doubles, sf takes over there
        y = np.linspace(-6.0, 0.0, 600)
        assert np.max(np.abs(quantile(cdf(y)) - y)) <= 1e-9
        y = np.linspace(0.0, 6.0, 600)
        assert np.max(np.abs(-quantile(sf(y)) - y)) <= 1e-9
        # the naive direction also holds wherever cdf resolves it
        y = np.linspace(-6.0, 5.0, 600)
        assert np.max(np.abs(quantile(cdf(y)) - y)) <= 1e-9

    def test_strictly_increasing(self):
        q = np.linspace(1e-8, 1 - 1e-8, 3001)
        assert np.all(np.diff(quantile(q)) > 0.0)

    @pytest.mark.parametrize("q", [0.0, 1.0, -0.25, 1.25, math.nan])
    def test_domain_errors(self, q):
        with pytest.raises(DomainError):
            quantile(q)

    def test_survival_quantile(self):
        assert survival_quantile(0.25) == pytest.approx(quantile(0.75), abs=1e-14)


class TestMillsF:
    def test_at_zero(self):
        assert mills_F(0.0) == pytest.approx(1.0 / SQRT_2PI, abs=1e-12)

    def test_vanishes_at_infinity(self):
        assert mills_F(30.0) < 1e-190
        assert mills_F(40.0) <= 1e-300

    def test_at_one_direct_arithmetic(self):
        expected = stats.norm.pdf(1.0) - stats.norm.sf(1.0)
        assert mills_F(1.0) == pytest.approx(expected, abs=1e-15)
        assert mills_F(1.0) == pytest.approx(0.0833154705876863, abs=1e-12)

    def test_nonnegative_on_grid(self):
        y = np.linspace(0.0, 40.0, 40001)
        assert np.all(mills_F(y) >= 0.0)

    def test_slope_at_origin(self):
        slope = (mills_F(1e-5) - mills_F(0.0)) / 1e-5
        assert slope == pytest.approx(-0.5, abs=1e-4)

    def test_matches_direct_subtraction_midrange(self):
        y = np.linspace(0.0, 8.0, 1000)
        direct = stats.norm.pdf(y) - y * stats.norm.sf(y)
        assert np.max(np.abs(mills_F(y) - direct)) <= 1e-14


class TestTailInequalities:
    def setup_method(self):
        self.z = np.linspace(1e-3, 10.0, 10_000)

    def test_mills_inequality(self):
        z = self.z
        ratio = pdf(z) / sf(z)
        expr = 2.0 * ratio**2 - 3.0 * z * ratio + z * z
        assert np.all(expr > 1.0)
        # limiting behavior: still above 1 at the far end of the grid
        assert expr[-1] > 1.0
        assert expr[-1] == pytest.approx(1.0, abs=0.05)

    def test_mills_inequality_at_one_direct(self):
        phi1, psi1 = stats.norm.pdf(1.0), stats.norm.sf(1.0)
        assert 2 * phi1**2 / psi1**2 - 3 * phi1 / psi1 + 1.0 > 1.0

    def test_pdf_bound(self):
        z = self.z
        assert np.all(z * pdf(z) <= (1.0 + z * z) * sf(z))
        assert 0.0 <= 0.5  # z = 0 case: 0 <= Psi(0)

    def test_survival_bound(self):
        z = self.z
        assert np.all(z * sf(z) <= pdf(z))

    def test_log_survival_ratio_bounded(self):
        # phi(x) <= A sqrt(ln(1/Psi(x))) Psi(x) for x >= 2: the ratio stays bounded
        x = np.linspace(2.0, 8.0, 4000)
        ratio = pdf(x) / (np.sqrt(np.log(1.0 / sf(x))) * sf(x))
        assert np.all(np.isfinite(ratio))
        assert ratio.max() < 2.0

    def test_mills_ratio_consistency(self):
        y = np.linspace(0.0, 30.0, 1000)
        direct = stats.norm.pdf(y[y < 20]) / stats.norm.sf(y[y < 20])
        assert np.max(np.abs(mills_ratio(y[y < 20]) - direct) / direct) <= 1e-12
        # deep tail keeps the y + 1/y shape without overflow
        assert mills_ratio(30.0) == pytest.approx(30.0 + 1.0 / 30.0, rel=1e-3)
