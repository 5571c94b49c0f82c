import math

import pytest
from hypothesis import given, settings, strategies as st

from fraudgame import DomainError, ModelParams, classify, m_hat
from fraudgame.model import (
    ConstantRate,
    EquilibriumRate,
    Immediate,
    Never,
    NullFraud,
    RandomizedIntensity,
    ScaledEquilibrium,
    Threshold,
    format_fraud,
    format_stopper,
    parse_fraud,
    parse_stopper,
)


class TestMHat:
    def test_reference_rate(self):
        assert m_hat(0.05) == pytest.approx(3.963327, abs=1e-6)
        # direct arithmetic
        assert m_hat(0.05) == math.sqrt(math.pi) / (2.0 * math.sqrt(0.05))

    def test_unit_value(self):
        assert m_hat(math.pi / 4.0) == pytest.approx(1.0, abs=1e-15)

    def test_quadrupling_rate_halves_bound(self):
        assert m_hat(0.2) == pytest.approx(m_hat(0.05) / 2.0, abs=1e-12)
        assert m_hat(0.2) == pytest.approx(1.981663, abs=1e-6)

    @pytest.mark.parametrize("r", [0.0, -1.0, math.nan, math.inf])
    def test_domain_errors(self, r):
        with pytest.raises(DomainError):
            m_hat(r)


class TestClassify:
    def test_pure_example(self):
        regime = classify(ModelParams(r=0.05, M=3.0, p=0.3))
        assert regime.kind == "pure"
        assert regime.is_pure

    def test_mixed_example(self):
        regime = classify(ModelParams(r=0.05, M=5.0, p=0.3))
        assert regime.kind == "mixed"

    def test_boundary_is_pure(self):
        regime = classify(ModelParams(r=0.05, M=m_hat(0.05), p=0.3))
        assert regime.kind == "pure"
        assert regime.m_hat == m_hat(0.05)

    @given(st.floats(1e-3, 2.0), st.floats(1e-3, 50.0), st.floats(1e-3, 50.0))
    @settings(max_examples=200, deadline=None)
    def test_monotone_in_cost(self, r, m1, m2):
        lo, hi = sorted((m1, m2))
        if classify(ModelParams(r=r, M=lo, p=0.5)).kind == "mixed":
            assert classify(ModelParams(r=r, M=hi, p=0.5)).kind == "mixed"


class TestModelParams:
    @pytest.mark.parametrize("kwargs", [
        dict(r=0.0, M=1.0, p=0.5),
        dict(r=-0.05, M=1.0, p=0.5),
        dict(r=0.05, M=0.0, p=0.5),
        dict(r=0.05, M=1.0, p=0.0),
        dict(r=0.05, M=1.0, p=1.0),
        dict(r=math.nan, M=1.0, p=0.5),
    ])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(DomainError):
            ModelParams(**kwargs)

    def test_immutable(self):
        params = ModelParams(r=0.05, M=3.0, p=0.3)
        with pytest.raises(AttributeError):
            params.r = 0.1


class TestStrategyDescriptors:
    @pytest.mark.parametrize("strategy", [
        EquilibriumRate(), ConstantRate(0.4), ScaledEquilibrium(2.0), NullFraud(),
    ])
    def test_fraud_roundtrip(self, strategy):
        assert parse_fraud(format_fraud(strategy)) == strategy

    @pytest.mark.parametrize("strategy", [
        Threshold(0.25), RandomizedIntensity(), Immediate(), Never(),
    ])
    def test_stopper_roundtrip(self, strategy):
        assert parse_stopper(format_stopper(strategy)) == strategy

    def test_parse_examples(self):
        assert parse_fraud("constant:0.5") == ConstantRate(0.5)
        assert parse_stopper("threshold:0.6767") == Threshold(0.6767)

    @pytest.mark.parametrize("text", ["", "wat", "constant", "scaled:-1", "constant:-2"])
    def test_bad_fraud_strings(self, text):
        with pytest.raises(DomainError):
            parse_fraud(text)

    @pytest.mark.parametrize("text", ["", "wat", "threshold", "threshold:1.5"])
    def test_bad_stopper_strings(self, text):
        with pytest.raises(DomainError):
            parse_stopper(text)

    def test_validation(self):
        with pytest.raises(DomainError):
            ConstantRate(rate=-0.1)
        with pytest.raises(DomainError):
            ScaledEquilibrium(scale=0.0)
        with pytest.raises(DomainError):
            Threshold(level=1.0)
