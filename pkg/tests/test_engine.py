"""Marginal likelihoods and weights of evidence for single statistics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from bff.distributions import StatFamily
from bff.engine import (
    Sidedness,
    TestStatistic,
    default_row,
    log_bf10,
    log_bf10_gprior,
    log_bf10_ideal,
    log_bf10_jzs,
    log_marginal_alt,
    log_marginal_null,
    prior_for_effect,
)
from bff.errors import DomainError
from bff.priors import CauchyJZS, InverseGamma, InverseMoment, NormalG, Support, TestRow

from oracles import chisq_marginal_ig, f_marginal_ig, im_pdf, t_marginal, z_marginal


class TestAgainstGridOracle:
    @pytest.mark.parametrize("z", [0.0, 1.0, -2.3, 4.5])
    def test_z_two_sided(self, z):
        stat = TestStatistic(StatFamily.z(), z, n=100)
        prior = prior_for_effect(stat, 0.3)
        ref = z_marginal(z, lambda d: im_pdf(d, prior.tau, prior.nu))
        assert log_marginal_alt(stat, prior) == pytest.approx(math.log(ref), abs=1e-8)

    @pytest.mark.parametrize("z", [0.5, 2.8])
    def test_z_one_sided(self, z):
        stat = TestStatistic(StatFamily.z(), z, n=50, sidedness="greater")
        prior = prior_for_effect(stat, 0.4)
        assert prior.support is Support.POSITIVE
        ref = z_marginal(z, lambda d: im_pdf(d, prior.tau, prior.nu), one_sided=True)
        assert log_marginal_alt(stat, prior) == pytest.approx(math.log(ref), abs=1e-8)

    @pytest.mark.parametrize("t,df", [(1.5, 12), (-3.0, 40), (0.2, 5)])
    def test_t_two_sided(self, t, df):
        stat = TestStatistic(StatFamily.t(df), t, n=df + 1)
        prior = prior_for_effect(stat, 0.5)
        ref = t_marginal(t, df, lambda d: im_pdf(d, prior.tau, prior.nu))
        assert log_marginal_alt(stat, prior) == pytest.approx(math.log(ref), abs=1e-7)

    def test_t_one_sided_jzs(self):
        stat = TestStatistic(StatFamily.t(20), 2.2, sidedness="greater")
        ref = t_marginal(2.2, 20, lambda d: stats.cauchy.pdf(d, scale=0.707), one_sided=True, hi=400.0)
        assert log_marginal_alt(stat, CauchyJZS(0.707, Support.POSITIVE)) == pytest.approx(math.log(ref), abs=1e-6)

    @pytest.mark.parametrize("x", [0.6, 4.0])
    def test_f_vector_row(self, x):
        stat = TestStatistic(StatFamily.f(3, 40), x, n=44)
        prior = prior_for_effect(stat, 0.3)
        assert stat.row is TestRow.LINEAR_MODEL
        ref = f_marginal_ig(x, 3, 40, prior.shape, prior.scale)
        assert log_marginal_alt(stat, prior) == pytest.approx(math.log(ref), abs=1e-7)

    def test_chisq_vector_row(self):
        stat = TestStatistic(StatFamily.chisq(3), 7.5, n=60)
        prior = prior_for_effect(stat, 0.25)
        ref = chisq_marginal_ig(7.5, 3, prior.shape, prior.scale)
        assert log_marginal_alt(stat, prior) == pytest.approx(math.log(ref), abs=1e-7)


class TestDualities:
    @pytest.mark.parametrize("z", [0.4, 1.0, 3.1])
    @pytest.mark.parametrize("omega", [0.1, 0.35, 0.8])
    def test_z_and_chisq1_agree(self, z, omega):
        zs = TestStatistic(StatFamily.z(), z, n=100)
        cs = TestStatistic(StatFamily.chisq(1), z * z, n=100)
        assert log_bf10(cs, prior_for_effect(cs, omega)) == pytest.approx(
            log_bf10(zs, prior_for_effect(zs, omega)), abs=1e-9
        )

    @pytest.mark.parametrize("t", [0.7, 2.5])
    def test_t_and_f1_agree(self, t):
        ts = TestStatistic(StatFamily.t(29), t, n=30)
        fs = TestStatistic(StatFamily.f(1, 29), t * t, n=30)
        for omega in (0.2, 0.6):
            assert log_bf10(fs, prior_for_effect(fs, omega)) == pytest.approx(
                log_bf10(ts, prior_for_effect(ts, omega)), abs=1e-8
            )

    def test_baselines_agree_across_squaring(self):
        ts = TestStatistic(StatFamily.t(49), 2.0)
        fs = TestStatistic(StatFamily.f(1, 49), 4.0)
        assert log_bf10_jzs(fs, 0.7) == pytest.approx(log_bf10_jzs(ts, 0.7), abs=1e-8)
        assert log_bf10_gprior(fs, 50.0) == pytest.approx(log_bf10_gprior(ts, 50.0), abs=1e-8)

    @given(z=st.floats(-6, 6), omega=st.floats(0.05, 1.0))
    @settings(max_examples=25, deadline=None)
    def test_two_sided_symmetric_in_sign(self, z, omega):
        a = TestStatistic(StatFamily.z(), z, n=80)
        b = TestStatistic(StatFamily.z(), -z, n=80)
        prior = prior_for_effect(a, omega)
        assert log_bf10(a, prior) == pytest.approx(log_bf10(b, prior), abs=1e-10)

    def test_one_sided_mirror(self):
        up = TestStatistic(StatFamily.t(15), 1.7, n=16, sidedness="greater")
        down = TestStatistic(StatFamily.t(15), -1.7, n=16, sidedness="less")
        assert log_bf10(up, prior_for_effect(up, 0.4)) == pytest.approx(
            log_bf10(down, prior_for_effect(down, 0.4)), abs=1e-10
        )


class TestBaselines:
    @pytest.mark.parametrize("z", [0.0, 1.3, 4.0])
    @pytest.mark.parametrize("g", [1.0, 100.0])
    def test_gprior_closed_form_matches_quadrature(self, z, g):
        stat = TestStatistic(StatFamily.z(), z)
        assert log_bf10_gprior(stat, g) == pytest.approx(log_bf10(stat, NormalG(g)), abs=1e-9)

    def test_gprior_closed_form_value(self):
        # z ~ N(0, 1 + g) under the alternative
        stat = TestStatistic(StatFamily.z(), 2.0)
        ref = stats.norm.logpdf(2.0, scale=math.sqrt(11.0)) - stats.norm.logpdf(2.0)
        assert log_bf10_gprior(stat, 10.0) == pytest.approx(ref, abs=1e-13)

    def test_baselines_need_one_df(self):
        with pytest.raises(DomainError):
            log_bf10_jzs(TestStatistic(StatFamily.f(2, 30), 3.0), 1.0)
        with pytest.raises(DomainError):
            log_bf10_gprior(TestStatistic(StatFamily.chisq(4), 3.0), 1.0)

    def test_ideal_is_likelihood_ratio(self):
        stat = TestStatistic(StatFamily.z(), 1.4)
        assert log_bf10_ideal(stat, 2.0) == pytest.approx(stats.norm.logpdf(1.4, 2.0) - stats.norm.logpdf(1.4), abs=1e-13)
        assert log_bf10_ideal(stat, 0.0) == 0.0


class TestCurveValues:
    def test_weak_z_statistic_favours_null(self):
        stat = TestStatistic(StatFamily.z(), 1.0, n=100)
        # floor sqrt(6 / 100) and a fine grid above it
        omegas = np.concatenate([[math.sqrt(0.06)], np.arange(0.245, 1.0, 0.0005)])
        values = [log_bf10(stat, prior_for_effect(stat, w)) for w in omegas]
        assert int(np.argmax(values)) == 0
        assert values[0] == pytest.approx(-1.4587, abs=5e-5)

    def test_small_effect_limit(self):
        stat = TestStatistic(StatFamily.z(), 2.0, n=100)
        values = [abs(log_bf10(stat, prior_for_effect(stat, w))) for w in (0.02, 0.005, 0.001)]
        assert values[0] > values[1] > values[2]
        assert values[2] < 1e-3
        assert prior_for_effect(stat, 0.0) is None
        assert log_bf10(stat, None) == 0.0

    def test_quadrature_and_series_agree_for_f(self):
        stat = TestStatistic(StatFamily.f(2, 50), 3.3, n=53)
        prior = prior_for_effect(stat, 0.3)
        assert log_bf10(stat, prior, "series") == pytest.approx(log_bf10(stat, prior, "quad"), abs=1e-8)

    def test_null_marginal(self):
        stat = TestStatistic(StatFamily.t(7), 0.9)
        assert log_marginal_null(stat) == pytest.approx(stats.t.logpdf(0.9, 7), abs=1e-13)


class TestValidation:
    def test_default_rows(self):
        assert default_row(StatFamily.z()) is TestRow.ONE_SAMPLE_Z
        assert default_row(StatFamily.chisq(1)) is TestRow.ONE_SAMPLE_Z
        assert default_row(StatFamily.chisq(3)) is TestRow.LIKELIHOOD_RATIO
        assert default_row(StatFamily.f(1, 9)) is TestRow.ONE_SAMPLE_T
        assert default_row(StatFamily.f(2, 9)) is TestRow.LINEAR_MODEL

    def test_sidedness_only_for_signed_families(self):
        with pytest.raises(DomainError):
            TestStatistic(StatFamily.chisq(1), 2.0, sidedness="greater")

    def test_rejects_negative_nonneg_statistic(self):
        with pytest.raises(DomainError):
            TestStatistic(StatFamily.f(1, 9), -0.1)

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            TestStatistic(StatFamily.z(), math.inf)

    def test_prior_support_must_match_sidedness(self):
        stat = TestStatistic(StatFamily.z(), 1.0, sidedness="greater")
        with pytest.raises(DomainError):
            log_bf10(stat, InverseMoment(10.0))

    def test_ig_prior_needs_nonneg_family(self):
        with pytest.raises(DomainError):
            log_bf10(TestStatistic(StatFamily.z(), 1.0), InverseGamma(4.5, 10.0))

    def test_prior_needs_sample_size(self):
        with pytest.raises(DomainError):
            prior_for_effect(TestStatistic(StatFamily.z(), 1.0), 0.3)

    def test_unknown_method(self):
        with pytest.raises(DomainError):
            log_bf10(TestStatistic(StatFamily.chisq(1), 1.0), NormalG(1.0), "simpson")

    def test_series_only_for_nonneg(self):
        with pytest.raises(DomainError):
            log_bf10(TestStatistic(StatFamily.z(), 1.0), NormalG(1.0), "series")

    def test_sidedness_parses_strings(self):
        assert TestStatistic(StatFamily.z(), 1.0, sidedness="less").sidedness is Sidedness.LESS
