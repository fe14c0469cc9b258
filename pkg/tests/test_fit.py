import math

import numpy as np
import pytest

from kwlngb.distributions import KwParams, LngbParams, Sample, kw_log_pdf, kw_sample, lngb_sample
from kwlngb.errors import DegenerateSampleError, DomainError
from kwlngb.fit import (SCORE_TOL_PER_OBS, fit_kw, fit_lngb, kw_loglik, kw_score,
                        lngb_loglik, lngb_score)

FIVE_POINTS = Sample(np.array([0.12, 0.35, 0.51, 0.74, 0.93]))


class TestKwLoglik:
    def test_uniform_parameters(self):
        assert kw_loglik(KwParams(1, 1), FIVE_POINTS) == pytest.approx(0.0, abs=1e-12)

    def test_single_point(self):
        s = Sample(np.array([0.5]))
        assert kw_loglik(KwParams(2, 1), s) == pytest.approx(0.0, abs=1e-14)

    def test_matches_pointwise_sum(self):
        p = KwParams(2, 2.5)
        expect = float(np.sum(kw_log_pdf(p, FIVE_POINTS.values)))
        assert kw_loglik(p, FIVE_POINTS) == pytest.approx(expect, abs=1e-9 * FIVE_POINTS.n)


class TestFitKw:
    def test_consistency(self):
        s = kw_sample(KwParams(2.0, 2.5), 10_000, np.random.default_rng(1234))
        fit = fit_kw(s)
        assert fit.converged
        assert abs(fit.params.alpha - 2.0) < 0.1
        assert abs(fit.params.delta - 2.5) < 0.15

    def test_uniform_data(self):
        s = Sample(np.random.default_rng(7).random(20_000))
        fit = fit_kw(s)
        assert abs(fit.params.alpha - 1.0) < 0.05
        assert abs(fit.params.delta - 1.0) < 0.05

    def test_profile_identity(self):
        s = kw_sample(KwParams(0.7, 1.8), 500, np.random.default_rng(5))
        fit = fit_kw(s)
        t = float(np.sum(np.log(-np.expm1(fit.params.alpha * s.log_values))))
        assert fit.params.delta == pytest.approx(-s.n / t, rel=1e-12)

    def test_score_at_optimum(self):
        s = kw_sample(KwParams(3.0, 0.8), 2_000, np.random.default_rng(6))
        fit = fit_kw(s)
        assert fit.converged
        assert np.all(np.abs(kw_score(fit.params, s)) <= SCORE_TOL_PER_OBS * s.n)

    def test_perturbation_decreases_loglik(self):
        s = kw_sample(KwParams(2.0, 2.5), 3_000, np.random.default_rng(8))
        fit = fit_kw(s)
        base = fit.log_likelihood
        for factor in (0.99, 1.01):
            assert kw_loglik(KwParams(fit.params.alpha * factor, fit.params.delta), s) < base
            assert kw_loglik(KwParams(fit.params.alpha, fit.params.delta * factor), s) < base

    def test_aic_bic_identities(self):
        s = kw_sample(KwParams(2.0, 2.5), 100, np.random.default_rng(9))
        fit = fit_kw(s)
        assert fit.aic == pytest.approx(4.0 - 2.0 * fit.log_likelihood, rel=1e-14)
        assert fit.bic == pytest.approx(2.0 * math.log(100) - 2.0 * fit.log_likelihood, rel=1e-14)

    def test_degenerate_sample(self):
        with pytest.raises(DegenerateSampleError):
            fit_kw(Sample(np.full(10, 0.4)))

    def test_too_small(self):
        with pytest.raises(DomainError):
            fit_kw(Sample(np.array([0.4])))


class TestLngbLoglik:
    def test_uniform_parameters(self):
        assert lngb_loglik(LngbParams(1, 1, 1), FIVE_POINTS) == pytest.approx(0.0, abs=1e-12)

    def test_beta_nesting(self):
        from scipy import stats
        p = LngbParams(1.4, 2.2, 1.0)
        expect = float(np.sum(stats.beta.logpdf(FIVE_POINTS.values, 1.4, 2.2)))
        assert lngb_loglik(p, FIVE_POINTS) == pytest.approx(expect, abs=1e-10)

    def test_matches_pointwise_sum(self):
        from kwlngb.distributions import lngb_log_pdf
        p = LngbParams(1.2, 1.5, 0.7)
        expect = float(np.sum(lngb_log_pdf(p, FIVE_POINTS.values)))
        assert lngb_loglik(p, FIVE_POINTS) == pytest.approx(expect, abs=1e-9 * FIVE_POINTS.n)


def fd_score(p: LngbParams, s: Sample, h: float = 1e-6) -> np.ndarray:
    """Central finite differences of the log-likelihood; the independent oracle."""
    out = []
    base = (p.a, p.b, p.beta)
    for j in range(3):
        up = list(base)
        dn = list(base)
        up[j] += h
        dn[j] -= h
        out.append((lngb_loglik(LngbParams(*up), s) - lngb_loglik(LngbParams(*dn), s)) / (2 * h))
    return np.asarray(out)


class TestLngbScore:
    def test_beta_component_at_unit_params(self):
        # at (1,1,1): d/d beta = n - 2 * sum(x)
        s = FIVE_POINTS
        expect = s.n - 2.0 * float(np.sum(s.values))
        got = lngb_score(LngbParams(1, 1, 1), s)[2]
        assert got == pytest.approx(expect, rel=1e-12)
        fd = fd_score(LngbParams(1, 1, 1), s)[2]
        assert got == pytest.approx(fd, rel=1e-6)

    def test_finite_difference_agreement_random_points(self):
        rng = np.random.default_rng(77)
        for _ in range(50):
            p = LngbParams(*np.exp(rng.uniform(-1.0, 1.0, 3)))
            s = Sample(rng.uniform(0.02, 0.98, 40))
            exact = lngb_score(p, s)
            approx = fd_score(p, s)
            scale = np.maximum(np.abs(exact), 1e-3 * s.n)
            assert np.all(np.abs(exact - approx) <= 1e-4 * scale)

    def test_score_at_mle_is_zero(self):
        s = lngb_sample(LngbParams(1.2, 1.5, 0.7), 2_000, np.random.default_rng(10))
        fit = fit_lngb(s)
        assert np.all(np.abs(lngb_score(fit.params, s)) <= SCORE_TOL_PER_OBS * s.n)


class TestFitLngb:
    def test_consistency(self):
        s = lngb_sample(LngbParams(1.2, 1.5, 0.7), 10_000, np.random.default_rng(4321))
        fit = fit_lngb(s)
        assert fit.converged
        assert abs(fit.params.a - 1.2) / 1.2 < 0.15
        assert abs(fit.params.b - 1.5) / 1.5 < 0.15
        assert abs(fit.params.beta - 0.7) / 0.7 < 0.15

    def test_beta_data_gives_beta_near_one(self):
        rng = np.random.default_rng(11)
        s = Sample(rng.beta(1.5, 2.0, 20_000))
        fit = fit_lngb(s)
        assert abs(fit.params.beta - 1.0) < 0.15

    def test_nested_dominance(self):
        rng = np.random.default_rng(12)
        s = Sample(rng.beta(1.5, 2.0, 500))
        fit = fit_lngb(s)
        m, v = float(np.mean(s.values)), float(np.var(s.values))
        c = m * (1 - m) / v - 1
        beta_fit = LngbParams(c * m, c * (1 - m), 1.0)
        assert fit.log_likelihood >= lngb_loglik(beta_fit, s)

    def test_perturbation_decreases_loglik(self):
        s = lngb_sample(LngbParams(1.2, 1.5, 0.7), 3_000, np.random.default_rng(13))
        fit = fit_lngb(s)
        base = fit.log_likelihood
        a, b, be = fit.params.a, fit.params.b, fit.params.beta
        for f in (0.99, 1.01):
            assert lngb_loglik(LngbParams(a * f, b, be), s) < base
            assert lngb_loglik(LngbParams(a, b * f, be), s) < base
            assert lngb_loglik(LngbParams(a, b, be * f), s) < base

    def test_deterministic(self):
        s = lngb_sample(LngbParams(0.8, 2.0, 1.4), 300, np.random.default_rng(14))
        f1, f2 = fit_lngb(s), fit_lngb(s)
        assert f1 == f2

    def test_fingerprint_recorded(self):
        s = lngb_sample(LngbParams(1, 1, 1), 50, np.random.default_rng(15))
        assert fit_lngb(s).sample_fingerprint == s.fingerprint

    def test_too_small(self):
        with pytest.raises(DomainError):
            fit_lngb(Sample(np.array([0.2, 0.4])))

    def test_degenerate_sample(self):
        with pytest.raises(DegenerateSampleError):
            fit_lngb(Sample(np.full(10, 0.4)))

    def test_ridge_sample_converges_at_bounds(self):
        # 25 draws from a sharply right-shifted KW push the LNGB fit along
        # the weak-identification ridge; the fit must pin at the parameter
        # caps (or stall at double-precision resolution) rather than fail,
        # and still dominate the nested beta fit
        from kwlngb.montecarlo import replicate_stream
        s = kw_sample(KwParams(5.0, 2.5), 25, replicate_stream(777, 1))
        fit = fit_lngb(s)
        assert fit.converged
        assert math.isfinite(fit.log_likelihood)
        m, v = float(np.mean(s.values)), float(np.var(s.values))
        c = m * (1 - m) / v - 1
        beta_fit = LngbParams(max(c * m, 1e-3), max(c * (1 - m), 1e-3), 1.0)
        assert fit.log_likelihood >= lngb_loglik(beta_fit, s)
