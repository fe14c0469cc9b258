import math

import numpy as np
import pytest

from kwlngb.discrimination import (NullAnalysis, expected_rival_loglik_under_lngb,
                                   kw_null, lngb_null, min_sample_size,
                                   null_analysis, pcs_kw, pcs_lngb,
                                   pseudo_true_kw, pseudo_true_lngb,
                                   select_model, w_statistic)
from kwlngb.distributions import KwParams, LngbParams, Sample, kw_sample, lngb_sample
from kwlngb.errors import DomainError, InfeasibleError, UsageError
from kwlngb.fit import FitResult, fit_kw, fit_lngb


class TestExpectedRivalLoglik:
    def test_uniform_rival_scores_zero(self):
        val = expected_rival_loglik_under_lngb(LngbParams(1.2, 1.5, 0.7), KwParams(1, 1))
        assert val == pytest.approx(0.0, abs=1e-10)

    def test_nested_value_is_minus_entropy(self):
        # E_{Beta(1,d)}[log f_KW(1,d)] = log d - 1 + 1/d, cross-checked by
        # a 10^6-draw Monte Carlo average of the log-density
        d = 2.5
        val = expected_rival_loglik_under_lngb(LngbParams(1, d, 1), KwParams(1, d))
        assert val == pytest.approx(math.log(d) - 1.0 + 1.0 / d, abs=1e-9)
        rng = np.random.default_rng(321)
        from kwlngb.distributions import kw_log_pdf
        draws = kw_sample(KwParams(1, d), 1_000_000, rng)
        mc = float(np.mean(kw_log_pdf(KwParams(1, d), draws.values)))
        assert val == pytest.approx(mc, abs=4e-3)

    def test_pseudo_true_beats_reference_pair(self):
        # the KL projection must dominate any other rival candidate,
        # including the externally tabulated pair for these parameters
        true = LngbParams(1.2, 1.5, 0.7)
        ours = pseudo_true_kw(true)
        at_ours = expected_rival_loglik_under_lngb(true, ours)
        at_reference = expected_rival_loglik_under_lngb(true, KwParams(0.6667, 2.0968))
        assert at_ours > at_reference


class TestPseudoTrueKw:
    def test_nested(self):
        pt = pseudo_true_kw(LngbParams(1.0, 1.5, 1.0))
        assert pt.alpha == pytest.approx(1.0, abs=1e-6)
        assert pt.delta == pytest.approx(1.5, abs=1e-6)

    def test_frozen_regression(self):
        # value triple-validated: profile solve, direct 2-d maximization, and
        # the MLE on 2x10^6 simulated draws all agree
        pt = pseudo_true_kw(LngbParams(1.2, 1.5, 0.7))
        assert pt.alpha == pytest.approx(1.3270395, rel=1e-5)
        assert pt.delta == pytest.approx(1.3278482, rel=1e-5)

    def test_optimality_under_perturbation(self):
        true = LngbParams(1.2, 1.5, 1.2)
        pt = pseudo_true_kw(true)
        base = expected_rival_loglik_under_lngb(true, pt)
        for f in (0.99, 1.01):
            assert expected_rival_loglik_under_lngb(true, KwParams(pt.alpha * f, pt.delta)) < base
            assert expected_rival_loglik_under_lngb(true, KwParams(pt.alpha, pt.delta * f)) < base


class TestPseudoTrueLngb:
    def test_nested(self):
        pt = pseudo_true_lngb(KwParams(1.0, 2.5))
        assert pt.a == pytest.approx(1.0, abs=1e-5)
        assert pt.b == pytest.approx(2.5, abs=1e-5)
        assert pt.beta == pytest.approx(1.0, abs=1e-5)

    def test_frozen_regression(self):
        pt = pseudo_true_lngb(KwParams(0.7, 2.4))
        assert pt.a == pytest.approx(0.677406, rel=1e-4)
        assert pt.b == pytest.approx(2.283249, rel=1e-4)
        assert pt.beta == pytest.approx(1.225790, rel=1e-4)

    def test_dominates_nested_start_for_alpha_one(self):
        true = KwParams(1.0, 1.8)
        pt = pseudo_true_lngb(true)
        E = lambda p: _expected_lngb_loglik_under_kw(true, p)
        assert E(pt) >= E(LngbParams(1.0, 1.8, 1.0)) - 1e-10

    def test_optimality_under_perturbation(self):
        true = KwParams(0.7, 2.4)
        pt = pseudo_true_lngb(true)
        base = _expected_lngb_loglik_under_kw(true, pt)
        for f in (0.99, 1.01):
            assert _expected_lngb_loglik_under_kw(true, LngbParams(pt.a * f, pt.b, pt.beta)) < base
            assert _expected_lngb_loglik_under_kw(true, LngbParams(pt.a, pt.b * f, pt.beta)) < base
            assert _expected_lngb_loglik_under_kw(true, LngbParams(pt.a, pt.b, pt.beta * f)) < base


def _expected_lngb_loglik_under_kw(true: KwParams, rival: LngbParams) -> float:
    from kwlngb.distributions import kw_pdf_xc, lngb_log_pdf_xc
    from kwlngb.specfun import ComplementAware, integrate_unit
    return integrate_unit(ComplementAware(
        lambda x, c: lngb_log_pdf_xc(rival, x, c) * kw_pdf_xc(true, x, c)))


class TestNullAnalysis:
    def test_lngb_null_frozen(self):
        an = null_analysis(lngb_null(1.2, 1.5, 0.7))
        assert an.m_per_obs == pytest.approx(0.00153633, rel=1e-3)
        assert an.var_per_obs == pytest.approx(0.00306419, rel=1e-3)

    def test_kw_null_frozen(self):
        an = null_analysis(kw_null(0.7, 2.4))
        assert an.m_per_obs == pytest.approx(-7.224e-05, rel=1e-2)
        assert an.var_per_obs == pytest.approx(1.4257e-04, rel=1e-2)

    def test_nested_null_degenerates(self):
        an = null_analysis(kw_null(1.0, 2.5))
        assert abs(an.m_per_obs) <= 1e-8
        assert an.var_per_obs <= 1e-8

    @pytest.mark.parametrize("params", [(0.5, 0.8, 0.5), (0.5, 0.8, 2.0),
                                        (2.0, 1.3, 0.5), (2.0, 1.3, 2.0)])
    def test_kl_sign_lngb_nulls(self, params):
        an = null_analysis(lngb_null(*params))
        assert an.m_per_obs >= -1e-9
        assert an.var_per_obs >= 0.0

    @pytest.mark.parametrize("params", [(0.5, 0.8), (0.5, 2.2), (2.0, 0.8), (2.0, 2.2)])
    def test_kl_sign_kw_nulls(self, params):
        an = null_analysis(kw_null(*params))
        assert an.m_per_obs <= 1e-9


class TestPcs:
    def test_nested_is_exactly_half(self):
        an = null_analysis(kw_null(1.0, 2.5))
        assert pcs_kw(an, 100) == 0.5
        an2 = null_analysis(lngb_null(1.0, 2.5, 1.0))
        assert pcs_lngb(an2, 100) == 0.5

    def test_frozen_value(self):
        an = null_analysis(kw_null(0.5, 2.5))
        assert pcs_kw(an, 100) == pytest.approx(0.5660206, abs=2e-5)

    def test_monotone_in_n_and_range(self):
        an = null_analysis(kw_null(0.5, 2.5))
        vals = [pcs_kw(an, n) for n in (10, 50, 200, 1000, 10_000)]
        assert all(0.5 <= v < 1.0 for v in vals)
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_family_tag_enforced(self):
        an = null_analysis(kw_null(0.5, 2.5))
        with pytest.raises(UsageError):
            pcs_lngb(an, 100)

    def test_n_validation(self):
        an = null_analysis(kw_null(0.5, 2.5))
        with pytest.raises(DomainError):
            pcs_kw(an, 0)


def _manual_fit(model, params, ll, fingerprint, n=10):
    return FitResult(model, params, ll, True, 1, 0.0, -2 * ll + 4, -2 * ll + 4, n, fingerprint)


class TestWStatistic:
    def test_difference_and_zero(self):
        s = Sample(np.array([0.2, 0.5, 0.8]))
        kf = _manual_fit("kw", KwParams(1, 1), 3.25, s.fingerprint)
        lf = _manual_fit("lngb", LngbParams(1, 1, 1), 3.25, s.fingerprint)
        assert w_statistic(s, kf, lf) == 0.0
        lf2 = _manual_fit("lngb", LngbParams(1, 1, 1), 5.5, s.fingerprint)
        assert w_statistic(s, kf, lf2) == 5.5 - 3.25

    def test_fingerprint_mismatch(self):
        s = Sample(np.array([0.2, 0.5, 0.8]))
        other = Sample(np.array([0.3, 0.5, 0.8]))
        kf = _manual_fit("kw", KwParams(1, 1), 0.0, other.fingerprint)
        lf = _manual_fit("lngb", LngbParams(1, 1, 1), 0.0, s.fingerprint)
        with pytest.raises(UsageError):
            w_statistic(s, kf, lf)

    def test_model_order_enforced(self):
        s = Sample(np.array([0.2, 0.5, 0.8]))
        kf = _manual_fit("kw", KwParams(1, 1), 0.0, s.fingerprint)
        lf = _manual_fit("lngb", LngbParams(1, 1, 1), 0.0, s.fingerprint)
        with pytest.raises(UsageError):
            w_statistic(s, lf, kf)


class TestSelectModel:
    def test_report_invariants(self):
        s = kw_sample(KwParams(0.2, 2.5), 300, np.random.default_rng(42))
        rep = select_model(s)
        assert rep.w_n == rep.lngb_fit.log_likelihood - rep.kw_fit.log_likelihood
        assert rep.selected in ("KW", "LNGB")
        assert 0.5 <= rep.pcs_kw < 1.0
        assert 0.5 <= rep.pcs_lngb < 1.0

    @pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
    def test_rules_agree_across_samples(self, seed):
        rng = np.random.default_rng(seed)
        s = lngb_sample(LngbParams(0.6, 1.4, 2.0), 150, rng)
        rep = select_model(s)  # the internal assertion hunts disagreement
        assert rep.selected in ("KW", "LNGB")

    def test_fallback_on_nonconvergence(self, monkeypatch):
        import kwlngb.discrimination as disc
        s = kw_sample(KwParams(0.5, 2.5), 100, np.random.default_rng(3))
        real = fit_lngb(s)
        broken = FitResult("lngb", real.params, real.log_likelihood, False,
                           real.iterations, real.gradient_norm, real.aic, real.bic,
                           real.n, real.sample_fingerprint)
        monkeypatch.setattr(disc, "fit_lngb", lambda sample: broken)
        rep = disc.select_model(s)
        assert any("sign of W_n" in w for w in rep.warnings)
        expected = "LNGB" if rep.w_n > 0 else "KW"
        assert rep.selected == expected
        assert math.isnan(rep.pcs_kw) and math.isnan(rep.pcs_lngb)


class TestMinSampleSize:
    def analysis(self, m=0.01, var=0.04):
        return NullAnalysis(kw_null(2.0, 2.5), LngbParams(1, 1, 1), -m, var)

    def test_half_gives_one(self):
        assert min_sample_size(self.analysis(), 0.5).n_required == 1

    def test_strictly_increasing_over_quarter_grid(self):
        an = null_analysis(kw_null(2.0, 2.5))
        ns = [min_sample_size(an, p).n_required for p in (0.25, 0.55, 0.75)]
        assert ns[0] < ns[1] < ns[2]

    def test_var_doubling_doubles_n(self):
        n1 = min_sample_size(self.analysis(var=0.04), 0.9).n_required
        n2 = min_sample_size(self.analysis(var=0.08), 0.9).n_required
        assert abs(n2 - 2 * n1) <= 1

    def test_corrected_formula(self):
        from kwlngb.specfun import std_normal_quantile
        an = self.analysis(m=0.002, var=0.05)
        z = std_normal_quantile(0.8)
        expect = math.ceil(z * z * 0.05 / 0.002 ** 2)
        assert min_sample_size(an, 0.8).n_required == expect

    def test_paper_formula_variant(self):
        from kwlngb.specfun import std_normal_quantile
        an = self.analysis(m=0.002, var=0.05)
        z = std_normal_quantile(0.8)
        expect = math.ceil(z * z * 0.05 / 0.002)
        assert min_sample_size(an, 0.8, paper_formula=True).n_required == expect

    def test_nested_infeasible(self):
        an = NullAnalysis(kw_null(1.0, 2.5), LngbParams(1, 2.5, 1), 0.0, 0.0)
        with pytest.raises(InfeasibleError):
            min_sample_size(an, 0.8)

    def test_monotone_in_p(self):
        an = self.analysis()
        prev = 0
        for p in (0.5, 0.6, 0.7, 0.8, 0.9, 0.99):
            n = min_sample_size(an, p).n_required
            assert n >= prev
            prev = n

    def test_p_domain(self):
        for p in (0.0, 1.0, -0.5, 2.0):
            with pytest.raises(DomainError):
                min_sample_size(self.analysis(), p)

    def test_tolerance_distance_passthrough(self):
        res = min_sample_size(self.analysis(), 0.75, tolerance_distance=0.0211)
        assert res.tolerance_distance == 0.0211
