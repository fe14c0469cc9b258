"""Likelihood-ratio discrimination machinery.

The test statistic is ``W_n = loglik_LNGB(fit) - loglik_KW(fit)``. Under a
declared null, the per-observation log-ratio

    g(x) = log f_LNGB(x; .) - log f_KW(x; .)

is always taken with the true family at its true parameters and the rival
family at its pseudo-true (Kullback-Leibler projection) parameters, so

    m = E_true[g]    is  +KL >= 0 under an LNGB null,
                         -KL <= 0 under a KW null,

and both probabilities of correct selection land in [0.5, 1):

    PCS_LNGB(n) = Phi(+sqrt(n) m / sd),   PCS_KW(n) = Phi(-sqrt(n) m / sd).

Expectations are evaluated by tanh-sinh quadrature on (0,1); pseudo-true
parameters are the maximizers of the expected rival log-likelihood, found
by the same profile / log-reparameterized quasi-Newton structure as the
sample fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize as _opt
from scipy import special as _sp

from .distributions import (KwParams, LngbParams, Sample, kw_log_pdf_xc,
                            kw_pdf_xc, lngb_log_pdf_xc, lngb_pdf_xc)
from .errors import DomainError, InfeasibleError, NumericError, UsageError
from .fit import FitResult, fit_kw, fit_lngb
from .specfun import (DEFAULT_QUADRATURE, ComplementAware, QuadratureSpec,
                      integrate_unit, std_normal_cdf, std_normal_quantile)

__all__ = [
    "NullHypothesis",
    "NullAnalysis",
    "DiscriminationReport",
    "SampleSizeResult",
    "kw_null",
    "lngb_null",
    "w_statistic",
    "expected_rival_loglik_under_lngb",
    "pseudo_true_kw",
    "pseudo_true_lngb",
    "null_analysis",
    "pcs_lngb",
    "pcs_kw",
    "select_model",
    "min_sample_size",
    "STATIONARITY_TOL",
    "VAR_FLOOR",
]

# stationarity residual demanded of pseudo-true solves (per-observation units)
STATIONARITY_TOL = 1e-7
# below this variance the null is treated as nested/degenerate: PCS = 1/2
VAR_FLOOR = 1e-12
_WEAK_PCS = 0.55


@dataclass(frozen=True)
class NullHypothesis:
    family: str  # "kw" | "lngb"
    params: KwParams | LngbParams

    def __post_init__(self) -> None:
        if self.family == "kw":
            if not isinstance(self.params, KwParams):
                raise DomainError("a KW null needs KwParams")
        elif self.family == "lngb":
            if not isinstance(self.params, LngbParams):
                raise DomainError("an LNGB null needs LngbParams")
        else:
            raise DomainError(f"unknown family {self.family!r}")


def kw_null(alpha: float, delta: float) -> NullHypothesis:
    return NullHypothesis("kw", KwParams(alpha, delta))


def lngb_null(a: float, b: float, beta: float) -> NullHypothesis:
    return NullHypothesis("lngb", LngbParams(a, b, beta))


@dataclass(frozen=True)
class NullAnalysis:
    """Pseudo-true rival parameters plus the (mean, variance) of the
    per-observation log-ratio under the declared null."""

    null: NullHypothesis
    pseudo_true: KwParams | LngbParams
    m_per_obs: float
    var_per_obs: float


@dataclass(frozen=True)
class SampleSizeResult:
    protection_level: float
    n_required: int
    tolerance_distance: float | None = None


@dataclass(frozen=True)
class DiscriminationReport:
    kw_fit: FitResult
    lngb_fit: FitResult
    w_n: float
    pcs_lngb: float
    pcs_kw: float
    selected: str  # "KW" | "LNGB"
    warnings: tuple[str, ...] = ()
    kw_analysis: NullAnalysis | None = None
    lngb_analysis: NullAnalysis | None = None


# -- expectations under a fixed law -------------------------------------------

class _Expect:
    """E[h] under a fixed density, by complement-aware tanh-sinh quadrature."""

    def __init__(self, pdf_xc: Callable, quad: QuadratureSpec):
        self.pdf_xc = pdf_xc
        self.quad = quad

    def __call__(self, h_xc: Callable) -> float:
        return integrate_unit(
            ComplementAware(lambda x, c: h_xc(x, c) * self.pdf_xc(x, c)), self.quad)


def _expect_under(null: NullHypothesis, quad: QuadratureSpec) -> _Expect:
    if null.family == "kw":
        return _Expect(lambda x, c: kw_pdf_xc(null.params, x, c), quad)
    return _Expect(lambda x, c: lngb_pdf_xc(null.params, x, c), quad)


def _log_x(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.where(x < 0.5, np.log(x), np.log1p(-np.minimum(c, 0.5)))


def expected_rival_loglik_under_lngb(true: LngbParams, rival: KwParams,
                                     quad: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """E_LNGB(true)[ log f_KW(X; rival) ]."""
    E = _Expect(lambda x, c: lngb_pdf_xc(true, x, c), quad)
    return E(lambda x, c: kw_log_pdf_xc(rival, x, c))


# -- pseudo-true parameters ----------------------------------------------------

def _pseudo_true_kw_from_expect(E: _Expect) -> KwParams:
    """KL projection onto the KW family given an expectation operator."""
    e_log_x = E(_log_x)

    def t_of(alpha: float) -> float:
        # E[log(1 - X**alpha)]
        return E(lambda x, c: np.log(-np.expm1(alpha * _log_x(x, c))))

    def neg_profile(log_alpha: float) -> float:
        alpha = math.exp(log_alpha)
        t = t_of(alpha)
        if not (math.isfinite(t) and t < 0.0):
            return 1e300
        delta = -1.0 / t
        return -(math.log(alpha) + math.log(delta) + (alpha - 1.0) * e_log_x - 1.0 - t)

    res = _opt.minimize_scalar(neg_profile, bounds=(-16.0, 16.0), method="bounded",
                               options={"xatol": 1e-13})
    alpha = math.exp(res.x)

    def score_alpha(alpha: float) -> float:
        t = t_of(alpha)
        delta = -1.0 / t
        u = E(lambda x, c: np.exp(alpha * _log_x(x, c)) * _log_x(x, c)
              / (-np.expm1(alpha * _log_x(x, c))))
        return 1.0 / alpha + e_log_x - (delta - 1.0) * u

    sc = score_alpha(alpha)
    if abs(sc) > 0.0:
        step = 1e-7 * max(alpha, 1.0)
        lo, hi = alpha - step, alpha + step
        f_lo, f_hi = score_alpha(lo), score_alpha(hi)
        for _ in range(60):
            if f_lo * f_hi < 0:
                break
            step *= 4.0
            lo, hi = max(alpha - step, alpha * 0.5), alpha + step
            f_lo, f_hi = score_alpha(lo), score_alpha(hi)
        if f_lo * f_hi < 0:
            alpha = _opt.brentq(score_alpha, lo, hi, xtol=1e-15, rtol=1e-15)

    t = t_of(alpha)
    delta = -1.0 / t
    resid = abs(score_alpha(alpha))
    if not math.isfinite(resid) or resid > STATIONARITY_TOL:
        raise NumericError(
            f"pseudo-true KW solve left stationarity residual {resid:.3e} > {STATIONARITY_TOL}")
    return KwParams(alpha, delta)


def pseudo_true_kw(true: LngbParams,
                   quad: QuadratureSpec = DEFAULT_QUADRATURE) -> KwParams:
    """Almost-sure limit of the KW MLE when the data are LNGB(true)."""
    null = lngb_null(true.a, true.b, true.beta)
    return _pseudo_true_kw_from_expect(_expect_under(null, quad))


def _pseudo_true_lngb_from_expect(E: _Expect) -> LngbParams:
    """KL projection onto the LNGB family given an expectation operator."""
    e_log_x = E(_log_x)
    e_log_1mx = E(lambda x, c: np.log(c))
    cache: dict[float, tuple[float, float]] = {}

    def kernel_moments(beta: float) -> tuple[float, float]:
        # (E[log(1-(1-beta)X)], E[X / (1-(1-beta)X)]); 1-(1-b)x == b+(1-b)c
        if beta not in cache:
            k = E(lambda x, c: np.log(beta + (1.0 - beta) * c))
            r = E(lambda x, c: x / (beta + (1.0 - beta) * c))
            cache[beta] = (k, r)
        return cache[beta]

    def objective(v: np.ndarray) -> float:
        a, b, beta = np.exp(v)
        k, _ = kernel_moments(float(beta))
        return (a * math.log(beta) - float(_sp.betaln(a, b))
                + (a - 1.0) * e_log_x + (b - 1.0) * e_log_1mx - (a + b) * k)

    def grad(v: np.ndarray) -> np.ndarray:
        a, b, beta = np.exp(v)
        k, r = kernel_moments(float(beta))
        d_a = math.log(beta) - float(_sp.psi(a)) + float(_sp.psi(a + b)) + e_log_x - k
        d_b = -float(_sp.psi(b)) + float(_sp.psi(a + b)) + e_log_1mx - k
        d_beta = a / beta - (a + b) * r
        return np.array([d_a, d_b, d_beta]) * np.exp(v)

    bounds = [(-18.0, 18.0), (-18.0, 18.0), (-math.log(1e6), math.log(1e6))]
    best_v, best_f = None, -math.inf
    for start in (np.zeros(3), np.array([0.5, 0.5, 0.5]), np.array([-0.5, -0.5, -0.5])):
        res = _opt.minimize(lambda v: -objective(v), start,
                            jac=lambda v: -grad(v), method="L-BFGS-B",
                            bounds=bounds, options={"maxiter": 600, "ftol": 1e-16,
                                                    "gtol": 1e-12})
        if -res.fun > best_f:
            best_f, best_v = -res.fun, res.x.copy()

    v = best_v
    for _ in range(40):  # Newton polish on the stationarity system
        g = grad(v)
        if np.linalg.norm(g) <= 0.1 * STATIONARITY_TOL:
            break
        h = np.empty((3, 3))
        for j in range(3):
            step = 1e-6 * max(1.0, abs(v[j]))
            vp, vm = v.copy(), v.copy()
            vp[j] += step
            vm[j] -= step
            h[:, j] = (grad(vp) - grad(vm)) / (2 * step)
        h = 0.5 * (h + h.T)
        try:
            delta_v = np.linalg.solve(h, -g)
        except np.linalg.LinAlgError:
            break
        scale, f_here, moved = 1.0, objective(v), False
        for _bt in range(25):
            cand = np.clip(v + scale * delta_v, [b[0] for b in bounds], [b[1] for b in bounds])
            if objective(cand) >= f_here:
                v, moved = cand, True
                break
            scale *= 0.5
        if not moved:
            break

    resid = float(np.linalg.norm(grad(v)))
    if not math.isfinite(resid) or resid > STATIONARITY_TOL:
        raise NumericError(
            f"pseudo-true LNGB solve left stationarity residual {resid:.3e} > {STATIONARITY_TOL}")
    a, b, beta = np.exp(v)
    return LngbParams(float(a), float(b), float(beta))


def pseudo_true_lngb(true: KwParams,
                     quad: QuadratureSpec = DEFAULT_QUADRATURE) -> LngbParams:
    """Almost-sure limit of the LNGB MLE when the data are KW(true)."""
    null = kw_null(true.alpha, true.delta)
    return _pseudo_true_lngb_from_expect(_expect_under(null, quad))


# -- null analysis and PCS -----------------------------------------------------

def null_analysis(h: NullHypothesis,
                  quad: QuadratureSpec = DEFAULT_QUADRATURE) -> NullAnalysis:
    """Pseudo-true rival parameters and per-observation log-ratio moments."""
    E = _expect_under(h, quad)
    if h.family == "lngb":
        rival = _pseudo_true_kw_from_expect(E)
        lngb_p, kw_p = h.params, rival
    else:
        rival = _pseudo_true_lngb_from_expect(E)
        lngb_p, kw_p = rival, h.params

    def g(x, c):
        return lngb_log_pdf_xc(lngb_p, x, c) - kw_log_pdf_xc(kw_p, x, c)

    m = E(g)
    second = E(lambda x, c: g(x, c) ** 2)
    var = max(second - m * m, 0.0)
    return NullAnalysis(h, rival, m, var)


def _drift(analysis: NullAnalysis) -> float:
    """Standardized per-observation drift favouring the declared null.

    The KL convention makes the drift non-negative up to quadrature dust;
    the clamp removes that dust so PCS lands in [0.5, 1) exactly.
    """
    if analysis.var_per_obs <= VAR_FLOOR:
        return 0.0
    d = analysis.m_per_obs / math.sqrt(analysis.var_per_obs)
    return max(0.0, d if analysis.null.family == "lngb" else -d)


def pcs_lngb(analysis: NullAnalysis, n: int) -> float:
    """Phi(sqrt(n) M / sd) under an LNGB null; 1/2 when the null is nested."""
    if analysis.null.family != "lngb":
        raise UsageError("pcs_lngb needs an analysis computed under an LNGB null")
    if n < 1:
        raise DomainError("n must be a positive integer")
    return std_normal_cdf(math.sqrt(n) * _drift(analysis))


def pcs_kw(analysis: NullAnalysis, n: int) -> float:
    """Phi(-sqrt(n) M / sd) under a KW null; 1/2 when the null is nested."""
    if analysis.null.family != "kw":
        raise UsageError("pcs_kw needs an analysis computed under a KW null")
    if n < 1:
        raise DomainError("n must be a positive integer")
    return std_normal_cdf(math.sqrt(n) * _drift(analysis))


# -- the statistic, selection and sample size ----------------------------------

def w_statistic(s: Sample, kw_fit: FitResult, lngb_fit: FitResult) -> float:
    """W_n = maximized LNGB log-likelihood minus maximized KW log-likelihood."""
    if kw_fit.model != "kw" or lngb_fit.model != "lngb":
        raise UsageError("w_statistic needs one KW fit and one LNGB fit, in that order")
    if kw_fit.sample_fingerprint != s.fingerprint or lngb_fit.sample_fingerprint != s.fingerprint:
        raise UsageError("fit results come from a different sample than the one supplied")
    return lngb_fit.log_likelihood - kw_fit.log_likelihood


def select_model(s: Sample, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> DiscriminationReport:
    """Fit both families, compute both plug-in PCS values and select.

    Rule: KW when PCS_LNGB(lngb fit) < PCS_KW(kw fit), otherwise LNGB. The
    equivalent variance-weighted comparison of the two drifts is evaluated
    alongside and must agree. If either fit failed to converge the selection
    falls back to the sign of W_n and says so in the warnings.
    """
    kfit = fit_kw(s)
    lfit = fit_lngb(s)
    w_n = w_statistic(s, kfit, lfit)
    warnings: list[str] = []

    if not (kfit.converged and lfit.converged):
        warnings.append("fit did not converge; selection falls back to the sign of W_n")
        selected = "LNGB" if w_n > 0 else "KW"
        return DiscriminationReport(kfit, lfit, w_n, math.nan, math.nan,
                                    selected, tuple(warnings))

    ka = null_analysis(kw_null(kfit.params.alpha, kfit.params.delta), quad)
    la = null_analysis(lngb_null(lfit.params.a, lfit.params.b, lfit.params.beta), quad)
    n = s.n
    p_l = pcs_lngb(la, n)
    p_k = pcs_kw(ka, n)
    selected = "KW" if p_l < p_k else "LNGB"

    # equivalent variance-weighted rule: -M_kw * sd_lngb > M_lngb * sd_kw => KW
    lhs = -ka.m_per_obs * math.sqrt(max(la.var_per_obs, 0.0))
    rhs = la.m_per_obs * math.sqrt(max(ka.var_per_obs, 0.0))
    selected_by_weighting = "KW" if lhs > rhs else "LNGB"
    assert selected_by_weighting == selected, \
        "PCS comparison and variance-weighted comparison disagree"

    if max(p_l, p_k) < _WEAK_PCS:
        warnings.append("weakly separated: both PCS values are near 1/2")
    return DiscriminationReport(kfit, lfit, w_n, p_l, p_k, selected,
                                tuple(warnings), kw_analysis=ka, lngb_analysis=la)


def min_sample_size(analysis: NullAnalysis, p: float,
                    tolerance_distance: float | None = None,
                    paper_formula: bool = False) -> SampleSizeResult:
    """Smallest n with asymptotic PCS >= p under the analysed null.

    Inverting Phi(sqrt(n) |M|/sd) = p gives n = z_p**2 * Var / M**2 (the
    mean enters squared). ``paper_formula=True`` reproduces the literature
    variant with |M| unsquared in the denominator, for table comparison.
    Any n achieves PCS >= 1/2, so p <= 1/2 returns n = 1.
    """
    if not (0.0 < p < 1.0):
        raise DomainError(f"protection level p must lie in (0, 1), got {p!r}")
    if analysis.var_per_obs <= VAR_FLOOR or abs(analysis.m_per_obs) < 1e-14:
        raise InfeasibleError("models indistinguishable at this tolerance: "
                              "the null is (numerically) nested, no sample size suffices")
    if p <= 0.5:
        return SampleSizeResult(p, 1, tolerance_distance)
    z = std_normal_quantile(p)
    denom = analysis.m_per_obs ** 2 if not paper_formula else abs(analysis.m_per_obs)
    n = max(1, math.ceil(z * z * analysis.var_per_obs / denom))
    return SampleSizeResult(p, n, tolerance_distance)
