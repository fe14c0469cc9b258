"""Pseudo-distance measures between a KW and an LNGB law.

Quadrature is the authoritative evaluator for every measure; the printed
closed forms survive only as cross-check evaluators on the parameter slice
where they are mathematically exact (alpha = 1; see the closed-form
docstrings). The Hellinger value is reported in the definitional
convention H = 2 - 2 * affinity, with the alternative 1 - affinity carried
alongside, because the two printed conventions disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .distributions import (KwParams, LngbParams, kw_cdf, kw_log_pdf_xc,
                            lngb_cdf, lngb_log_pdf_xc)
from .errors import DomainError, InfeasibleError, NumericError
from .specfun import (DEFAULT_QUADRATURE, ComplementAware, QuadratureSpec,
                      gauss_2f1, gauss_2f1_regularized, integrate_unit,
                      log_beta, log_gamma)

__all__ = [
    "DivergenceResult",
    "affinity",
    "hellinger",
    "hellinger_closed_form",
    "power_divergence",
    "power_divergence_closed_form",
    "ks_distance",
    "KW_FROM_LNGB",
    "LNGB_FROM_KW",
]

KW_FROM_LNGB = "kw-from-lngb"  # divergence of KW from LNGB: f = KW, g = LNGB
LNGB_FROM_KW = "lngb-from-kw"


@dataclass(frozen=True)
class DivergenceResult:
    measure: str
    value: float
    method: str
    detail: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or self.value < -1e-12:
            raise NumericError(f"divergence value {self.value!r} is not admissible")
        object.__setattr__(self, "detail", MappingProxyType(dict(self.detail)))


def affinity(kw: KwParams, lngb: LngbParams,
             quad: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Bhattacharyya coefficient: integral of sqrt(f_KW * f_LNGB) over (0,1)."""
    def integrand(x, c):
        return np.exp(0.5 * (kw_log_pdf_xc(kw, x, c) + lngb_log_pdf_xc(lngb, x, c)))
    return integrate_unit(ComplementAware(integrand), quad)


def hellinger(kw: KwParams, lngb: LngbParams,
              quad: QuadratureSpec = DEFAULT_QUADRATURE) -> DivergenceResult:
    """Hellinger distance by quadrature, both printed conventions reported.

    ``value`` follows the definitional form 2 - 2 * affinity; the detail
    carries the affinity itself and the alternative 1 - affinity.
    """
    a = affinity(kw, lngb, quad)
    return DivergenceResult("hellinger", 2.0 - 2.0 * a, "quadrature",
                            {"affinity": a, "one_minus_affinity": 1.0 - a})


def hellinger_closed_form(kw: KwParams, lngb: LngbParams) -> float:
    """Closed-form affinity via the Euler integral and a regularized 2F1.

    sqrt(alpha*delta*beta**a/B(a,b)) * Gamma((a+alpha)/2) * Gamma((b+delta)/2)
      * 2F1reg((a+b)/2, (a+alpha)/2; (a+b+alpha+delta)/2; 1-beta)

    Exact when alpha = 1, where sqrt(f_KW) carries (1-x) to the power
    (delta-1)/2 and the integrand is an Euler kernel; for alpha != 1 the
    expression is only the formal continuation of that computation and does
    NOT equal the affinity (callers should fall back to quadrature).
    """
    a, b, beta = lngb.a, lngb.b, lngb.beta
    alpha, delta = kw.alpha, kw.delta
    r = 0.5 * (a + b + alpha + delta)
    f = gauss_2f1_regularized(0.5 * (a + b), 0.5 * (a + alpha), r, 1.0 - beta)
    if f <= 0.0:
        raise NumericError("regularized 2F1 evaluated non-positive; affinity undefined here")
    log_val = (0.5 * (math.log(alpha) + math.log(delta) + a * math.log(beta)
                      - log_beta(a, b))
               + log_gamma(0.5 * (a + alpha)) + log_gamma(0.5 * (b + delta))
               + math.log(f))
    return math.exp(log_val)


def _pwd_tail_exponents(kw: KwParams, lngb: LngbParams, lam: float,
                        direction: str) -> tuple[float, float]:
    """x**(e0-1) and (1-x)**(e1-1) exponents of the PWD integrand at 0 and 1."""
    if direction == KW_FROM_LNGB:
        e0 = lam * (kw.alpha - lngb.a) + kw.alpha
        e1 = lam * (kw.delta - lngb.b) + kw.delta
    elif direction == LNGB_FROM_KW:
        e0 = lam * (lngb.a - kw.alpha) + lngb.a
        e1 = lam * (lngb.b - kw.delta) + lngb.b
    else:
        raise DomainError(f"direction must be {KW_FROM_LNGB!r} or {LNGB_FROM_KW!r}, "
                          f"got {direction!r}")
    return e0, e1


def power_divergence(kw: KwParams, lngb: LngbParams, lam: float,
                     direction: str = KW_FROM_LNGB,
                     quad: QuadratureSpec = DEFAULT_QUADRATURE) -> DivergenceResult:
    """Cressie-Read power divergence of order ``lam`` between the two laws.

    PWD(f, g; lam) = 1/(lam*(lam+1)) * integral of ((f/g)**lam - 1) * f.
    The orders lam = 0 and lam = -1 are evaluated as their analytic limits,
    the directed Kullback-Leibler divergences KL(f||g) and KL(g||f).
    Integrability is checked through the endpoint tail exponents first.
    """
    if not math.isfinite(lam):
        raise DomainError(f"lambda must be finite, got {lam!r}")
    e0, e1 = _pwd_tail_exponents(kw, lngb, lam, direction)
    if e0 <= 0.0 or e1 <= 0.0:
        end = "x -> 0" if e0 <= 0.0 else "x -> 1"
        raise InfeasibleError(
            f"power divergence of order {lam} diverges at {end}: "
            f"integrand tail exponent {min(e0, e1):.6g} - 1 <= -1")

    if direction == KW_FROM_LNGB:
        log_f = lambda x, c: kw_log_pdf_xc(kw, x, c)
        log_g = lambda x, c: lngb_log_pdf_xc(lngb, x, c)
    else:
        log_f = lambda x, c: lngb_log_pdf_xc(lngb, x, c)
        log_g = lambda x, c: kw_log_pdf_xc(kw, x, c)

    if lam == 0.0:  # KL(f || g)
        def integrand(x, c):
            d = log_f(x, c) - log_g(x, c)
            return d * np.exp(log_f(x, c))
    elif lam == -1.0:  # KL(g || f)
        def integrand(x, c):
            d = log_g(x, c) - log_f(x, c)
            return d * np.exp(log_g(x, c))
    else:
        def integrand(x, c):
            d = log_f(x, c) - log_g(x, c)
            return np.expm1(lam * d) * np.exp(log_f(x, c)) / (lam * (lam + 1.0))

    value = integrate_unit(ComplementAware(integrand), quad)
    return DivergenceResult("pwd", value, "quadrature",
                            {"lambda": lam, "direction_is_kw_from_lngb":
                             1.0 if direction == KW_FROM_LNGB else 0.0})


def power_divergence_closed_form(kw: KwParams, lngb: LngbParams, lam: float) -> float:
    """Closed-form PWD(KW; LNGB; lam) on the alpha = 1 slice.

    With alpha = 1 the moment integral of (f_KW/f_LNGB)**lam * f_KW is an
    Euler kernel:

      delta**(lam+1) * beta**(-a*lam) * B(a,b)**lam * B(c,d)
        * 2F1(-lam*(a+b), c; c+d; 1-beta),
      c = 1 + lam*(1-a),  d = delta*(lam+1) - b*lam,

    and PWD = (that - 1) / (lam*(lam+1)). Combinations with c <= 0 or
    d <= 0 hit gamma poles / divergent integrals and are refused, as is
    alpha != 1 where no closed form exists.
    """
    if lam in (0.0, -1.0):
        raise DomainError("limit orders 0 and -1 have no closed form; "
                          "use power_divergence")
    if not math.isclose(kw.alpha, 1.0, rel_tol=0.0, abs_tol=1e-12):
        raise InfeasibleError("closed-form power divergence exists only for alpha = 1")
    a, b, beta = lngb.a, lngb.b, lngb.beta
    delta = kw.delta
    c = 1.0 + lam * (1.0 - a)
    d = delta * (lam + 1.0) - b * lam
    if c <= 0.0 or d <= 0.0:
        raise InfeasibleError(
            f"gamma arguments non-positive (c={c:.6g}, d={d:.6g}); closed form infeasible")
    f21 = gauss_2f1(-lam * (a + b), c, c + d, 1.0 - beta)
    log_mag = ((lam + 1.0) * math.log(delta) - a * lam * math.log(beta)
               + lam * log_beta(a, b) + log_beta(c, d))
    moment = math.exp(log_mag) * f21
    return (moment - 1.0) / (lam * (lam + 1.0))


_KS_GRID = 4096
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def ks_distance(kw: KwParams, lngb: LngbParams) -> DivergenceResult:
    """sup_x |F_KW(x) - F_LNGB(x)| via a dense grid plus golden-section polish."""
    xs = np.linspace(0.0, 1.0, _KS_GRID + 2)[1:-1]
    gap = np.abs(kw_cdf(kw, xs) - lngb_cdf(lngb, xs))
    i = int(np.argmax(gap))
    lo = xs[i - 1] if i > 0 else 0.0
    hi = xs[i + 1] if i < xs.size - 1 else 1.0

    def d(x: float) -> float:
        return abs(float(kw_cdf(kw, x)) - float(lngb_cdf(lngb, x)))

    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    d1, d2 = d(x1), d(x2)
    while b - a > 1e-12:
        if d1 < d2:
            a, x1, d1 = x1, x2, d2
            x2 = a + _GOLDEN * (b - a)
            d2 = d(x2)
        else:
            b, x2, d2 = x2, x1, d1
            x1 = b - _GOLDEN * (b - a)
            d1 = d(x1)
    value = max(float(gap[i]), d(0.5 * (a + b)))
    return DivergenceResult("ks", value, "grid-refinement", {})
