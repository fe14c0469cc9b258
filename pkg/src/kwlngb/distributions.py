"""Parameter types, densities, CDFs, quantiles and exact samplers for the
two rival families on (0,1):

* Kumaraswamy KW(alpha, delta):  F(x) = 1 - (1 - x**alpha)**delta
* Libby-Novick generalized beta LNGB(a, b, beta):
  f(x) = beta**a / B(a,b) * x**(a-1) * (1-x)**(b-1) * (1-(1-beta)*x)**-(a+b)

LNGB(a, b, 1) is the classical Beta(a, b); KW(1, d), Beta(1, d) and
LNGB(1, d, 1) all coincide, which is the nested point where discrimination
degenerates.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import special as _sp

from .errors import DomainError
from .specfun import log_beta

__all__ = [
    "KwParams",
    "LngbParams",
    "Sample",
    "kw_log_pdf",
    "kw_cdf",
    "kw_quantile",
    "kw_sample",
    "lngb_log_pdf",
    "lngb_cdf",
    "lngb_quantile",
    "lngb_sample",
]


def _check_shape(value: float, name: str) -> None:
    if not (isinstance(value, (int, float, np.floating)) and math.isfinite(float(value))
            and float(value) > 0.0):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class KwParams:
    """Shape pair of the Kumaraswamy law."""

    alpha: float
    delta: float

    def __post_init__(self) -> None:
        _check_shape(self.alpha, "alpha")
        _check_shape(self.delta, "delta")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "delta", float(self.delta))


@dataclass(frozen=True)
class LngbParams:
    """Shape triple of the Libby-Novick generalized beta law."""

    a: float
    b: float
    beta: float

    def __post_init__(self) -> None:
        _check_shape(self.a, "a")
        _check_shape(self.b, "b")
        _check_shape(self.beta, "beta")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "beta", float(self.beta))


@dataclass(frozen=True)
class Sample:
    """Ordered observations, each strictly inside (0, 1).

    Boundary values are rejected rather than clamped: both families'
    log-densities are -inf at 0 and 1 and silent clamping would corrupt
    every likelihood-ratio statistic built on top.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1:
            arr = arr.reshape(-1)
        if arr.size < 1:
            raise DomainError("a sample needs at least one observation")
        if not np.all(np.isfinite(arr)):
            raise DomainError("sample contains non-finite values")
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            bad = np.where((arr <= 0.0) | (arr >= 1.0))[0]
            raise DomainError(
                f"observations must lie strictly inside (0,1); offending rows: {bad.tolist()[:10]}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @cached_property
    def log_values(self) -> np.ndarray:
        out = np.log(self.values)
        out.setflags(write=False)
        return out

    @cached_property
    def log1m_values(self) -> np.ndarray:
        out = np.log1p(-self.values)
        out.setflags(write=False)
        return out

    @cached_property
    def fingerprint(self) -> str:
        return hashlib.sha256(self.values.tobytes()).hexdigest()

    def __eq__(self, other) -> bool:  # dataclass default chokes on arrays
        return isinstance(other, Sample) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.fingerprint)


def _as_interior(x, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError(f"{name} must lie strictly inside (0, 1), got {x!r}")
    return arr


def _as_unit_closed(x, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}")
    return arr


def _ret(x, arr: np.ndarray):
    return float(arr) if np.isscalar(x) or np.ndim(x) == 0 else arr


# -- Kumaraswamy ------------------------------------------------------------

def _log1m_pow(alpha: float, log_x: np.ndarray) -> np.ndarray:
    """log(1 - x**alpha) from log(x), stable for x**alpha near 1."""
    return np.log(-np.expm1(alpha * log_x))


def kw_log_pdf(p: KwParams, x) -> float | np.ndarray:
    """Log-density of KW(alpha, delta) at interior points."""
    xa = _as_interior(x)
    lx = np.log(xa)
    out = (math.log(p.alpha) + math.log(p.delta) + (p.alpha - 1.0) * lx
           + (p.delta - 1.0) * _log1m_pow(p.alpha, lx))
    return _ret(x, out)


def kw_cdf(p: KwParams, x) -> float | np.ndarray:
    """F(x) = 1 - (1 - x**alpha)**delta on [0, 1]."""
    xa = _as_unit_closed(x)
    out = np.empty_like(xa)
    interior = (xa > 0.0) & (xa < 1.0)
    out[xa <= 0.0] = 0.0
    out[xa >= 1.0] = 1.0
    xi = xa[interior]
    out[interior] = -np.expm1(p.delta * _log1m_pow(p.alpha, np.log(xi)))
    return _ret(x, out)


def kw_quantile(p: KwParams, u) -> float | np.ndarray:
    """Inverse CDF: x = (1 - (1-u)**(1/delta))**(1/alpha) for u in (0, 1)."""
    ua = _as_interior(u, "u")
    # 1-(1-u)^{1/delta} = -expm1(log1p(-u)/delta), then the 1/alpha power in logs
    inner = -np.expm1(np.log1p(-ua) / p.delta)
    out = np.exp(np.log(inner) / p.alpha)
    return _ret(u, out)


def kw_sample(p: KwParams, count: int, rng: np.random.Generator) -> Sample:
    """Inverse-CDF sampling; deterministic given the generator state."""
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    out = np.empty(count)
    filled = 0
    while filled < count:
        u = rng.random(count - filled)
        x = np.exp(np.log(-np.expm1(np.log1p(-u) / p.delta)) / p.alpha)
        ok = (x > 0.0) & (x < 1.0)  # discard float-underflow draws, never clamp
        k = int(ok.sum())
        out[filled:filled + k] = x[ok]
        filled += k
    return Sample(out)


# -- Libby-Novick generalized beta -------------------------------------------

def lngb_log_pdf(p: LngbParams, x) -> float | np.ndarray:
    """Log-density of LNGB(a, b, beta) at interior points."""
    xa = _as_interior(x)
    out = (p.a * math.log(p.beta) - log_beta(p.a, p.b)
           + (p.a - 1.0) * np.log(xa)
           + (p.b - 1.0) * np.log1p(-xa)
           - (p.a + p.b) * np.log1p(-(1.0 - p.beta) * xa))
    return _ret(x, out)


def lngb_cdf(p: LngbParams, x) -> float | np.ndarray:
    """CDF via the monotone map t = beta*x / (1-(1-beta)*x) onto Beta(a, b)."""
    xa = _as_unit_closed(x)
    t = p.beta * xa / (1.0 - (1.0 - p.beta) * xa)
    t = np.clip(t, 0.0, 1.0)
    out = _sp.betainc(p.a, p.b, t)
    return _ret(x, out)


def lngb_quantile(p: LngbParams, u) -> float | np.ndarray:
    """Inverse CDF via the beta quantile: x = q / (beta + (1-beta)*q)."""
    ua = _as_interior(u, "u")
    q = _sp.betaincinv(p.a, p.b, ua)
    out = q / (p.beta + (1.0 - p.beta) * q)
    return _ret(u, out)


def lngb_sample(p: LngbParams, count: int, rng: np.random.Generator) -> Sample:
    """Draw q ~ Beta(a, b), return x = q / (beta + (1-beta)*q)."""
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    out = np.empty(count)
    filled = 0
    while filled < count:
        q = rng.beta(p.a, p.b, size=count - filled)
        x = q / (p.beta + (1.0 - p.beta) * q)
        ok = (x > 0.0) & (x < 1.0)
        k = int(ok.sum())
        out[filled:filled + k] = x[ok]
        filled += k
    return Sample(out)


# -- complement-aware forms for quadrature -----------------------------------
#
# integrate_unit hands integrands the exact complement c = 1-x; these
# variants route all (1-x)-type factors through c so endpoint-singular
# expectations keep full precision.

def _log_x_from_pair(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    # log(x) is exact near 0; log1p(-c) recovers full precision near 1.
    # The discarded branch is evaluated too, so keep it off the poles.
    return np.where(x < 0.5, np.log(x), np.log1p(-np.minimum(c, 0.5)))


def kw_log_pdf_xc(p: KwParams, x: np.ndarray, c: np.ndarray) -> np.ndarray:
    log_x = _log_x_from_pair(x, c)
    return (math.log(p.alpha) + math.log(p.delta) + (p.alpha - 1.0) * log_x
            + (p.delta - 1.0) * np.log(-np.expm1(p.alpha * log_x)))


def lngb_log_pdf_xc(p: LngbParams, x: np.ndarray, c: np.ndarray) -> np.ndarray:
    # 1-(1-beta)x == beta + (1-beta)c, no cancellation for any beta > 0
    return (p.a * math.log(p.beta) - log_beta(p.a, p.b)
            + (p.a - 1.0) * _log_x_from_pair(x, c)
            + (p.b - 1.0) * np.log(c)
            - (p.a + p.b) * np.log(p.beta + (1.0 - p.beta) * c))


def kw_pdf_xc(p: KwParams, x: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.exp(kw_log_pdf_xc(p, x, c))


def lngb_pdf_xc(p: LngbParams, x: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.exp(lngb_log_pdf_xc(p, x, c))
