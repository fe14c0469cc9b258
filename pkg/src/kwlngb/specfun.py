"""Special functions and adaptive quadrature on the unit interval.

Everything downstream (densities, expected log-likelihoods, divergence
integrals) is built on these primitives. Scalar special functions wrap
scipy.special behind explicit domain validation; the quadrature engine is
a tanh-sinh (double-exponential) scheme written here because endpoint
behaviour on (0,1) is the whole game for this library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special as _sp

from .errors import DomainError, NumericError, QuadratureError

__all__ = [
    "QuadratureSpec",
    "DEFAULT_QUADRATURE",
    "ComplementAware",
    "log_gamma",
    "digamma",
    "log_beta",
    "reg_inc_beta",
    "gauss_2f1",
    "gauss_2f1_regularized",
    "std_normal_cdf",
    "std_normal_quantile",
    "integrate_unit",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy contract for :func:`integrate_unit`.

    The returned estimate satisfies
    ``error <= max(absolute_tolerance, relative_tolerance * |result|)``
    or a :class:`QuadratureError` is raised.
    """

    absolute_tolerance: float = 1e-10
    relative_tolerance: float = 1e-9
    max_refinement_depth: int = 20

    def __post_init__(self) -> None:
        for name in ("absolute_tolerance", "relative_tolerance"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and positive, got {v!r}")
        if self.max_refinement_depth < 1:
            raise DomainError("max_refinement_depth must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


class ComplementAware:
    """Wrap an integrand ``f(x, c)`` that wants ``c = 1 - x`` exactly.

    Doubles cannot represent points closer to 1 than ~1e-16, so integrands
    with a singular factor at the upper endpoint (e.g. ``(1-x)**(b-1)`` with
    ``b < 1``) must be given the complement directly. The quadrature engine
    computes ``c`` from the node transform without cancellation.
    """

    def __init__(self, f: Callable[[np.ndarray, np.ndarray], np.ndarray]):
        self.f = f

    def __call__(self, x: np.ndarray, c: np.ndarray) -> np.ndarray:
        return self.f(x, c)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def _finite_positive(x: float, name: str) -> None:
    _require(isinstance(x, (int, float, np.floating)) and math.isfinite(float(x)) and float(x) > 0,
             f"{name} must be finite and > 0, got {x!r}")


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    _finite_positive(x, "x")
    return float(_sp.gammaln(x))


def digamma(x: float) -> float:
    """Psi(x) = d/dx ln Gamma(x) for x > 0."""
    _finite_positive(x, "x")
    return float(_sp.psi(x))


def log_beta(a: float, b: float) -> float:
    """ln B(a, b) for a, b > 0."""
    _finite_positive(a, "a")
    _finite_positive(b, "b")
    return float(_sp.betaln(a, b))


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta I_x(a, b) on x in [0, 1]."""
    _finite_positive(a, "a")
    _finite_positive(b, "b")
    _require(0.0 <= x <= 1.0, f"x must lie in [0, 1], got {x!r}")
    return float(_sp.betainc(a, b, x))


def gauss_2f1(p: float, q: float, r: float, z: float) -> float:
    """Gauss hypergeometric 2F1(p, q; r; z) for z < 1.

    Values below the series radius come out of the power series; elsewhere
    scipy's analytic-continuation transformations apply. Parameter
    combinations the continuation cannot handle raise NumericError.
    """
    for name, v in (("p", p), ("q", q), ("r", r), ("z", z)):
        _require(math.isfinite(float(v)), f"{name} must be finite, got {v!r}")
    _require(not (r <= 0 and float(r).is_integer()),
             f"r must not be a non-positive integer, got {r!r}")
    _require(z < 1.0, f"z must be < 1, got {z!r}")
    val = float(_sp.hyp2f1(p, q, r, z))
    if not math.isfinite(val):
        raise NumericError(
            f"2F1({p}, {q}; {r}; {z}) did not evaluate to a finite value "
            f"(got {val!r}); the series/continuation does not converge here")
    return val


def gauss_2f1_regularized(p: float, q: float, r: float, z: float) -> float:
    """Regularized 2F1(p, q; r; z) / Gamma(r), with the division in log space."""
    val = gauss_2f1(p, q, r, z)
    if val == 0.0:
        return 0.0
    sign = math.copysign(1.0, val)
    return sign * math.exp(math.log(abs(val)) - float(_sp.gammaln(r)))


def std_normal_cdf(z: float) -> float:
    """Standard normal CDF."""
    if math.isnan(float(z)):
        raise DomainError("z must not be NaN")
    if math.isinf(float(z)):
        return 0.0 if z < 0 else 1.0
    return float(_sp.ndtr(z))


def std_normal_quantile(p: float) -> float:
    """Standard normal quantile for p strictly inside (0, 1)."""
    _require(0.0 < p < 1.0, f"p must lie strictly inside (0, 1), got {p!r}")
    return float(_sp.ndtri(p))


# ---------------------------------------------------------------------------
# tanh-sinh quadrature on (0, 1)
# ---------------------------------------------------------------------------
#
# Substituting x = sigmoid(pi*sinh(t)) maps (0,1) to the real line and makes
# the trapezoid rule double-exponentially accurate, including for integrable
# power/log singularities at either endpoint:
#
#   int_0^1 f(x) dx = int_R f(x(t)) * pi*cosh(t) * x(t)*(1-x(t)) dt
#
# Nodes and the exact complements 1-x(t) follow from sigmoid(+-pi*sinh t);
# beyond |t| ~ 6.2 the node collapses to 0/1 in double precision and its
# weight has long since underflowed.

_T_MAX = 6.2
_LEVEL0_H = 0.5
_MAX_NODES_TOTAL = 1 << 23


def _nodes(ts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (x, complement, weight) for transform parameters ts."""
    z = np.pi * np.sinh(ts)
    x = _sp.expit(z)
    c = _sp.expit(-z)
    w = np.pi * np.cosh(ts) * x * c
    return x, c, w


def _eval_integrand(f, x: np.ndarray, c: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):  # finiteness is checked explicitly below
        if isinstance(f, ComplementAware):
            vals = f(x, c)
        else:
            try:
                vals = np.asarray(f(x), dtype=float)
                if vals.shape != x.shape:
                    raise ValueError
            except Exception:
                vals = np.array([float(f(xi)) for xi in x])
    vals = np.asarray(vals, dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = x[~np.isfinite(vals)]
        raise NumericError(
            f"integrand returned a non-finite value on (0,1), e.g. at x={bad.flat[0]!r}")
    return vals


def integrate_unit(f: Callable, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Integrate ``f`` over (0, 1) to the accuracy demanded by ``spec``.

    ``f`` is evaluated on numpy arrays of interior points (a scalar-only
    callable is detected and looped over). Wrap the integrand in
    :class:`ComplementAware` when it needs ``1 - x`` exactly near the upper
    endpoint. Raises :class:`QuadratureError` carrying the best estimate if
    the refinement budget is exhausted before the tolerances are met.
    """
    h = _LEVEL0_H
    k = np.arange(-int(_T_MAX / h), int(_T_MAX / h) + 1)
    ts = k * h
    x, c, w = _nodes(ts)
    keep = (x > 0.0) & (c > 0.0)
    total = float(np.sum(w[keep] * _eval_integrand(f, x[keep], c[keep])))
    estimate = h * total
    n_evals = int(keep.sum())

    prev = math.inf
    for _level in range(1, spec.max_refinement_depth + 1):
        h *= 0.5
        kmax = int(_T_MAX / h)
        ts_new = np.arange(1, kmax + 1, 2) * h  # odd multiples only; even ones are inherited
        ts_new = np.concatenate([-ts_new[::-1], ts_new])
        x, c, w = _nodes(ts_new)
        keep = (x > 0.0) & (c > 0.0)
        n_evals += int(keep.sum())
        if n_evals > _MAX_NODES_TOTAL:
            raise QuadratureError("node budget exhausted before convergence",
                                  estimate, abs(estimate - prev))
        total += float(np.sum(w[keep] * _eval_integrand(f, x[keep], c[keep])))
        prev, estimate = estimate, h * total
        err = abs(estimate - prev)
        if err <= max(spec.absolute_tolerance, spec.relative_tolerance * abs(estimate)):
            return estimate

    raise QuadratureError(
        f"refinement depth {spec.max_refinement_depth} exhausted without convergence",
        estimate, abs(estimate - prev))
