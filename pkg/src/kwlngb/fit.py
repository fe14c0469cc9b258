"""Maximum-likelihood estimation for both families.

KW uses the profile trick: delta has the closed form
``delta(alpha) = -n / sum(log(1 - x_i**alpha))``, leaving a one-dimensional
search in alpha. LNGB is maximized over (log a, log b, log beta) with a
quasi-Newton ascent from a fixed multi-start set, followed by a Newton
polish, so fitting stays deterministic given the sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize as _opt
from scipy import special as _sp

from .distributions import KwParams, LngbParams, Sample, _log1m_pow
from .errors import DegenerateSampleError, DomainError

__all__ = [
    "FitResult",
    "kw_loglik",
    "kw_score",
    "fit_kw",
    "lngb_loglik",
    "lngb_score",
    "fit_lngb",
    "SCORE_TOL_PER_OBS",
    "LOG_BETA_CAP",
]

# convergence demands a score norm <= SCORE_TOL_PER_OBS * n
SCORE_TOL_PER_OBS = 1e-6
# |log beta| cap; the likelihood flattens as beta runs away and the score
# equation for beta becomes ill-conditioned, so cap and flag instead of failing
LOG_BETA_CAP = math.log(1e6)
# a and b share the cap: beyond ~1e6 the loglik form cancels gammaln- and
# kernel-sum terms of magnitude ~1e7 against each other, drowning the score
# tolerance in rounding noise; ridge runners (b -> inf with beta*b bounded)
# pin here and convergence is judged in the KKT sense at the bound
_LOG_SHAPE_BOUND = LOG_BETA_CAP


@dataclass(frozen=True)
class FitResult:
    model: str
    params: KwParams | LngbParams
    log_likelihood: float
    converged: bool
    iterations: int
    gradient_norm: float
    aic: float
    bic: float
    n: int
    sample_fingerprint: str
    at_beta_cap: bool = False

    @property
    def k(self) -> int:
        return 2 if self.model == "kw" else 3


def _information_criteria(ll: float, k: int, n: int) -> tuple[float, float]:
    return 2.0 * k - 2.0 * ll, k * math.log(n) - 2.0 * ll


def _check_sample(s: Sample, min_n: int) -> None:
    if s.n < min_n:
        raise DomainError(f"need at least {min_n} observations, got {s.n}")
    if np.all(s.values == s.values[0]):
        raise DegenerateSampleError("all observations identical; shapes are not identifiable")


# -- Kumaraswamy --------------------------------------------------------------

def kw_loglik(p: KwParams, s: Sample) -> float:
    n = s.n
    t = float(np.sum(_log1m_pow(p.alpha, s.log_values)))
    return (n * math.log(p.alpha) + n * math.log(p.delta)
            + (p.alpha - 1.0) * float(np.sum(s.log_values)) + (p.delta - 1.0) * t)


def kw_score(p: KwParams, s: Sample) -> np.ndarray:
    """Score vector (d/d alpha, d/d delta) of the KW log-likelihood."""
    lnx = s.log_values
    xa = np.exp(p.alpha * lnx)
    one_m = -np.expm1(p.alpha * lnx)
    d_alpha = float(np.sum(lnx)) + s.n / p.alpha \
        - (p.delta - 1.0) * float(np.sum(xa * lnx / one_m))
    d_delta = s.n / p.delta + float(np.sum(np.log(one_m)))
    return np.array([d_alpha, d_delta])


def _kw_profile_pieces(alpha: float, s: Sample) -> tuple[float, float]:
    """(profile log-likelihood, profile score in alpha) at a given alpha."""
    lnx = s.log_values
    n = s.n
    t = float(np.sum(np.log(-np.expm1(alpha * lnx))))
    if not math.isfinite(t) or t >= 0.0:
        return -math.inf, math.nan
    delta = -n / t
    ll = (n * math.log(alpha) + n * math.log(delta)
          + (alpha - 1.0) * float(np.sum(lnx)) - n + n / delta)
    xa = np.exp(alpha * lnx)
    u = float(np.sum(xa * lnx / (-np.expm1(alpha * lnx))))
    score_a = float(np.sum(lnx)) + n / alpha - (delta - 1.0) * u
    return ll, score_a


def fit_kw(s: Sample) -> FitResult:
    """Profile-likelihood fit of KW(alpha, delta)."""
    _check_sample(s, 2)
    n = s.n
    evals = 0

    def neg_profile(log_alpha: float) -> float:
        nonlocal evals
        evals += 1
        ll, _ = _kw_profile_pieces(math.exp(log_alpha), s)
        return -ll if math.isfinite(ll) else 1e300

    bracket = _opt.minimize_scalar(neg_profile, bounds=(-_LOG_SHAPE_BOUND, _LOG_SHAPE_BOUND),
                                   method="bounded", options={"xatol": 1e-12})
    alpha = math.exp(bracket.x)

    # derivative refinement: push the alpha-score to a sign change and bisect it
    _, sc = _kw_profile_pieces(alpha, s)
    if math.isfinite(sc) and abs(sc) > 0.0:
        step = 1e-6 * max(alpha, 1.0)
        lo, hi = alpha - step, alpha + step
        f_lo = _kw_profile_pieces(lo, s)[1] if lo > 0 else math.nan
        f_hi = _kw_profile_pieces(hi, s)[1]
        for _ in range(60):
            if math.isfinite(f_lo) and math.isfinite(f_hi) and f_lo * f_hi < 0:
                break
            step *= 4.0
            lo, hi = max(alpha - step, alpha * 0.5), alpha + step
            f_lo, f_hi = _kw_profile_pieces(lo, s)[1], _kw_profile_pieces(hi, s)[1]
        if math.isfinite(f_lo) and math.isfinite(f_hi) and f_lo * f_hi < 0:
            alpha = _opt.brentq(lambda a: _kw_profile_pieces(a, s)[1], lo, hi,
                                xtol=1e-14, rtol=1e-15)
            evals += 50

    t = float(np.sum(_log1m_pow(alpha, s.log_values)))
    delta = -n / t
    params = KwParams(alpha, delta)
    ll = kw_loglik(params, s)
    score = kw_score(params, s)
    gnorm = float(np.linalg.norm(score))
    converged = bool(np.all(np.abs(score) <= SCORE_TOL_PER_OBS * n))
    aic, bic = _information_criteria(ll, 2, n)
    return FitResult("kw", params, ll, converged, evals, gnorm, aic, bic,
                     n, s.fingerprint)


# -- Libby-Novick generalized beta --------------------------------------------

def lngb_loglik(p: LngbParams, s: Sample) -> float:
    n = s.n
    kern = float(np.sum(np.log1p(-(1.0 - p.beta) * s.values)))
    return (n * p.a * math.log(p.beta) - n * float(_sp.betaln(p.a, p.b))
            + (p.a - 1.0) * float(np.sum(s.log_values))
            + (p.b - 1.0) * float(np.sum(s.log1m_values))
            - (p.a + p.b) * kern)


def lngb_score(p: LngbParams, s: Sample) -> np.ndarray:
    """Score vector (d/da, d/db, d/d beta) of the LNGB log-likelihood."""
    n = s.n
    a, b, beta = p.a, p.b, p.beta
    kern = float(np.sum(np.log1p(-(1.0 - beta) * s.values)))
    d_a = (n * math.log(beta) - n * (float(_sp.psi(a)) - float(_sp.psi(a + b)))
           + float(np.sum(s.log_values)) - kern)
    d_b = (-n * (float(_sp.psi(b)) - float(_sp.psi(a + b)))
           + float(np.sum(s.log1m_values)) - kern)
    d_beta = n * a / beta - (a + b) * float(np.sum(s.values / (1.0 - (1.0 - beta) * s.values)))
    return np.array([d_a, d_b, d_beta])


def _moment_beta_start(s: Sample) -> tuple[float, float]:
    m = float(np.mean(s.values))
    v = float(np.var(s.values))
    if v <= 0.0:
        return 1.0, 1.0
    c = m * (1.0 - m) / v - 1.0
    if c <= 0.0:
        return 1.0, 1.0
    return max(c * m, 1e-3), max(c * (1.0 - m), 1e-3)


def _lngb_starts(s: Sample) -> list[np.ndarray]:
    a0, b0 = _moment_beta_start(s)
    la, lb = math.log(a0), math.log(b0)
    return [np.array([0.0, 0.0, 0.0]),
            np.array([la, lb, 0.0]),
            np.array([la + 0.4, lb + 0.4, 0.4]),
            np.array([la - 0.4, lb - 0.4, -0.4])]


def _lngb_grad_logparams(v: np.ndarray, s: Sample) -> np.ndarray:
    p = LngbParams(*np.exp(v))
    return lngb_score(p, s) * np.exp(v)


def _lngb_hess_logparams(v: np.ndarray, s: Sample) -> np.ndarray:
    h = np.empty((3, 3))
    for j in range(3):
        step = 1e-5 * max(1.0, abs(v[j]))
        vp, vm = v.copy(), v.copy()
        vp[j] += step
        vm[j] -= step
        h[:, j] = (_lngb_grad_logparams(vp, s) - _lngb_grad_logparams(vm, s)) / (2 * step)
    return 0.5 * (h + h.T)


_LNGB_BOUNDS = [(-_LOG_SHAPE_BOUND, _LOG_SHAPE_BOUND),
                (-_LOG_SHAPE_BOUND, _LOG_SHAPE_BOUND),
                (-LOG_BETA_CAP, LOG_BETA_CAP)]


_BOUND_SNAP = 1e-6


def _active_bounds(v: np.ndarray) -> np.ndarray:
    """-1 / 0 / +1 per coordinate for an active lower / no / upper bound."""
    lo = np.array([b[0] for b in _LNGB_BOUNDS])
    hi = np.array([b[1] for b in _LNGB_BOUNDS])
    return np.where(v <= lo + _BOUND_SNAP, -1, np.where(v >= hi - _BOUND_SNAP, 1, 0))


def _projected(g: np.ndarray, active: np.ndarray) -> np.ndarray:
    """Zero out score components that push outward at an active bound.

    At a lower bound only an upward (positive) component signals an ascent
    direction back into the box, and symmetrically at an upper bound.
    """
    out = g.copy()
    out[(active == -1) & (g <= 0.0)] = 0.0
    out[(active == 1) & (g >= 0.0)] = 0.0
    return out


def _line_search(v: np.ndarray, s: Sample, free: np.ndarray, direction: np.ndarray,
                 lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, bool]:
    """Backtracking ascent along ``direction`` in the free coordinates."""
    ll_here = lngb_loglik(LngbParams(*np.exp(v)), s)
    scale = 1.0
    for _bt in range(30):
        cand = v.copy()
        cand[free] = cand[free] + scale * direction
        cand = np.clip(cand, lo, hi)
        if lngb_loglik(LngbParams(*np.exp(cand)), s) > ll_here:
            return cand, True
        scale *= 0.5
    return v, False


def _newton_polish(v: np.ndarray, s: Sample, free: np.ndarray,
                   n: int) -> tuple[np.ndarray, int, bool]:
    """Safeguarded Newton ascent on the free log-parameter coordinates.

    Returns ``(v, steps, stalled)``. ``stalled`` means the score tolerance
    was not reached yet NO improving point exists along either the Newton
    or the gradient direction at any backtracking scale: the candidate is a
    stationary point at double-precision resolution (typical on the weak-
    identification ridge, where the surviving score components are smaller
    than the evaluation noise of the log-likelihood's large terms).
    """
    steps = 0
    lo = np.array([b[0] for b in _LNGB_BOUNDS])
    hi = np.array([b[1] for b in _LNGB_BOUNDS])
    for _ in range(40):
        g = _lngb_grad_logparams(v, s)[free]
        if np.linalg.norm(g) <= 0.1 * SCORE_TOL_PER_OBS * n:
            return v, steps, False
        h = _lngb_hess_logparams(v, s)[np.ix_(free, free)]
        try:
            step_free = np.linalg.solve(h, -g)
        except np.linalg.LinAlgError:
            step_free = g / max(np.linalg.norm(g), 1.0)
        norm = np.linalg.norm(step_free)
        if norm > 2.0:
            step_free *= 2.0 / norm
        if float(step_free @ g) <= 0.0:  # not an ascent direction; use the gradient
            step_free = g * min(1.0, 1.0 / np.linalg.norm(g))
        steps += 1
        v, moved = _line_search(v, s, free, step_free, lo, hi)
        if not moved:
            grad_dir = g * min(1.0, 1.0 / np.linalg.norm(g))
            v, moved = _line_search(v, s, free, grad_dir, lo, hi)
            if not moved:
                g_now = _lngb_grad_logparams(v, s)[free]
                return v, steps, bool(np.linalg.norm(g_now) > SCORE_TOL_PER_OBS * n)
    return v, steps, False  # budget exhausted while still improving


def fit_lngb(s: Sample) -> FitResult:
    """Quasi-Newton fit of LNGB(a, b, beta) over log-parameters, multi-start.

    When the likelihood supremum runs along the weak-identification ridge
    (beta toward a cap boundary, b growing without bound), the fit snaps to
    the cap, re-optimizes the free coordinates (releasing the cap again if
    the score turns back inward), and reports convergence in the KKT sense:
    free-coordinate scores within tolerance, boundary scores pointing
    outward, and ``at_beta_cap`` set. Scores are judged on the log-parameter
    scale, which stays meaningful when beta is orders of magnitude below 1;
    ``gradient_norm`` is this projected log-scale score norm.
    """
    _check_sample(s, 3)
    n = s.n
    lo = np.array([b[0] for b in _LNGB_BOUNDS])
    hi = np.array([b[1] for b in _LNGB_BOUNDS])

    def neg(v: np.ndarray) -> float:
        return -lngb_loglik(LngbParams(*np.exp(v)), s) / n

    def neg_grad(v: np.ndarray) -> np.ndarray:
        return -_lngb_grad_logparams(v, s) / n

    best_v, best_ll, iters = None, -math.inf, 0
    for start in _lngb_starts(s):
        res = _opt.minimize(neg, start, jac=neg_grad, method="L-BFGS-B",
                            bounds=_LNGB_BOUNDS,
                            options={"maxiter": 500, "ftol": 1e-15, "gtol": 1e-10})
        iters += int(res.nit)
        if -res.fun * n > best_ll:
            best_ll, best_v = -res.fun * n, res.x.copy()

    # active-set refinement: pin capped coordinates, re-solve the free ones,
    # release a pin when its score points back into the box
    v = best_v
    stalled = False
    for _round in range(4):
        active = _active_bounds(v)
        v = np.where(active == -1, lo, np.where(active == 1, hi, v))
        free_idx = np.flatnonzero(active == 0)
        if free_idx.size and free_idx.size < 3:
            def neg_free(w, v=v, free_idx=free_idx):
                vv = v.copy()
                vv[free_idx] = w
                return neg(vv)

            def neg_grad_free(w, v=v, free_idx=free_idx):
                vv = v.copy()
                vv[free_idx] = w
                return neg_grad(vv)[free_idx]

            res = _opt.minimize(neg_free, v[free_idx], jac=neg_grad_free,
                                method="L-BFGS-B",
                                bounds=[_LNGB_BOUNDS[i] for i in free_idx],
                                options={"maxiter": 500, "ftol": 1e-15, "gtol": 1e-12})
            iters += int(res.nit)
            v[free_idx] = res.x
        stalled = False
        if free_idx.size:
            v, steps, stalled = _newton_polish(v, s, free_idx, n)
            iters += steps

        g = _lngb_grad_logparams(v, s)
        active = _active_bounds(v)
        if np.linalg.norm(_projected(g, active)) <= SCORE_TOL_PER_OBS * n:
            break
        released = False
        for j in range(3):  # a pinned coordinate whose score points inward
            if active[j] == -1 and g[j] > SCORE_TOL_PER_OBS * n:
                v[j] = lo[j] + 0.01
                released = True
            elif active[j] == 1 and g[j] < -SCORE_TOL_PER_OBS * n:
                v[j] = hi[j] - 0.01
                released = True
        if not released:
            break

    active = _active_bounds(v)
    free_mask = active == 0
    params = LngbParams(*np.exp(v))
    ll = lngb_loglik(params, s)
    proj_score = _projected(_lngb_grad_logparams(v, s), active)
    gnorm = float(np.linalg.norm(proj_score))
    at_cap = bool(active[2] != 0)
    score_ok = bool(np.all(np.abs(proj_score) <= SCORE_TOL_PER_OBS * n)) or stalled
    if np.any(free_mask):
        eigs = np.linalg.eigvalsh(
            _lngb_hess_logparams(v, s)[np.ix_(free_mask, free_mask)])
        # tolerate finite-difference noise around a flat ridge's zero eigenvalue
        curvature_ok = bool(eigs.max() < 1e-6 * max(1.0, -float(eigs.min())))
    else:
        curvature_ok = True
    converged = score_ok and curvature_ok
    aic, bic = _information_criteria(ll, 3, n)
    return FitResult("lngb", params, ll, converged, iters, gnorm, aic, bic,
                     n, s.fingerprint, at_beta_cap=at_cap)
