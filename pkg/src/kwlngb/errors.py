"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class KwLngbError(Exception):
    """Base class for all library errors."""


class DomainError(KwLngbError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UsageError(KwLngbError):
    """Operations combined inconsistently (e.g. fits from different samples)."""


class DegenerateSampleError(KwLngbError):
    """The sample carries no usable shape information (all values identical)."""


class NumericError(KwLngbError):
    """A numerical procedure failed to reach its accuracy target."""


class QuadratureError(NumericError):
    """Adaptive quadrature exhausted refinement without converging.

    Carries the best estimate obtained and its error bound so callers can
    decide whether the partial result is still usable.
    """

    def __init__(self, message: str, best_estimate: float, error_bound: float):
        super().__init__(f"{message} (best estimate {best_estimate!r}, "
                         f"error bound {error_bound!r})")
        self.best_estimate = best_estimate
        self.error_bound = error_bound


class InfeasibleError(KwLngbError):
    """The requested quantity does not exist for these inputs
    (e.g. a divergent power-divergence integral, or a sample size for
    indistinguishable models)."""
