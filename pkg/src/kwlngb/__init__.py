"""kwlngb: deciding between Kumaraswamy and Libby-Novick generalized beta
models for data on the open unit interval.

The package provides both families (densities, CDFs, quantiles, exact
samplers), maximum-likelihood fitting, the likelihood-ratio statistic W_n,
asymptotic probability-of-correct-selection, pseudo-distance measures,
minimum-sample-size inversion, and a reproducible Monte Carlo harness.
"""

from .discrimination import (DiscriminationReport, NullAnalysis, NullHypothesis,
                             SampleSizeResult, expected_rival_loglik_under_lngb,
                             kw_null, lngb_null, min_sample_size, null_analysis,
                             pcs_kw, pcs_lngb, pseudo_true_kw, pseudo_true_lngb,
                             select_model, w_statistic)
from .distributions import (KwParams, LngbParams, Sample, kw_cdf, kw_log_pdf,
                            kw_quantile, kw_sample, lngb_cdf, lngb_log_pdf,
                            lngb_quantile, lngb_sample)
from .divergence import (DivergenceResult, affinity, hellinger,
                         hellinger_closed_form, ks_distance, power_divergence,
                         power_divergence_closed_form)
from .errors import (DegenerateSampleError, DomainError, InfeasibleError,
                     KwLngbError, NumericError, QuadratureError, UsageError)
from .fit import FitResult, fit_kw, fit_lngb, kw_loglik, kw_score, lngb_loglik, lngb_score
from .montecarlo import (ReplicateOutcome, SimulationConfig, SimulationResult,
                         pcs_table, replicate_stream, run_replicate, run_simulation)
from .specfun import (DEFAULT_QUADRATURE, ComplementAware, QuadratureSpec,
                      digamma, gauss_2f1, gauss_2f1_regularized, integrate_unit,
                      log_beta, log_gamma, reg_inc_beta, std_normal_cdf,
                      std_normal_quantile)

__version__ = "0.1.0"

__all__ = [
    "KwParams", "LngbParams", "Sample",
    "kw_log_pdf", "kw_cdf", "kw_quantile", "kw_sample",
    "lngb_log_pdf", "lngb_cdf", "lngb_quantile", "lngb_sample",
    "FitResult", "fit_kw", "fit_lngb", "kw_loglik", "kw_score",
    "lngb_loglik", "lngb_score",
    "NullHypothesis", "NullAnalysis", "DiscriminationReport", "SampleSizeResult",
    "kw_null", "lngb_null", "w_statistic", "expected_rival_loglik_under_lngb",
    "pseudo_true_kw", "pseudo_true_lngb", "null_analysis", "pcs_kw", "pcs_lngb",
    "select_model", "min_sample_size",
    "DivergenceResult", "affinity", "hellinger", "hellinger_closed_form",
    "power_divergence", "power_divergence_closed_form", "ks_distance",
    "SimulationConfig", "SimulationResult", "ReplicateOutcome",
    "replicate_stream", "run_replicate", "run_simulation", "pcs_table",
    "QuadratureSpec", "DEFAULT_QUADRATURE", "ComplementAware", "integrate_unit",
    "log_gamma", "digamma", "log_beta", "reg_inc_beta", "gauss_2f1",
    "gauss_2f1_regularized", "std_normal_cdf", "std_normal_quantile",
    "KwLngbError", "DomainError", "UsageError", "DegenerateSampleError",
    "NumericError", "QuadratureError", "InfeasibleError",
]
