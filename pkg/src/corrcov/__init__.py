"""Covariance estimation from correlated sub-Gaussian samples.

The estimator is the general compound Wishart form XBX^H / m with a shape
parameter B describing the correlation across samples. The package provides
the correlation-pattern family (identity, Hermitian Toeplitz, non-Hermitian
phase, custom), non-asymptotic error bounds with an empirically fittable
constant, a deterministic Monte-Carlo harness, and a numerical battery for
the identities the error analysis rests on.
"""

from .bounds import (
    BoundQuery,
    FitCell,
    FitResult,
    bias_term,
    concentration_tail_bound,
    estimation_error_bound,
    expectation_rate,
    fit_constant,
    real_confidence,
)
from .estimator import EstimateResult, correlated_sample_covariance, estimate_and_score
from .linalg_core import (
    NotPSDError,
    frobenius_norm,
    hermitian_eigen,
    is_hermitian,
    kronecker,
    psd_sqrt,
    spectral_norm,
    trace,
    vec,
)
from .montecarlo import (
    ExperimentSpec,
    TrialResult,
    fixed_size_errors,
    minimal_sample_size_trial,
    run_complex_experiment,
    run_convergence_experiment,
    run_sample_size_experiment,
)
from .patterns import (
    CorrelationPattern,
    PatternFamily,
    PatternNorms,
    PatternSpecError,
    custom_pattern,
    draw_phases,
    identity_pattern,
    materialize,
    parse_pattern,
    pattern_norms,
    phase_pattern,
    toeplitz_frobenius_sq,
    toeplitz_pattern,
    toeplitz_spectral_bound,
)
from .sampling import (
    GAUSSIAN,
    RADEMACHER,
    UNIFORM,
    Distribution,
    SampleBatch,
    draw_complex,
    draw_real,
    get_distribution,
    psi2_constant,
)
from .verify import (
    IdentityReport,
    check_complex_embedding,
    check_epsilon_net_bound,
    check_hanson_wright_empirical,
    check_hermitian_split,
    check_kronecker_norms,
    check_vec_quadratic_identity,
    hermitian_split,
    run_battery,
    sphere_net,
)

__version__ = "0.1.0"

__all__ = [
    "BoundQuery",
    "CorrelationPattern",
    "Distribution",
    "EstimateResult",
    "ExperimentSpec",
    "FitCell",
    "FitResult",
    "GAUSSIAN",
    "IdentityReport",
    "NotPSDError",
    "PatternFamily",
    "PatternNorms",
    "PatternSpecError",
    "RADEMACHER",
    "SampleBatch",
    "TrialResult",
    "UNIFORM",
    "bias_term",
    "check_complex_embedding",
    "check_epsilon_net_bound",
    "check_hanson_wright_empirical",
    "check_hermitian_split",
    "check_kronecker_norms",
    "check_vec_quadratic_identity",
    "concentration_tail_bound",
    "correlated_sample_covariance",
    "custom_pattern",
    "draw_complex",
    "draw_phases",
    "draw_real",
    "estimate_and_score",
    "estimation_error_bound",
    "expectation_rate",
    "fit_constant",
    "fixed_size_errors",
    "frobenius_norm",
    "get_distribution",
    "hermitian_eigen",
    "hermitian_split",
    "identity_pattern",
    "is_hermitian",
    "kronecker",
    "materialize",
    "minimal_sample_size_trial",
    "parse_pattern",
    "pattern_norms",
    "phase_pattern",
    "psd_sqrt",
    "psi2_constant",
    "real_confidence",
    "run_battery",
    "run_complex_experiment",
    "run_convergence_experiment",
    "run_sample_size_experiment",
    "sphere_net",
    "spectral_norm",
    "toeplitz_frobenius_sq",
    "toeplitz_pattern",
    "toeplitz_spectral_bound",
    "trace",
    "vec",
]
