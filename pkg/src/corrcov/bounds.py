"""Non-asymptotic error bounds for the correlated covariance estimator.

The tail-form bound on ||Sigma_hat - Sigma|| is

    |tr(B)/m - 1| ||Sigma||  +  C K^2 (sqrt(n+d) ||B||_F + (n+d) ||B||) / m ||Sigma||

holding with probability at least 1 - 2 exp(-d) for real samples (the complex
case carries an unspecified constant c in place of the 2). The expectation
form replaces n+d by n and bounds E ||Sigma_hat - Sigma||. The absolute
constant C is not specified by the theory; it defaults to 1 and can be fitted
empirically with fit_constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import montecarlo
from .patterns import PatternFamily, pattern_norms
from .sampling import get_distribution
from ._rng import derive_seed

Array = np.ndarray

_FORMS = ("tail", "expectation")


@dataclass(frozen=True)
class BoundQuery:
    """Inputs of one bound evaluation."""

    n: int
    m: int
    delta: float
    K: float
    B_frobenius: float
    B_spectral: float
    B_trace: complex | float
    sigma_spectral: float
    C: float = 1.0

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be >= 1")
        if self.delta < 0.0:
            raise ValueError("delta must be nonnegative")
        if self.K < 1.0:
            raise ValueError("K must be >= 1")
        if self.C <= 0.0:
            raise ValueError("C must be positive")
        if self.B_frobenius <= 0.0 or self.B_spectral <= 0.0:
            raise ValueError("B norms must be positive for a nonzero B")
        # ||B||_F >= ||B|| always; allow a sliver for norms computed in floating point.
        if self.B_frobenius < self.B_spectral * (1.0 - 1e-9):
            raise ValueError("B_frobenius cannot be smaller than B_spectral")
        if self.sigma_spectral < 0.0:
            raise ValueError("sigma_spectral must be nonnegative")


def _effective_dim(q: BoundQuery, form: str) -> float:
    if form not in _FORMS:
        raise ValueError(f"form must be one of {_FORMS}, got {form!r}")
    return q.n + q.delta if form == "tail" else float(q.n)


def concentration_tail_bound(q: BoundQuery, form: str = "tail") -> float:
    """C K^2 (sqrt(n+d) ||B||_F + (n+d) ||B||) / m * ||Sigma||.

    form="expectation" uses n in place of n + delta (the delta-free bound on
    the expected error).
    """
    d = _effective_dim(q, form)
    return (
        q.C * q.K ** 2
        * (math.sqrt(d) * q.B_frobenius + d * q.B_spectral)
        / q.m * q.sigma_spectral
    )


def bias_term(q: BoundQuery) -> float:
    """|tr(B)/m - 1| ||Sigma||; zero exactly when tr(B) = m."""
    return abs(q.B_trace / q.m - 1.0) * q.sigma_spectral


def estimation_error_bound(q: BoundQuery, form: str = "tail") -> float:
    """Bias term plus concentration term."""
    return bias_term(q) + concentration_tail_bound(q, form)


def real_confidence(delta: float) -> float:
    """Confidence 1 - 2 exp(-delta) of the real-case tail bound.

    Negative for small delta: the bound is vacuous there. The complex-case
    confidence is 1 - c exp(-delta) with c unknown; it is never computed here.
    """
    return 1.0 - 2.0 * math.exp(-delta)


def expectation_rate(n: int, m: int, K: float, B_frobenius: float,
                     B_spectral: float, sigma_spectral: float = 1.0) -> float:
    """K^2 (sqrt(n) ||B||_F + n ||B||) / m * ||Sigma||, the C=1 expectation bound."""
    q = BoundQuery(n=n, m=m, delta=0.0, K=K, B_frobenius=B_frobenius,
                   B_spectral=B_spectral, B_trace=float(m),
                   sigma_spectral=sigma_spectral)
    return concentration_tail_bound(q, form="expectation")


@dataclass(frozen=True)
class FitCell:
    """One grid cell of the constant fit."""

    n: int
    m: int
    family: PatternFamily
    distribution: str


@dataclass(frozen=True)
class FitCellResult:
    n: int
    m: int
    pattern: str
    distribution: str
    mean_error: float
    rate: float
    ratio: float


@dataclass(frozen=True)
class FitResult:
    constant: float
    cells: tuple[FitCellResult, ...]
    trials: int
    seed: int


def fit_constant(cells, trials: int, seed: int, workers: int = 1) -> FitResult:
    """Least-squares fit of C through the origin over a grid of cells.

    Each cell's target is the mean spectral error over `trials` fresh draws
    (Sigma = I); its regressor is the C=1 expectation rate
    K^2 (sqrt(n) ||B||_F + n ||B||) / m. The fit minimizes
    sum (mean_error - C rate)^2, i.e. C = sum(e r) / sum(r^2); a single cell
    gives C = mean_error / rate exactly. Per-cell ratios error/rate are
    returned alongside.
    """
    cells = list(cells)
    if not cells:
        raise ValueError("fit grid must be nonempty")
    if trials < 30:
        raise ValueError("fit needs at least 30 trials per cell")
    errors = []
    rates = []
    results = []
    for cell in cells:
        if cell.family.kind == "phase":
            raise ValueError(
                "phase patterns have per-trial norms; fit over identity, toeplitz or custom"
            )
        dist = get_distribution(cell.distribution)
        norms = pattern_norms(cell.family.instantiate(cell.m))
        rate = expectation_rate(cell.n, cell.m, dist.psi2, norms.frobenius, norms.spectral)
        if rate <= 0.0:
            raise ValueError(f"degenerate (zero-rate) fit cell: {cell}")
        cell_seed = derive_seed(seed, "fit", cell.distribution, cell.family.label, cell.n, cell.m)
        errs = montecarlo.fixed_size_errors(
            cell.n, cell.m, cell.family, cell.distribution, trials, cell_seed, workers=workers
        )
        mean_error = float(errs.spectral.mean())
        errors.append(mean_error)
        rates.append(rate)
        results.append(FitCellResult(
            n=cell.n, m=cell.m, pattern=cell.family.label, distribution=cell.distribution,
            mean_error=mean_error, rate=rate, ratio=mean_error / rate,
        ))
    e = np.asarray(errors)
    r = np.asarray(rates)
    constant = float(e @ r / (r @ r))
    return FitResult(constant=constant, cells=tuple(results), trials=trials, seed=seed)
