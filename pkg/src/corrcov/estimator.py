"""The correlated sample covariance estimator and its error metrics.

Given samples X (n x m) and a shape parameter B (m x m), the estimator is
Sigma_hat = X B X^T / m in the real case and X B X^H / m in the complex
case. With trace(B) = m it is unbiased: E Sigma_hat = (trace(B)/m) Sigma.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg_core
from .patterns import CorrelationPattern, materialize
from .sampling import SampleBatch

Array = np.ndarray


@dataclass(frozen=True)
class EstimateResult:
    """Sigma_hat plus its distances to the reference Sigma.

    sigma_hat is Hermitian-symmetrized when B is Hermitian; for non-Hermitian
    B the raw (generally non-Hermitian) estimate is kept and the error norms
    are those of the raw difference.
    """

    sigma_hat: Array
    spectral_error: float
    frobenius_error: float
    normalized_frobenius_error: float


def correlated_sample_covariance(X, B) -> Array:
    """X B X^H / m (conjugate transpose; reduces to X B X^T / m for real X).

    Evaluated as (X B) X^H, costing O(n m^2 + n^2 m).
    """
    X = np.asarray(X)
    B = np.asarray(B)
    if X.ndim != 2 or B.ndim != 2:
        raise ValueError("X and B must be 2-dimensional")
    n, m = X.shape
    if B.shape != (m, m):
        raise ValueError(f"B must be {m} x {m} to match X with {m} columns, got {B.shape}")
    return (X @ B) @ X.conj().T / m


def estimate_and_score(batch: SampleBatch, p: CorrelationPattern) -> EstimateResult:
    """Estimate from the batch under pattern p and score against batch.sigma."""
    if p.m != batch.m:
        raise ValueError(f"pattern has m={p.m} but batch has m={batch.m}")
    B = materialize(p)
    S_hat = correlated_sample_covariance(batch.X, B)
    if p.hermitian:
        S_hat = (S_hat + S_hat.conj().T) / 2.0
    diff = S_hat - batch.sigma
    fro = linalg_core.frobenius_norm(diff)
    sigma_fro = linalg_core.frobenius_norm(batch.sigma)
    return EstimateResult(
        sigma_hat=S_hat,
        spectral_error=linalg_core.spectral_norm(diff),
        frobenius_error=fro,
        normalized_frobenius_error=fro / sigma_fro,
    )
