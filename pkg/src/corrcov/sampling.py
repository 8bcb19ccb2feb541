"""Sub-Gaussian sample generation with prescribed covariance.

Three unit-variance entry laws are provided, each with its psi2 constant
(the smallest t with E exp(x^2/t^2) <= 2):

* gaussian: K = sqrt(8/3), the closed-form root of (1 - 2/t^2)^(-1/2) = 2.
* rademacher: K = 1/sqrt(ln 2), the root of exp(1/t^2) = 2; this is also the
  smallest possible constant for any unit-variance law.
* uniform on [-sqrt(3), sqrt(3)]: K = 1.3383691554309107, the numerically
  solved root of (t/sqrt(3)) (sqrt(pi)/2) erfi(sqrt(3)/t) = 2.

Real batches are X = Sigma^(1/2) X0 with i.i.d. entries in X0. Complex
batches build each column as Sigma^(1/2) (u + j v)/sqrt(2) from independent
real draws u, v, so E x x^H = Sigma and Re/Im parts stay i.i.d.; Sigma must
be real for that independence to survive the coloring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg_core
from ._rng import derive_seed, generator_from_seed

Array = np.ndarray

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Distribution:
    """A unit-variance sub-Gaussian entry law with its psi2 constant."""

    kind: str
    psi2: float


GAUSSIAN = Distribution("gaussian", math.sqrt(8.0 / 3.0))
RADEMACHER = Distribution("rademacher", 1.0 / math.sqrt(math.log(2.0)))
UNIFORM = Distribution("uniform", 1.3383691554309107)

_DISTRIBUTIONS = {d.kind: d for d in (GAUSSIAN, RADEMACHER, UNIFORM)}


def get_distribution(name: str) -> Distribution:
    try:
        return _DISTRIBUTIONS[name]
    except KeyError:
        raise ValueError(
            f"unknown distribution {name!r}; choose from {sorted(_DISTRIBUTIONS)}"
        ) from None


def psi2_constant(d: Distribution | str) -> float:
    """Tabulated psi2 constant K of the entry law."""
    if isinstance(d, str):
        d = get_distribution(d)
    return d.psi2


def draw_entries(rng: np.random.Generator, d: Distribution, shape: tuple[int, ...]) -> Array:
    """i.i.d. zero-mean unit-variance entries of the given law."""
    if d.kind == "gaussian":
        return rng.standard_normal(shape)
    if d.kind == "rademacher":
        return 2.0 * rng.integers(0, 2, size=shape).astype(float) - 1.0
    if d.kind == "uniform":
        return rng.uniform(-_SQRT3, _SQRT3, size=shape)
    raise ValueError(f"unknown distribution kind {d.kind!r}")


@dataclass(frozen=True)
class SampleBatch:
    """n x m sample matrix X together with how it was produced."""

    X: Array
    sigma: Array
    distribution: Distribution
    seed: int
    complex_flag: bool

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]


def _sigma_sqrt(n: int, sigma) -> tuple[Array, Array | None]:
    """Validated sigma and its PSD square root; None root means identity."""
    if sigma is None:
        return np.eye(n), None
    S = np.asarray(sigma)
    if S.shape != (n, n):
        raise ValueError(f"sigma must be {n} x {n}, got {S.shape}")
    R = linalg_core.psd_sqrt(S)
    return S, R


def draw_real(n: int, m: int, sigma, d: Distribution | str, seed: int) -> SampleBatch:
    """m i.i.d. real columns with covariance sigma (None means identity).

    Deterministic given (n, m, sigma, d, seed): the same inputs reproduce X
    bit for bit.
    """
    if isinstance(d, str):
        d = get_distribution(d)
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    sig, R = _sigma_sqrt(n, sigma)
    if R is not None and np.iscomplexobj(sig):
        raise ValueError("real batches require a real sigma")
    rng = generator_from_seed(derive_seed(seed, "real"))
    X = draw_entries(rng, d, (n, m))
    if R is not None:
        X = R @ X
    return SampleBatch(X, sig, d, int(seed), False)


def draw_complex(n: int, m: int, sigma, d: Distribution | str, seed: int) -> SampleBatch:
    """m i.i.d. complex columns with E x x^H = sigma and i.i.d. Re/Im parts.

    Columns are Sigma^(1/2) (u + j v)/sqrt(2) with u, v independent draws of
    the entry law; sigma must be real symmetric positive definite (or None
    for identity).
    """
    if isinstance(d, str):
        d = get_distribution(d)
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    if sigma is not None and np.iscomplexobj(np.asarray(sigma)):
        raise ValueError("complex batches require a real sigma")
    sig, R = _sigma_sqrt(n, sigma)
    rng = generator_from_seed(derive_seed(seed, "complex"))
    U = draw_entries(rng, d, (n, m))
    V = draw_entries(rng, d, (n, m))
    X = (U + 1j * V) / math.sqrt(2.0)
    if R is not None:
        X = R @ X
    return SampleBatch(X, sig, d, int(seed), True)
