"""Seeded Monte-Carlo protocols over the correlated covariance estimator.

Three experiment kinds:

* sample-size: for each signal dimension n and pattern, the per-trial minimal
  sample count m whose normalized Frobenius error drops to the tolerance eta,
  averaged over trials.
* convergence: for fixed n, the mean spectral error ||Sigma_hat - Sigma|| on
  a grid of m values.
* complex: the sample-size protocol with complex draws and (generally
  non-Hermitian) phase patterns; the per-entry phases Theta are drawn once
  per trial and extended as m grows.

Determinism contract: every trial's stream seed is a pure function of
(base seed, experiment kind, distribution, pattern label, cell, trial index),
so output tables are identical for any worker count or scheduling. The
minimal-m scan steps m = 1, 2, 3, ... and draws a fresh X at every m from a
seed derived from (trial seed, m).

Row order in result tables is patterns outer, n (or m) inner.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import linalg_core
from .estimator import correlated_sample_covariance
from .patterns import PatternFamily, materialize, phase_pattern, toeplitz_apply_right
from .sampling import draw_complex, draw_real, get_distribution
from ._rng import derive_seed, generator_from_seed

Array = np.ndarray

DEFAULT_ETA = 0.2
DEFAULT_TRIALS = 500
# Safety ceiling for minimal-m scans: about 10x the expected minimal m at eta = 0.2.
M_CAP_FACTOR = 200

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ExperimentSpec:
    """Configuration of one experiment run."""

    kind: str                                 # "sample-size" | "convergence" | "complex"
    distribution: str
    patterns: tuple[PatternFamily, ...]
    n_values: tuple[int, ...] = ()
    m_values: tuple[int, ...] = ()
    n_fixed: int = 30
    eta: float = DEFAULT_ETA
    trials: int = DEFAULT_TRIALS
    base_seed: int = 0
    m_cap: int | None = None                  # None: M_CAP_FACTOR * n per cell
    sigma: Array | None = None                # None: identity at each n

    def __post_init__(self):
        if self.kind not in ("sample-size", "convergence", "complex"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        get_distribution(self.distribution)
        if not self.patterns:
            raise ValueError("at least one pattern family is required")
        for fam in self.patterns:
            if fam.kind == "custom":
                raise ValueError("custom patterns have a fixed size and cannot be scanned over m")
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.kind in ("sample-size", "complex"):
            if not self.n_values:
                raise ValueError("sample-size experiments need n_values")
            if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
                raise ValueError("n_values must be strictly increasing")
            if self.m_cap is not None and self.m_cap < max(self.n_values):
                raise ValueError("m_cap must be at least the largest n")
            if self.sigma is not None and len(self.n_values) > 1:
                raise ValueError("an explicit sigma fixes n; use a single n value")
        else:
            if not self.m_values:
                raise ValueError("convergence experiments need m_values")
            if any(b <= a for a, b in zip(self.m_values, self.m_values[1:])):
                raise ValueError("m_values must be strictly increasing")
            if self.n_fixed < 1:
                raise ValueError("n_fixed must be >= 1")


@dataclass(frozen=True)
class TrialResult:
    """Outcome of a single Monte-Carlo trial."""

    n: int
    m: int
    pattern: str
    distribution: str
    trial_index: int
    spectral_error: float
    normalized_frobenius_error: float
    minimal_m: int | None
    censored: bool
    seed: int


@dataclass(frozen=True)
class SampleSizeRow:
    experiment: str
    distribution: str
    pattern: str
    n: int
    trials: int
    mean_min_m: float
    std_min_m: float
    censored: int
    seed: int


@dataclass(frozen=True)
class ConvergenceRow:
    experiment: str
    distribution: str
    pattern: str
    n: int
    m: int
    trials: int
    mean_spec_err: float
    std_spec_err: float
    seed: int


@dataclass(frozen=True)
class ExperimentResult:
    spec: ExperimentSpec
    rows: tuple
    censored_total: int = 0


class _PhaseScan:
    """P(c, Theta) grown one border at a time from a per-trial phase stream.

    At each size increment with new index t, the stream emits the t phases of
    column t (distances t-a, a < t) and then the t phases of row t. Leading
    blocks never change afterwards, so one trial sees one consistent Theta.
    Diagonal phases are never drawn: the diagonal of P is identically 1.
    """

    def __init__(self, c: float, rng: np.random.Generator, capacity: int = 128):
        self._c = float(c)
        self._rng = rng
        self._P = np.zeros((capacity, capacity), dtype=np.complex128)
        self._size = 0

    def view(self, m: int) -> Array:
        self.grow_to(m)
        return self._P[:m, :m]

    def grow_to(self, m: int) -> None:
        cap = self._P.shape[0]
        if m > cap:
            new_cap = max(2 * cap, m)
            grown = np.zeros((new_cap, new_cap), dtype=np.complex128)
            s = self._size
            grown[:s, :s] = self._P[:s, :s]
            self._P = grown
        while self._size < m:
            self._append()

    def _append(self) -> None:
        t = self._size
        if t > 0:
            k = np.arange(t, 0, -1, dtype=float)
            damp = self._c ** k
            col = self._rng.uniform(0.0, _TWO_PI, t)
            row = self._rng.uniform(0.0, _TWO_PI, t)
            self._P[:t, t] = damp * np.exp(1j * k * col)
            self._P[t, :t] = damp * np.exp(1j * k * row)
        self._P[t, t] = 1.0
        self._size = t + 1


def _scan_step_error(
    n: int,
    m: int,
    family: PatternFamily,
    dist,
    sigma_mat: Array,
    R: Array | None,
    sigma_fro: float,
    seed_m: int,
    complex_field: bool,
    phase: _PhaseScan | None,
) -> float:
    """Normalized Frobenius error of one fresh draw at sample count m."""
    if complex_field:
        X = draw_complex(n, m, None, dist, seed_m).X
    else:
        X = draw_real(n, m, None, dist, seed_m).X
    if R is not None:
        X = R @ X
    if family.kind == "identity":
        S = X @ X.conj().T / m
    elif family.kind == "toeplitz":
        S = toeplitz_apply_right(X, family.omega) @ X.conj().T / m
    else:
        S = (X @ phase.view(m)) @ X.conj().T / m
    return float(np.linalg.norm(S - sigma_mat)) / sigma_fro


def _sigma_setup(n: int, sigma) -> tuple[Array, Array | None, float]:
    if sigma is None:
        return np.eye(n), None, math.sqrt(n)
    S = np.asarray(sigma)
    if S.shape != (n, n):
        raise ValueError(f"sigma must be {n} x {n}, got {S.shape}")
    return S, linalg_core.psd_sqrt(S), float(np.linalg.norm(S))


def _scan_core(
    n: int,
    family: PatternFamily,
    dist,
    sigma_mat: Array,
    R: Array | None,
    sigma_fro: float,
    eta: float,
    trial_seed: int,
    m_cap: int,
    complex_field: bool,
) -> tuple[int, bool]:
    phase = None
    if family.kind == "phase":
        theta_rng = generator_from_seed(derive_seed(trial_seed, "theta"))
        phase = _PhaseScan(family.c, theta_rng)
    for m in range(1, m_cap + 1):
        err = _scan_step_error(
            n, m, family, dist, sigma_mat, R, sigma_fro,
            derive_seed(trial_seed, m), complex_field, phase,
        )
        if err <= eta:
            return m, False
    return m_cap, True


def minimal_sample_size_trial(
    n: int,
    pattern: PatternFamily,
    distribution,
    sigma,
    eta: float,
    trial_seed: int,
    m_cap: int,
    complex_field: bool = False,
    trial_index: int = 0,
) -> TrialResult:
    """First m in 1, 2, 3, ... whose normalized Frobenius error is <= eta.

    Every m gets a fresh X seeded from (trial_seed, m). Hitting m_cap yields
    a censored result rather than an exception. The returned errors are those
    of the final (passing or censored) step.
    """
    if pattern.kind == "custom":
        raise ValueError("custom patterns have a fixed size and cannot be scanned over m")
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    if m_cap < 1:
        raise ValueError("m_cap must be >= 1")
    dist = get_distribution(distribution) if isinstance(distribution, str) else distribution
    sigma_mat, R, sigma_fro = _sigma_setup(n, sigma)
    minimal_m, censored = _scan_core(
        n, pattern, dist, sigma_mat, R, sigma_fro, eta, trial_seed, m_cap, complex_field
    )
    # Re-derive the final step (same seed, hence the same X) to score it fully.
    batch_seed = derive_seed(trial_seed, minimal_m)
    if complex_field:
        X = draw_complex(n, minimal_m, None, dist, batch_seed).X
    else:
        X = draw_real(n, minimal_m, None, dist, batch_seed).X
    if R is not None:
        X = R @ X
    if pattern.kind == "phase":
        theta_rng = generator_from_seed(derive_seed(trial_seed, "theta"))
        scan = _PhaseScan(pattern.c, theta_rng)
        B = scan.view(minimal_m)
    else:
        B = materialize(pattern.instantiate(minimal_m))
    S = correlated_sample_covariance(X, B)
    diff = S - sigma_mat
    fro = float(np.linalg.norm(diff))
    return TrialResult(
        n=n,
        m=minimal_m,
        pattern=pattern.label,
        distribution=dist.kind,
        trial_index=trial_index,
        spectral_error=linalg_core.spectral_norm(diff),
        normalized_frobenius_error=fro / sigma_fro,
        minimal_m=minimal_m,
        censored=censored,
        seed=trial_seed,
    )


def _scan_chunk(payload) -> tuple[int, list[int], list[bool]]:
    (n, family, dist_name, sigma, eta, cell_seed, t0, t1, m_cap, complex_field) = payload
    dist = get_distribution(dist_name)
    sigma_mat, R, sigma_fro = _sigma_setup(n, sigma)
    mins: list[int] = []
    cens: list[bool] = []
    for t in range(t0, t1):
        minimal_m, censored = _scan_core(
            n, family, dist, sigma_mat, R, sigma_fro, eta, cell_seed ^ t, m_cap, complex_field
        )
        mins.append(minimal_m)
        cens.append(censored)
    return t0, mins, cens


def _fixed_chunk(payload) -> tuple[int, list[float], list[float]]:
    (n, m, family, dist_name, sigma, cell_seed, t0, t1, complex_field) = payload
    dist = get_distribution(dist_name)
    sigma_mat, _, sigma_fro = _sigma_setup(n, sigma)
    B = None
    hermitian = False
    if family.kind != "phase":
        p = family.instantiate(m)
        B = materialize(p)
        hermitian = p.hermitian
    spec_errs: list[float] = []
    norm_errs: list[float] = []
    for t in range(t0, t1):
        trial_seed = cell_seed ^ t
        if complex_field:
            X = draw_complex(n, m, sigma, dist, trial_seed).X
        else:
            X = draw_real(n, m, sigma, dist, trial_seed).X
        if family.kind == "phase":
            theta_rng = generator_from_seed(derive_seed(trial_seed, "theta"))
            theta = theta_rng.uniform(0.0, _TWO_PI, (m, m))
            np.fill_diagonal(theta, 0.0)
            B = materialize(phase_pattern(family.c, theta))
        S = correlated_sample_covariance(X, B)
        if hermitian:
            S = (S + S.conj().T) / 2.0
        diff = S - sigma_mat
        spec_errs.append(linalg_core.spectral_norm(diff))
        norm_errs.append(float(np.linalg.norm(diff)) / sigma_fro)
    return t0, spec_errs, norm_errs


def _map_chunks(worker, payloads, executor):
    if executor is None:
        return [worker(p) for p in payloads]
    return list(executor.map(worker, payloads))


def _chunk_ranges(trials: int, workers: int) -> list[tuple[int, int]]:
    chunk = max(1, math.ceil(trials / max(1, workers * 4)))
    return [(t0, min(t0 + chunk, trials)) for t0 in range(0, trials, chunk)]


@dataclass(frozen=True)
class FixedSizeErrors:
    spectral: Array
    normalized: Array


def fixed_size_errors(
    n: int,
    m: int,
    family: PatternFamily,
    distribution: str,
    trials: int,
    seed: int,
    sigma=None,
    complex_field: bool = False,
    workers: int = 1,
) -> FixedSizeErrors:
    """Per-trial spectral and normalized Frobenius errors at fixed (n, m).

    Trial t draws from stream seed ^ t. Hermitian patterns are symmetrized
    before scoring, mirroring estimate_and_score.
    """
    spectral = np.empty(trials)
    normalized = np.empty(trials)
    payloads = [
        (n, m, family, distribution, sigma, seed, t0, t1, complex_field)
        for t0, t1 in _chunk_ranges(trials, workers)
    ]
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for t0, spec_errs, norm_errs in _map_chunks(_fixed_chunk, payloads, executor):
            spectral[t0:t0 + len(spec_errs)] = spec_errs
            normalized[t0:t0 + len(norm_errs)] = norm_errs
    finally:
        if executor is not None:
            executor.shutdown()
    return FixedSizeErrors(spectral, normalized)


def _std(values: Array) -> float:
    return float(np.std(values, ddof=1)) if values.size > 1 else 0.0


def _run_scan_experiment(spec: ExperimentSpec, workers: int, complex_field: bool) -> ExperimentResult:
    rows = []
    censored_total = 0
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for family in spec.patterns:
            for n in spec.n_values:
                m_cap = spec.m_cap if spec.m_cap is not None else M_CAP_FACTOR * n
                cell_seed = derive_seed(
                    spec.base_seed, spec.kind, spec.distribution, family.label, n
                )
                payloads = [
                    (n, family, spec.distribution, spec.sigma, spec.eta,
                     cell_seed, t0, t1, m_cap, complex_field)
                    for t0, t1 in _chunk_ranges(spec.trials, workers)
                ]
                mins = np.empty(spec.trials, dtype=np.int64)
                cens = np.zeros(spec.trials, dtype=bool)
                for t0, chunk_mins, chunk_cens in _map_chunks(_scan_chunk, payloads, executor):
                    mins[t0:t0 + len(chunk_mins)] = chunk_mins
                    cens[t0:t0 + len(chunk_cens)] = chunk_cens
                n_censored = int(cens.sum())
                censored_total += n_censored
                rows.append(SampleSizeRow(
                    experiment=spec.kind,
                    distribution=spec.distribution,
                    pattern=family.label,
                    n=n,
                    trials=spec.trials,
                    mean_min_m=float(mins.mean()),
                    std_min_m=_std(mins.astype(float)),
                    censored=n_censored,
                    seed=spec.base_seed,
                ))
    finally:
        if executor is not None:
            executor.shutdown()
    return ExperimentResult(spec=spec, rows=tuple(rows), censored_total=censored_total)


def run_sample_size_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Mean minimal sample size per (pattern, n), real field."""
    if spec.kind != "sample-size":
        raise ValueError(f"expected a sample-size spec, got kind {spec.kind!r}")
    return _run_scan_experiment(spec, workers, complex_field=False)


def run_complex_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Mean minimal sample size per (pattern, n), complex draws and patterns."""
    if spec.kind != "complex":
        raise ValueError(f"expected a complex spec, got kind {spec.kind!r}")
    return _run_scan_experiment(spec, workers, complex_field=True)


def run_convergence_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Mean spectral error per (pattern, m) at fixed n."""
    if spec.kind != "convergence":
        raise ValueError(f"expected a convergence spec, got kind {spec.kind!r}")
    rows = []
    for family in spec.patterns:
        for m in spec.m_values:
            cell_seed = derive_seed(
                spec.base_seed, spec.kind, spec.distribution, family.label, spec.n_fixed, m
            )
            errs = fixed_size_errors(
                spec.n_fixed, m, family, spec.distribution, spec.trials,
                cell_seed, sigma=spec.sigma, workers=workers,
            )
            rows.append(ConvergenceRow(
                experiment=spec.kind,
                distribution=spec.distribution,
                pattern=family.label,
                n=spec.n_fixed,
                m=m,
                trials=spec.trials,
                mean_spec_err=float(errs.spectral.mean()),
                std_spec_err=_std(errs.spectral),
                seed=spec.base_seed,
            ))
    return ExperimentResult(spec=spec, rows=tuple(rows), censored_total=0)
