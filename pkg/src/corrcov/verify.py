"""Numerical checks of the identities and inequalities behind the error bounds.

Equalities (vec/Kronecker algebra, Hermitian splitting, complex-to-real
embedding) are verified to 1e-10 relative deviation on random instances.
Inequalities (epsilon-net spectral bound, net cardinality) are checked for
violation. The Hanson-Wright check is empirical: it regresses the observed
quadratic-form tail against the theoretical rate min(t^2/(K^4 ||B||_F^2),
t/(K^2 ||B||)) and reports the slope and fit quality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg_core
from .sampling import draw_entries, get_distribution
from ._rng import derive_seed, generator_from_seed

Array = np.ndarray

IDENTITY_TOL = 1e-10

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class IdentityReport:
    name: str
    max_deviation: float
    instances: int
    tolerance: float
    passed: bool
    note: str = ""


def _report(name: str, deviation: float, instances: int,
            tolerance: float = IDENTITY_TOL, note: str = "") -> IdentityReport:
    return IdentityReport(
        name=name,
        max_deviation=float(deviation),
        instances=instances,
        tolerance=tolerance,
        passed=bool(deviation <= tolerance),
        note=note,
    )


def _random_matrix(rng: np.random.Generator, rows: int, cols: int, complex_field: bool) -> Array:
    A = rng.standard_normal((rows, cols))
    if complex_field:
        A = A + 1j * rng.standard_normal((rows, cols))
    return A


def _unit_vector(rng: np.random.Generator, dim: int, complex_field: bool) -> Array:
    v = _random_matrix(rng, dim, 1, complex_field)[:, 0]
    return v / np.linalg.norm(v)


def check_vec_quadratic_identity(n: int = 4, m: int = 6, seed: int = 0,
                                 instances: int = 200) -> IdentityReport:
    """<B z^u, z^v> as a direct product chain versus its Kronecker quadratic form.

    Real: u^T X B^T X^T v = vec(X)^T (B kron v u^T) vec(X).
    Complex: u^H X B^H X^H v = vec(X)^H (conj(B) kron v u^H) vec(X).
    Each instance checks both variants on fresh draws.
    """
    if n > 16 or m > 16:
        raise ValueError("brute-force check; keep n, m <= 16")
    rng = generator_from_seed(derive_seed(seed, "vec-quadratic"))
    worst = 0.0
    for _ in range(instances):
        for complex_field in (False, True):
            X = _random_matrix(rng, n, m, complex_field)
            B = _random_matrix(rng, m, m, complex_field)
            u = _unit_vector(rng, n, complex_field)
            v = _unit_vector(rng, n, complex_field)
            direct = u.conj() @ X @ B.conj().T @ X.conj().T @ v
            x = linalg_core.vec(X)
            Q = linalg_core.kronecker(B.conj(), np.outer(v, u.conj()))
            quad = (x.conj().T @ Q @ x)[0, 0]
            worst = max(worst, abs(direct - quad) / max(1.0, abs(direct)))
    return _report("vec-quadratic", worst, instances)


def check_kronecker_norms(seed: int = 0, instances: int = 200) -> IdentityReport:
    """||A kron B|| = ||A|| ||B||, its Frobenius analogue, and the rank-one
    specialization ||B kron v u^H|| = ||B||, ||B kron v u^H||_F = ||B||_F."""
    rng = generator_from_seed(derive_seed(seed, "kron-norms"))
    worst = 0.0
    for _ in range(instances):
        complex_field = bool(rng.integers(0, 2))
        a = int(rng.integers(2, 5))
        b = int(rng.integers(2, 5))
        A = _random_matrix(rng, a, a, complex_field)
        B = _random_matrix(rng, b, b, complex_field)
        K = linalg_core.kronecker(A, B)
        s = linalg_core.spectral_norm(A) * linalg_core.spectral_norm(B)
        f = linalg_core.frobenius_norm(A) * linalg_core.frobenius_norm(B)
        worst = max(worst, abs(linalg_core.spectral_norm(K) - s) / max(1.0, s))
        worst = max(worst, abs(linalg_core.frobenius_norm(K) - f) / max(1.0, f))
        u = _unit_vector(rng, a, complex_field)
        v = _unit_vector(rng, a, complex_field)
        R = linalg_core.kronecker(B, np.outer(v, u.conj()))
        sB = linalg_core.spectral_norm(B)
        fB = linalg_core.frobenius_norm(B)
        worst = max(worst, abs(linalg_core.spectral_norm(R) - sB) / max(1.0, sB))
        worst = max(worst, abs(linalg_core.frobenius_norm(R) - fB) / max(1.0, fB))
    return _report("kronecker-norms", worst, instances)


def hermitian_split(B) -> tuple[Array, Array]:
    """B = B1 - B2 with both parts PSD, from the signed eigendecomposition.

    Eigenvalues within 1e-12 of zero count as zero and land in B1.
    """
    w, V = linalg_core.hermitian_eigen(B)
    w = np.where(np.abs(w) <= 1e-12, 0.0, w)
    pos = (V * np.clip(w, 0.0, None)) @ V.conj().T
    neg = (V * np.clip(-w, 0.0, None)) @ V.conj().T
    sym = lambda M: (M + M.conj().T) / 2.0
    return sym(pos), sym(neg)


def check_hermitian_split(B) -> IdentityReport:
    """B = B1 - B2, both PSD, with ||Bi|| <= ||B|| and ||Bi||_F <= ||B||_F."""
    B = np.asarray(B)
    B1, B2 = hermitian_split(B)
    scale_f = max(1.0, linalg_core.frobenius_norm(B))
    worst = linalg_core.frobenius_norm(B - (B1 - B2)) / scale_f
    for part in (B1, B2):
        lo = np.linalg.eigvalsh((part + part.conj().T) / 2.0)[0]
        worst = max(worst, max(0.0, -lo) / scale_f)
    s = linalg_core.spectral_norm(B)
    f = linalg_core.frobenius_norm(B)
    for part in (B1, B2):
        worst = max(worst, max(0.0, linalg_core.spectral_norm(part) - s) / max(1.0, s))
        worst = max(worst, max(0.0, linalg_core.frobenius_norm(part) - f) / max(1.0, f))
    return _report("hermitian-split", worst, 1)


def check_complex_embedding(Lam, seed: int = 0) -> IdentityReport:
    """Real embedding A = [[Re L, -Im L], [Im L, Re L]] of a complex L.

    Checks ||A A^T|| = ||L L^H||, ||A A^T||_F^2 = 2 ||L L^H||_F^2, and
    ||A^T z||_2 = ||L^H x||_2 for a random x with z = [Re x; Im x].
    """
    Lam = np.asarray(Lam, dtype=complex)
    if Lam.ndim != 2 or Lam.shape[0] != Lam.shape[1]:
        raise ValueError("Lambda must be square")
    m = Lam.shape[0]
    Re, Im = Lam.real, Lam.imag
    A = np.block([[Re, -Im], [Im, Re]])
    B = Lam @ Lam.conj().T
    AAt = A @ A.T
    s_ref = linalg_core.spectral_norm(B)
    worst = abs(linalg_core.spectral_norm(AAt) - s_ref) / max(1.0, s_ref)
    f_ref = 2.0 * linalg_core.frobenius_norm(B) ** 2
    worst = max(worst, abs(linalg_core.frobenius_norm(AAt) ** 2 - f_ref) / max(1.0, f_ref))
    rng = generator_from_seed(derive_seed(seed, "embed-vector"))
    x = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    z = np.concatenate([x.real, x.imag])
    lhs = np.linalg.norm(A.T @ z)
    rhs = np.linalg.norm(Lam.conj().T @ x)
    worst = max(worst, abs(lhs - rhs) / max(1.0, rhs))
    return _report("complex-embedding", worst, 1)


_NET_CACHE: dict[tuple[int, float, int], Array] = {}


def sphere_net(dim: int, epsilon: float, seed: int = 0) -> Array:
    """Deterministic epsilon-net of the real unit sphere S^(dim-1).

    Greedy farthest-point insertion over a seeded uniform pool: every inserted
    point is farther than epsilon from the rest, so the net is an
    epsilon-packing and its cardinality obeys (1 + 2/epsilon)^dim; insertion
    stops once the pool is covered to radius epsilon.
    """
    if not 0.0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    key = (dim, float(epsilon), int(seed))
    cached = _NET_CACHE.get(key)
    if cached is not None:
        return cached
    rng = generator_from_seed(derive_seed(seed, "sphere-net", dim))
    pool = rng.standard_normal((min(4096 * dim, 32768), dim))
    norms = np.linalg.norm(pool, axis=1)
    pool = pool[norms > 1e-12] / norms[norms > 1e-12, None]
    net = [pool[0]]
    dist = np.linalg.norm(pool - pool[0], axis=1)
    while True:
        i = int(np.argmax(dist))
        if dist[i] <= epsilon:
            break
        net.append(pool[i])
        dist = np.minimum(dist, np.linalg.norm(pool - pool[i], axis=1))
    result = np.array(net)
    _NET_CACHE[key] = result
    return result


def check_epsilon_net_bound(A, epsilon: float = 0.25, seed: int = 0) -> IdentityReport:
    """||A|| <= (1-2 eps)^(-1) max over net pairs of <A x, y>, plus cardinalities.

    The reported deviation is the relative amount by which either the norm
    inequality or a net cardinality bound is violated (zero when both hold).
    """
    A = np.asarray(A)
    if np.iscomplexobj(A):
        raise ValueError("the net bound check takes a real matrix")
    rows, cols = A.shape
    if rows > 8 or cols > 8:
        raise ValueError("net sizes explode; keep dimensions <= 8")
    N = sphere_net(cols, epsilon, seed)
    M = sphere_net(rows, epsilon, seed)
    sup = float((M @ A @ N.T).max())
    bound = sup / (1.0 - 2.0 * epsilon)
    s = linalg_core.spectral_norm(A)
    violation = max(0.0, s - bound) / max(1.0, s)
    cardinality_cap = (1.0 + 2.0 / epsilon)
    for net, dim in ((N, cols), (M, rows)):
        if len(net) > cardinality_cap ** dim:
            violation = max(violation, 1.0)
    return _report(
        "epsilon-net", violation, 1,
        note=f"|N|={len(N)}, |M|={len(M)}, bound/norm={bound / s if s else math.inf:.3f}",
    )


@dataclass(frozen=True)
class HansonWrightReport:
    """Empirical tail of |x^H B x - tr(B)| against the Hanson-Wright rate."""

    distribution: str
    trials: int
    slope: float
    intercept: float
    r_squared: float
    t_values: Array
    tail_probabilities: Array
    dropped: int
    mean_deviation_se: float
    passed: bool
    note: str = ""


_HW_QUANTILES = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99, 0.995, 0.999)


def check_hanson_wright_empirical(distribution, B, trials: int = 100_000,
                                  t_grid=None, seed: int = 0,
                                  r2_threshold: float = 0.9) -> HansonWrightReport:
    """Estimate P(|x^H B x - E| >= t) and regress -log tail on the HW rate.

    x has i.i.d. entries of the given law (complex B: (u + jv)/sqrt(2) parts,
    so x stays isotropic and E x^H B x = tr(B)). The default t grid sits at
    empirical quantiles of the deviation from the 50th to the 99.9th
    percentile; grid points with empty tails are dropped with a note.
    """
    if trials < 1000:
        raise ValueError("the tail estimate needs at least 1000 trials")
    dist = get_distribution(distribution) if isinstance(distribution, str) else distribution
    B = np.asarray(B)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("B must be square")
    m = B.shape[0]
    complex_field = bool(np.iscomplexobj(B))
    rng = generator_from_seed(derive_seed(seed, "hanson-wright", dist.kind))
    devs = np.empty(trials)
    q_sum = 0.0 + 0.0j
    q_sq_sum = 0.0
    expected = linalg_core.trace(B)
    chunk = 20_000
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        if complex_field:
            X = (draw_entries(rng, dist, (k, m)) + 1j * draw_entries(rng, dist, (k, m)))
            X /= math.sqrt(2.0)
        else:
            X = draw_entries(rng, dist, (k, m))
        q = ((X @ B) * X.conj()).sum(axis=1)
        d = np.abs(q - expected)
        devs[done:done + k] = d
        q_sum += q.sum()
        q_sq_sum += float((d * d).sum())
        done += k
    mean_gap = abs(q_sum / trials - expected)
    se = math.sqrt(q_sq_sum / trials / trials) or 1e-300
    t_values = (np.quantile(devs, _HW_QUANTILES) if t_grid is None
                else np.asarray(t_grid, dtype=float))
    tails = np.array([(devs >= t).mean() for t in t_values])
    keep = tails > 0.0
    dropped = int((~keep).sum())
    t_kept = t_values[keep]
    tails_kept = tails[keep]
    K = dist.psi2
    Bf = linalg_core.frobenius_norm(B)
    Bs = linalg_core.spectral_norm(B)
    z = np.minimum(t_kept ** 2 / (K ** 4 * Bf ** 2), t_kept / (K ** 2 * Bs))
    y = -np.log(tails_kept)
    mean_ok = mean_gap <= 5.0 * se
    note = ""
    if np.unique(z).size < 2:
        # point-mass quadratic form (e.g. B = I with sign entries): nothing to regress
        slope, intercept, r2 = 0.0, 0.0, math.nan
        note = "degenerate tail: fewer than 2 distinct rate values"
        passed = mean_ok
    else:
        slope, intercept = np.polyfit(z, y, 1)
        resid = y - (slope * z + intercept)
        ss_tot = float(((y - y.mean()) ** 2).sum())
        r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 0.0
        passed = bool(r2 >= r2_threshold and mean_ok)
    return HansonWrightReport(
        distribution=dist.kind,
        trials=trials,
        slope=float(slope),
        intercept=float(intercept),
        r_squared=float(r2),
        t_values=t_kept,
        tail_probabilities=tails_kept,
        dropped=dropped,
        mean_deviation_se=float(mean_gap / se),
        passed=passed,
        note=note,
    )


def _battery_split(seed: int, instances: int) -> IdentityReport:
    rng = generator_from_seed(derive_seed(seed, "split-battery"))
    worst = 0.0
    for _ in range(instances):
        complex_field = bool(rng.integers(0, 2))
        k = int(rng.integers(2, 7))
        M = _random_matrix(rng, k, k, complex_field)
        B = (M + M.conj().T) / 2.0
        worst = max(worst, check_hermitian_split(B).max_deviation)
    return _report("hermitian-split", worst, instances)


def _battery_embedding(seed: int, instances: int) -> IdentityReport:
    rng = generator_from_seed(derive_seed(seed, "embed-battery"))
    worst = 0.0
    for i in range(instances):
        k = int(rng.integers(1, 5))
        Lam = _random_matrix(rng, k, k, True)
        worst = max(worst, check_complex_embedding(Lam, seed=derive_seed(seed, i)).max_deviation)
    return _report("complex-embedding", worst, instances)


def _battery_net(seed: int, instances: int) -> IdentityReport:
    rng = generator_from_seed(derive_seed(seed, "net-battery"))
    worst = 0.0
    sizes = []
    for _ in range(instances):
        rows = int(rng.integers(1, 5))
        cols = int(rng.integers(1, 5))
        A = _random_matrix(rng, rows, cols, False)
        rep = check_epsilon_net_bound(A, 0.25, seed)
        worst = max(worst, rep.max_deviation)
        sizes.append(rep.note)
    return _report("epsilon-net", worst, instances, note=sizes[-1] if sizes else "")


BATTERY_CHECKS = (
    "vec-quadratic",
    "kronecker-norms",
    "hermitian-split",
    "complex-embedding",
    "epsilon-net",
)


def run_battery(seed: int = 0, instances: int = 200, only=None) -> list[IdentityReport]:
    """All identity checks on `instances` random instances each."""
    wanted = set(BATTERY_CHECKS if only is None else only)
    unknown = wanted - set(BATTERY_CHECKS)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}; choose from {BATTERY_CHECKS}")
    reports = []
    if "vec-quadratic" in wanted:
        reports.append(check_vec_quadratic_identity(4, 6, seed, instances))
    if "kronecker-norms" in wanted:
        reports.append(check_kronecker_norms(seed, instances))
    if "hermitian-split" in wanted:
        reports.append(_battery_split(seed, instances))
    if "complex-embedding" in wanted:
        reports.append(_battery_embedding(seed, instances))
    if "epsilon-net" in wanted:
        reports.append(_battery_net(seed, instances))
    return reports
