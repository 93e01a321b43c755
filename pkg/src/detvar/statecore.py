"""Dense complex linear algebra and bipartite state construction.

States live on C^m (x) C^n with the product basis ordered
|11>, ..., |1n>, ..., |m1>, ..., |mn>; the coefficient of |ij> sits at
flat index (i-1)*n + (j-1).  Every file format and block operation in
the toolkit assumes this order.

All container types are immutable after construction and all operations
are pure, so everything here is safe to use from concurrent workers.
Random generation always goes through an explicit seed or Generator;
``derived_rng`` builds reproducible per-task streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    IndexOutOfRange,
    NotNormalized,
    NotPositive,
    NotHermitian,
    ShapeMismatch,
    TraceNotOne,
)

# Validation tolerances for the state types.
HERMITIAN_RTOL = 1e-12
POSITIVITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
UNIT_NORM_ATOL = 1e-10
WEIGHT_MIN = 1e-14

#: Margin ratios below this are treated as near-threshold by samplers.
NEAR_BAND = 10.0


def as_complex_matrix(mat, name: str = "matrix") -> np.ndarray:
    """Coerce to a fresh finite complex 2-D array or raise ShapeMismatch."""
    arr = np.array(mat, dtype=complex)
    if arr.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.size and not np.all(np.isfinite(arr.real) & np.isfinite(arr.imag)):
        raise ShapeMismatch(f"{name} has non-finite entries")
    return arr


def as_complex_vector(vec, name: str = "vector") -> np.ndarray:
    """Coerce to a fresh finite complex 1-D array or raise ShapeMismatch."""
    arr = np.array(vec, dtype=complex)
    if arr.ndim != 1:
        raise ShapeMismatch(f"{name} must be 1-D, got ndim={arr.ndim}")
    if arr.size and not np.all(np.isfinite(arr.real) & np.isfinite(arr.imag)):
        raise ShapeMismatch(f"{name} has non-finite entries")
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def derived_rng(seed: int, *branch: int) -> np.random.Generator:
    """Deterministic generator for (seed, branch...) task coordinates."""
    entropy = int(seed) & 0xFFFFFFFFFFFFFFFF
    key = tuple(int(b) & 0xFFFFFFFF for b in branch)
    return np.random.default_rng(np.random.SeedSequence(entropy=entropy, spawn_key=key))


# ---------------------------------------------------------------------------
# rank policy


@dataclass(frozen=True)
class RankTolerance:
    """Relative singular-value threshold used by every rank decision.

    The cut is tau = rel_eps * max(rows, cols) * sigma_max.  Keeping the
    policy explicit (rather than a hidden constant) makes borderline
    rank answers auditable.
    """

    rel_eps: float = 1e-10

    def threshold(self, sigma_max: float, rows: int, cols: int) -> float:
        return self.rel_eps * max(rows, cols) * sigma_max


DEFAULT_TOLERANCE = RankTolerance()


@dataclass(frozen=True)
class RankReport:
    """Numerical rank plus the singular-value gap ratio at the cut.

    ``margin`` is sigma_rank / sigma_{rank+1} when both exist; for a
    full-rank matrix it is sigma_min / tau, and for a rank-0 matrix it
    is tau / sigma_max (infinite for the exact zero matrix).  Callers
    flag margin < NEAR_BAND as near-threshold.
    """

    rank: int
    margin: float
    threshold: float
    singular_values: tuple = field(repr=False, default=())


def rank_report(
    mat,
    tol: RankTolerance = DEFAULT_TOLERANCE,
    scale_floor: float = 0.0,
) -> RankReport:
    """SVD-based rank of ``mat`` under ``tol`` with the gap at the cut.

    ``scale_floor`` is the magnitude at which the matrix was computed.
    When given, the cut is taken relative to max(sigma_max, floor), so
    a matrix that is pure floating-point dust left over from a larger
    computation correctly reads as rank 0 instead of full rank.
    """
    arr = as_complex_matrix(mat)
    s = np.linalg.svd(arr, compute_uv=False)
    smax = float(s[0]) if s.size else 0.0
    ref = max(smax, float(scale_floor))
    if ref == 0.0:
        return RankReport(0, math.inf, 0.0, tuple(float(x) for x in s))
    tau = tol.threshold(ref, arr.shape[0], arr.shape[1])
    rank = int(np.sum(s > tau))
    if rank == 0:
        margin = tau / smax if smax > 0.0 else math.inf
    elif rank == s.size:
        margin = float(s[-1]) / tau
    else:
        below = float(s[rank])
        margin = float(s[rank - 1]) / below if below > 0.0 else math.inf
    return RankReport(rank, margin, tau, tuple(float(x) for x in s))


def numerical_rank(mat, tol: RankTolerance = DEFAULT_TOLERANCE) -> int:
    """Number of singular values above the relative threshold."""
    return rank_report(mat, tol).rank


# ---------------------------------------------------------------------------
# state types


@dataclass(frozen=True)
class DensityMatrix:
    """Validated mn x mn density operator on C^m (x) C^n.

    Construct through :func:`validate_density`; the dataclass itself
    does not re-check invariants.
    """

    m: int
    n: int
    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", _freeze(np.array(self.mat, dtype=complex)))


@dataclass(frozen=True)
class PureState:
    """Unit vector v = sum_ij a_ij |ij> on C^m (x) C^n."""

    m: int
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = as_complex_vector(self.amplitudes, "amplitudes")
        if amps.shape != (self.m * self.n,):
            raise ShapeMismatch(
                f"amplitudes must have length m*n={self.m * self.n}, got {amps.shape[0]}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > UNIT_NORM_ATOL:
            raise NotNormalized(f"|norm - 1| = {abs(norm - 1.0):.3e} exceeds {UNIT_NORM_ATOL:.1e}")
        object.__setattr__(self, "amplitudes", _freeze(amps))


@dataclass(frozen=True)
class Ensemble:
    """Convex realization rho = sum_l p_l P_{v_l}.

    ``vectors`` holds the t unit vectors as columns of an mn x t matrix.
    Weights are strictly positive (> WEIGHT_MIN) and may sum to
    slightly less than 1 for sub-normalized collections; only
    :func:`density_from_ensemble` insists on unit trace.
    """

    m: int
    n: int
    weights: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ShapeMismatch("weights must be a non-empty 1-D array")
        if not np.all(np.isfinite(w)):
            raise ShapeMismatch("weights have non-finite entries")
        if np.min(w) <= WEIGHT_MIN:
            raise NotPositive(
                f"ensemble weight {np.min(w):.3e} is not strictly positive (min {WEIGHT_MIN:.1e})"
            )
        if float(np.sum(w)) > 1.0 + TRACE_ATOL:
            raise TraceNotOne(f"weight sum {float(np.sum(w)):.12f} exceeds 1 + {TRACE_ATOL:.1e}")
        v = as_complex_matrix(self.vectors, "vectors")
        if v.shape != (self.m * self.n, w.size):
            raise ShapeMismatch(
                f"vectors must be {self.m * self.n} x {w.size}, got {v.shape[0]} x {v.shape[1]}"
            )
        norms = np.linalg.norm(v, axis=0)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > UNIT_NORM_ATOL:
            raise NotNormalized(f"ensemble vector norm off by {worst:.3e}")
        object.__setattr__(self, "weights", _freeze(w))
        object.__setattr__(self, "vectors", _freeze(v))

    @property
    def size(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True)
class ProductEnsemble:
    """Separable realization rho = sum_u q_u P_{a_u (x) b_u}.

    ``factors_a`` is m x s and ``factors_b`` is n x s with the u-th
    columns giving the product term a_u (x) b_u; each product vector
    must be unit norm.
    """

    m: int
    n: int
    weights: np.ndarray
    factors_a: np.ndarray
    factors_b: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ShapeMismatch("weights must be a non-empty 1-D array")
        if np.min(w) <= WEIGHT_MIN:
            raise NotPositive(f"product-term weight {np.min(w):.3e} is not strictly positive")
        if float(np.sum(w)) > 1.0 + TRACE_ATOL:
            raise TraceNotOne(f"weight sum {float(np.sum(w)):.12f} exceeds 1 + {TRACE_ATOL:.1e}")
        fa = as_complex_matrix(self.factors_a, "factorsA")
        fb = as_complex_matrix(self.factors_b, "factorsB")
        if fa.shape != (self.m, w.size):
            raise ShapeMismatch(f"factorsA must be {self.m} x {w.size}, got {fa.shape}")
        if fb.shape != (self.n, w.size):
            raise ShapeMismatch(f"factorsB must be {self.n} x {w.size}, got {fb.shape}")
        prod_norms = np.linalg.norm(fa, axis=0) * np.linalg.norm(fb, axis=0)
        worst = float(np.max(np.abs(prod_norms - 1.0)))
        if worst > UNIT_NORM_ATOL:
            raise NotNormalized(f"product vector norm off by {worst:.3e}")
        object.__setattr__(self, "weights", _freeze(w))
        object.__setattr__(self, "factors_a", _freeze(fa))
        object.__setattr__(self, "factors_b", _freeze(fb))

    @property
    def size(self) -> int:
        return int(self.weights.size)


# ---------------------------------------------------------------------------
# construction and validation


def validate_density(mat, m: int, n: int) -> DensityMatrix:
    """Check shape, Hermiticity, positivity and trace; never repairs.

    Raises the named error for the first violated invariant, with the
    violation magnitude in the message.
    """
    arr = as_complex_matrix(mat, "density matrix")
    d = m * n
    if arr.shape != (d, d):
        raise ShapeMismatch(f"expected {d} x {d} for (m, n) = ({m}, {n}), got {arr.shape}")
    scale = float(np.max(np.abs(arr))) if arr.size else 0.0
    herm_res = float(np.max(np.abs(arr - arr.conj().T)))
    if herm_res > HERMITIAN_RTOL * max(scale, 1e-300):
        raise NotHermitian(
            f"max|rho - rho^dagger| = {herm_res:.3e} exceeds {HERMITIAN_RTOL:.1e} * max|rho|"
        )
    tr = complex(np.trace(arr))
    if abs(tr - 1.0) > TRACE_ATOL:
        raise TraceNotOne(f"|trace - 1| = {abs(tr - 1.0):.3e} exceeds {TRACE_ATOL:.1e}")
    evals = np.linalg.eigvalsh((arr + arr.conj().T) / 2.0)
    if float(evals[0]) < -POSITIVITY_ATOL:
        raise NotPositive(f"min eigenvalue {float(evals[0]):.3e} below -{POSITIVITY_ATOL:.1e}")
    return DensityMatrix(m, n, arr)


def ensemble_gram(e: Ensemble) -> np.ndarray:
    """The operator sum_l p_l v_l v_l^dagger without trace validation."""
    return (e.vectors * e.weights) @ e.vectors.conj().T


def density_from_ensemble(e: Ensemble) -> DensityMatrix:
    """Mix the ensemble into a density matrix; requires unit weight sum."""
    return validate_density(ensemble_gram(e), e.m, e.n)


def pure_projector(v: PureState) -> DensityMatrix:
    """Rank-one density matrix |v><v|."""
    return validate_density(np.outer(v.amplitudes, v.amplitudes.conj()), v.m, v.n)


def block(rho: DensityMatrix, i: int, j: int) -> np.ndarray:
    """The n x n block coupling subsystem-A indices i and j (1-based)."""
    if not (1 <= i <= rho.m and 1 <= j <= rho.m):
        raise IndexOutOfRange(f"block index ({i}, {j}) outside 1..{rho.m}")
    n = rho.n
    return np.array(rho.mat[(i - 1) * n : i * n, (j - 1) * n : j * n])


def product_ensemble_to_ensemble(pe: ProductEnsemble) -> Ensemble:
    """Expand product terms a_u (x) b_u into plain ensemble vectors."""
    cols = [np.kron(pe.factors_a[:, u], pe.factors_b[:, u]) for u in range(pe.size)]
    return Ensemble(pe.m, pe.n, pe.weights, np.column_stack(cols))


def image_rank_check(e: Ensemble, tol: RankTolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff rank(sum_l p_l P_{v_l}) equals rank of the vector matrix."""
    return numerical_rank(ensemble_gram(e), tol) == numerical_rank(e.vectors, tol)


# ---------------------------------------------------------------------------
# bipartite reshuffles


def swap_factors(rho: DensityMatrix) -> DensityMatrix:
    """Exchange the tensor factors, reindexing basis |ij> -> |ji>."""
    m, n = rho.m, rho.n
    mat = rho.mat.reshape(m, n, m, n).transpose(1, 0, 3, 2).reshape(m * n, m * n)
    return validate_density(mat, n, m)


def partial_transpose(rho: DensityMatrix) -> np.ndarray:
    """Transpose over factor B; the result is Hermitian but may be indefinite."""
    m, n = rho.m, rho.n
    return rho.mat.reshape(m, n, m, n).transpose(0, 3, 2, 1).reshape(m * n, m * n)


# ---------------------------------------------------------------------------
# random objects


def haar_unitary(dim: int, seed) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre sample with
    phase-normalized diagonal.  Deterministic for a fixed seed."""
    if dim < 1:
        raise ShapeMismatch(f"unitary dimension must be >= 1, got {dim}")
    rng = seed if isinstance(seed, np.random.Generator) else derived_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    phases = np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1.0)), 1.0)
    return q * phases


def random_pure_state(m: int, n: int, rng: np.random.Generator) -> PureState:
    """Haar-random pure state on C^m (x) C^n."""
    z = rng.standard_normal(m * n) + 1j * rng.standard_normal(m * n)
    return PureState(m, n, z / np.linalg.norm(z))


def random_density_matrix(m: int, n: int, rank: int, rng: np.random.Generator) -> DensityMatrix:
    """Random rank-``rank`` state from a normalized Wishart sample."""
    d = m * n
    if not (1 <= rank <= d):
        raise ShapeMismatch(f"rank must be in 1..{d}, got {rank}")
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    return validate_density(mat, m, n)


def random_ensemble(m: int, n: int, t: int, rng: np.random.Generator) -> Ensemble:
    """Random unit vectors with simplex-uniform strictly positive weights."""
    d = m * n
    v = rng.standard_normal((d, t)) + 1j * rng.standard_normal((d, t))
    v /= np.linalg.norm(v, axis=0)
    while True:
        w = rng.dirichlet(np.ones(t))
        if np.min(w) > 1e-12:
            break
    return Ensemble(m, n, w, v)


def random_product_ensemble(m: int, n: int, s: int, rng: np.random.Generator) -> ProductEnsemble:
    """Random separable realization with s unit product terms."""
    fa = rng.standard_normal((m, s)) + 1j * rng.standard_normal((m, s))
    fb = rng.standard_normal((n, s)) + 1j * rng.standard_normal((n, s))
    fa /= np.linalg.norm(fa, axis=0)
    fb /= np.linalg.norm(fb, axis=0)
    while True:
        w = rng.dirichlet(np.ones(s))
        if np.min(w) > 1e-12:
            break
    return ProductEnsemble(m, n, w, fa, fb)


def eigen_ensemble(rho: DensityMatrix, tol: RankTolerance = DEFAULT_TOLERANCE) -> Ensemble:
    """Spectral realization of rho: eigenvectors above the rank cut."""
    evals, evecs = np.linalg.eigh((rho.mat + rho.mat.conj().T) / 2.0)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    cutoff = tol.threshold(float(max(evals[0], 0.0)), rho.m * rho.n, rho.m * rho.n)
    keep = evals > max(cutoff, WEIGHT_MIN)
    return Ensemble(rho.m, rho.n, evals[keep], evecs[:, keep])


def mix_ensemble(e: Ensemble, unitary: np.ndarray) -> Ensemble:
    """Distinct realization of the same state: apply a t x t unitary to
    the weight-square-root columns and renormalize."""
    u = as_complex_matrix(unitary, "unitary")
    if u.shape != (e.size, e.size):
        raise ShapeMismatch(f"unitary must be {e.size} x {e.size}, got {u.shape}")
    b = (e.vectors * np.sqrt(e.weights)) @ u
    norms = np.linalg.norm(b, axis=0)
    if np.min(norms) <= math.sqrt(WEIGHT_MIN):
        raise NotPositive("mixing unitary produced a vanishing column")
    return Ensemble(e.m, e.n, norms**2, b / norms)
