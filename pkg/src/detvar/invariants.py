"""Membership oracles for the rank loci, Schmidt numbers, and
local-unitary covariance checks.

The A-side locus at level k is the set of points r in CP^{m-1} where
the Hermitian form of the state has rank <= k; the B-side locus lives
in CP^{n-1}.  Conjugating the state by U_A (x) U_B moves the loci by
the linear map r -> r U_A, which `check_covariance` verifies
statistically on sampled points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import KOutOfRange, ShapeMismatch
from .pencil import (
    ProjectivePoint,
    eval_hermitian_pencil,
    eval_hermitian_pencil_b,
    pure_coefficients,
    sample_point,
)
from .statecore import (
    DEFAULT_TOLERANCE,
    NEAR_BAND,
    DensityMatrix,
    PureState,
    RankTolerance,
    _freeze,
    as_complex_matrix,
    derived_rng,
    rank_report,
    validate_density,
)


def _check_unitary(u: np.ndarray, name: str) -> np.ndarray:
    arr = as_complex_matrix(u, name)
    if arr.shape[0] != arr.shape[1]:
        raise ShapeMismatch(f"{name} must be square, got {arr.shape}")
    res = float(np.max(np.abs(arr @ arr.conj().T - np.eye(arr.shape[0]))))
    if res > 1e-12:
        raise ValueError(f"{name} is not unitary: max|UU^dagger - I| = {res:.3e}")
    return arr


@dataclass(frozen=True)
class LocalUnitary:
    """Product transformation U_A (x) U_B; both factors verified unitary."""

    u_a: np.ndarray
    u_b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u_a", _freeze(_check_unitary(self.u_a, "U_A")))
        object.__setattr__(self, "u_b", _freeze(_check_unitary(self.u_b, "U_B")))


def random_local_unitary(m: int, n: int, seed) -> LocalUnitary:
    """Independent Haar factors from one seed."""
    from .statecore import haar_unitary

    return LocalUnitary(haar_unitary(m, derived_rng(seed, 1)), haar_unitary(n, derived_rng(seed, 2)))


@dataclass(frozen=True)
class MembershipResult:
    """Outcome of one rank-locus membership query."""

    member: bool
    rank: int
    margin: float
    k: int

    def to_dict(self) -> dict:
        return {
            "member": bool(self.member),
            "rank": int(self.rank),
            "margin": _json_float(self.margin),
            "k": int(self.k),
        }


def _json_float(x: float):
    x = float(x)
    return x if math.isfinite(x) else "inf"


def form_scale(rho: DensityMatrix, r: ProjectivePoint) -> float:
    """Magnitude at which the Hermitian form at r is computed.

    Singular values of the form below the rank tolerance times this
    scale are indistinguishable from zero, so membership decisions use
    it as an absolute floor (a point exactly in the kernel leaves only
    floating-point dust, which must read as rank 0).
    """
    return float(np.max(np.abs(rho.mat))) * float(np.sum(np.abs(r.coords))) ** 2


def member_a(
    rho: DensityMatrix,
    r: ProjectivePoint,
    k: int,
    tol: RankTolerance = DEFAULT_TOLERANCE,
) -> MembershipResult:
    """Does rank of the A-side Hermitian form at r stay <= k?"""
    if not 0 <= k <= rho.n - 1:
        raise KOutOfRange(f"k must be in 0..{rho.n - 1}, got {k}")
    rep = rank_report(eval_hermitian_pencil(rho, r), tol, scale_floor=form_scale(rho, r))
    return MembershipResult(rep.rank <= k, rep.rank, rep.margin, k)


def member_b(
    rho: DensityMatrix,
    r: ProjectivePoint,
    k: int,
    tol: RankTolerance = DEFAULT_TOLERANCE,
) -> MembershipResult:
    """B-side membership; r lives in CP^{n-1} and ranks are <= m."""
    if not 0 <= k <= rho.m - 1:
        raise KOutOfRange(f"k must be in 0..{rho.m - 1}, got {k}")
    rep = rank_report(eval_hermitian_pencil_b(rho, r), tol, scale_floor=form_scale(rho, r))
    return MembershipResult(rep.rank <= k, rep.rank, rep.margin, k)


# ---------------------------------------------------------------------------
# Schmidt structure of pure states


@dataclass(frozen=True)
class SchmidtReport:
    """Schmidt number d plus the projective dimension of the kernel locus.

    ``v0_dim`` is None exactly when the kernel locus is empty (d = m);
    otherwise d = m - 1 - v0_dim.  ``swapped`` records that the state
    was factor-swapped to enforce m <= n before the computation.
    """

    d: int
    v0_dim: int | None
    singular_values: tuple
    swapped: bool = False

    def to_dict(self) -> dict:
        return {
            "d": int(self.d),
            "v0_dim": "EMPTY" if self.v0_dim is None else int(self.v0_dim),
            "singular_values": [float(s) for s in self.singular_values],
            "swapped": bool(self.swapped),
        }


def _swap_pure(v: PureState) -> PureState:
    amps = v.amplitudes.reshape(v.m, v.n).T.reshape(-1)
    return PureState(v.n, v.m, amps)


def schmidt_number(v: PureState, tol: RankTolerance = DEFAULT_TOLERANCE) -> SchmidtReport:
    """Schmidt number read off the rank of the coefficient matrix.

    When m > n the state is swapped first and the report is expressed
    against the swapped orientation (flagged in ``swapped``).
    """
    swapped = v.m > v.n
    state = _swap_pure(v) if swapped else v
    coeff = pure_coefficients(state)
    rep = rank_report(coeff, tol)
    d = rep.rank
    sv = np.linalg.svd(coeff, compute_uv=False)
    v0 = None if d == state.m else state.m - 1 - d
    return SchmidtReport(d, v0, tuple(float(x) for x in sv[:d]), swapped)


def pure_kernel_basis(v: PureState, tol: RankTolerance = DEFAULT_TOLERANCE) -> list:
    """Orthogonal basis points spanning the kernel locus of a pure state.

    The locus is the projectivized null space of the coefficient
    matrix, a linear subspace, so exact linear algebra suffices; the
    list is empty iff the Schmidt number equals m.
    """
    swapped = v.m > v.n
    state = _swap_pure(v) if swapped else v
    coeff = pure_coefficients(state)
    d = rank_report(coeff, tol).rank
    _, _, vh = np.linalg.svd(coeff)
    return [ProjectivePoint(vh[j].conj()) for j in range(d, state.m)]


def product_factors(v: PureState) -> tuple:
    """Best product factors (a, b) from the top singular triple.

    For Schmidt-number-1 states the reconstruction a (x) b matches v up
    to phase with fidelity 1 - O(eps).
    """
    coeff = pure_coefficients(v)
    u, s, vh = np.linalg.svd(coeff)
    # coeff = outer(b, a) without conjugation, so the top right-singular
    # row vh[0] is a up to scale while the left vector is b.
    a = s[0] * vh[0]
    b = u[:, 0]
    return a / np.linalg.norm(a), b / np.linalg.norm(b)


# ---------------------------------------------------------------------------
# local-unitary action


def transform_local(rho: DensityMatrix, t: LocalUnitary) -> DensityMatrix:
    """Conjugate the state by U_A (x) U_B."""
    if t.u_a.shape != (rho.m, rho.m) or t.u_b.shape != (rho.n, rho.n):
        raise ShapeMismatch(
            f"local unitary shapes {t.u_a.shape}, {t.u_b.shape} do not match (m, n) = ({rho.m}, {rho.n})"
        )
    w = np.kron(t.u_a, t.u_b)
    return validate_density(w @ rho.mat @ w.conj().T, rho.m, rho.n)


def pushforward_point(r: ProjectivePoint, u_a: np.ndarray) -> ProjectivePoint:
    """Image r' with r'_l = sum_i r_i u_il (row vector times U_A)."""
    u = as_complex_matrix(u_a, "U_A")
    if u.shape != (r.dim, r.dim):
        raise ShapeMismatch(f"U_A must be {r.dim} x {r.dim}, got {u.shape}")
    return ProjectivePoint(r.coords @ u)


@dataclass(frozen=True)
class CovarianceReport:
    """Sampled agreement between membership before/after a local unitary.

    Samples whose worse-side margin falls below the near-threshold band
    are counted separately and excluded from agree/disagree.
    """

    agree: int
    disagree: int
    near_threshold: int
    min_margin: float

    def to_dict(self) -> dict:
        return {
            "agree": int(self.agree),
            "disagree": int(self.disagree),
            "near_threshold": int(self.near_threshold),
            "min_margin": _json_float(self.min_margin),
        }


def check_covariance(
    rho: DensityMatrix,
    t: LocalUnitary,
    k: int,
    samples: int,
    seed: int,
    tol: RankTolerance = DEFAULT_TOLERANCE,
    near_band: float = NEAR_BAND,
) -> CovarianceReport:
    """Verify on random points that membership in the locus of the
    transformed state equals membership of the pushed-forward point in
    the locus of the original state.

    Disagreement is a reported result, never an exception.  Each sample
    draws from a derived (seed, index) stream so runs parallelize
    reproducibly.
    """
    if samples < 1:
        raise ShapeMismatch(f"samples must be >= 1, got {samples}")
    moved = transform_local(rho, t)
    agree = disagree = near = 0
    min_margin = math.inf
    for i in range(samples):
        r = sample_point(rho.m, derived_rng(seed, 7, i))
        lhs = member_a(moved, r, k, tol)
        rhs = member_a(rho, pushforward_point(r, t.u_a), k, tol)
        margin = min(lhs.margin, rhs.margin)
        min_margin = min(min_margin, margin)
        if margin < near_band:
            near += 1
        elif lhs.member == rhs.member:
            agree += 1
        else:
            disagree += 1
    return CovarianceReport(agree, disagree, near, min_margin)
