"""The two equivalent pencils attached to a bipartite state.

For a point r in CP^{m-1} the Hermitian form

    H(r) = sum_{i,j} r_i r_j^* rho_ij            (n x n, PSD)

is computed straight from the blocks of rho, so its rank is manifestly
independent of any chosen realization.  Given an ensemble with stacked
coefficient blocks A_1, ..., A_m the holomorphic pencil

    N(r) = sum_i r_i A_i                         (n x t)

satisfies H(r) = N(r) P N(r)^dagger with P the diagonal weight matrix,
and rank H(r) = rank N(r) because the weights are strictly positive.
The toolkit computes both routes and treats their agreement as a test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, NotHermitian
from .statecore import (
    DensityMatrix,
    Ensemble,
    PureState,
    as_complex_vector,
    swap_factors,
    _freeze,
)

HERMITIZE_GUARD = 1e-10


@dataclass(frozen=True)
class ProjectivePoint:
    """Representative of a point of CP^{k-1}, scaled so max|r_i| = 1."""

    coords: np.ndarray

    def __post_init__(self):
        c = as_complex_vector(self.coords, "coords")
        if c.size == 0:
            raise ShapeMismatch("projective point needs at least one coordinate")
        top = float(np.max(np.abs(c)))
        if top == 0.0:
            raise ValueError("projective point must have a nonzero coordinate")
        object.__setattr__(self, "coords", _freeze(c / top))

    @property
    def dim(self) -> int:
        return int(self.coords.size)


def sample_point(m: int, rng: np.random.Generator) -> ProjectivePoint:
    """Fubini-Study-uniform point: complex-Gaussian coordinates, canonicalized."""
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return ProjectivePoint(z)


def projectively_close(p: ProjectivePoint, q: ProjectivePoint, atol: float = 1e-10) -> bool:
    """True when p and q agree as projective points (up to a phase)."""
    a, b = p.coords, q.coords
    if a.size != b.size:
        return False
    overlap = abs(np.vdot(a, b))
    return abs(overlap - np.linalg.norm(a) * np.linalg.norm(b)) <= atol * a.size


@dataclass(frozen=True)
class PencilBlocks:
    """The m blocks A_1, ..., A_m (each n x t) of an ensemble matrix,
    with the ensemble weights carried along."""

    m: int
    blocks: tuple
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(_freeze(np.array(b, dtype=complex)) for b in self.blocks))
        object.__setattr__(self, "weights", _freeze(np.array(self.weights, dtype=float)))

    @property
    def n(self) -> int:
        return int(self.blocks[0].shape[0])

    @property
    def t(self) -> int:
        return int(self.blocks[0].shape[1])


def pencil_blocks(e: Ensemble) -> PencilBlocks:
    """Cut the mn x t ensemble matrix into its m row blocks."""
    n = e.n
    blocks = tuple(e.vectors[w * n : (w + 1) * n, :] for w in range(e.m))
    return PencilBlocks(e.m, blocks, e.weights)


def linear_pencil_at(pb: PencilBlocks, coords: np.ndarray) -> np.ndarray:
    """N(r) = sum_i r_i A_i for raw coordinates."""
    if coords.shape != (pb.m,):
        raise ShapeMismatch(f"expected {pb.m} coordinates, got {coords.shape}")
    out = np.zeros((pb.n, pb.t), dtype=complex)
    for ri, ai in zip(coords, pb.blocks):
        out += ri * ai
    return out


def eval_holomorphic_pencil(pb: PencilBlocks, r: ProjectivePoint) -> np.ndarray:
    """Evaluate the holomorphic pencil at a projective point."""
    return linear_pencil_at(pb, r.coords)


def hermitian_form_at(rho: DensityMatrix, coords: np.ndarray) -> np.ndarray:
    """H(r) = sum_{i,j} r_i r_j^* rho_ij for raw coordinates.

    The result is symmetrized before being returned; an anti-Hermitian
    residue above HERMITIZE_GUARD (relative) means the input matrix was
    not a valid state and raises instead of propagating silently.
    """
    m, n = rho.m, rho.n
    if coords.shape != (m,):
        raise ShapeMismatch(f"expected {m} coordinates, got {coords.shape}")
    tens = rho.mat.reshape(m, n, m, n)
    h = np.einsum("i,j,iajb->ab", coords, coords.conj(), tens)
    residue = float(np.max(np.abs(h - h.conj().T)))
    # Reference scale is the state times the point, not |H| itself: at
    # kernel points H ~ 0 and a relative-to-H guard would reject dust.
    scale = max(
        float(np.max(np.abs(h))),
        float(np.max(np.abs(rho.mat))) * float(np.sum(np.abs(coords))) ** 2,
        1e-300,
    )
    if residue > HERMITIZE_GUARD * scale:
        raise NotHermitian(
            f"anti-Hermitian residue {residue:.3e} exceeds {HERMITIZE_GUARD:.1e} * max|H|"
        )
    return (h + h.conj().T) / 2.0


def eval_hermitian_pencil(rho: DensityMatrix, r: ProjectivePoint) -> np.ndarray:
    """Hermitian form of the state at a point of CP^{m-1} (n x n, PSD)."""
    return hermitian_form_at(rho, r.coords)


def eval_hermitian_pencil_b(rho: DensityMatrix, r: ProjectivePoint) -> np.ndarray:
    """Mirror form on the B side: evaluate on the factor-swapped state."""
    return hermitian_form_at(swap_factors(rho), r.coords)


def pure_coefficients(v: PureState) -> np.ndarray:
    """n x m coefficient matrix E with E[j, i] = a_ij from v = sum a_ij |ij>.

    E @ r stacks the n linear forms a_1j r_1 + ... + a_mj r_m whose
    common zero locus is the rank-0 locus of the projector onto v, and
    rank(E) is the Schmidt rank of v.
    """
    return np.array(v.amplitudes.reshape(v.m, v.n).T)
