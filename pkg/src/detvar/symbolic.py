"""Exact polynomial layer over the holomorphic pencil.

The entries of N(r) = sum_i r_i A_i are linear forms in r, so every
(k+1) x (k+1) minor is a homogeneous polynomial of degree k+1 whose
common zero locus is the A-side rank locus at level k.  For a
separable realization the pencil factors through a diagonal of linear
forms, which makes every minor a constant times k+1 linear forms; the
diagnostic below tests that structure and, failing it, looks for a
certified curved witness on the variety itself.

Everything works on a canonical sparse representation: exponent
multi-index -> complex coefficient, homogeneous by construction, with
coefficients below 1e-14 (relative) pruned after each arithmetic step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (
    CombinatorialBlowup,
    DegreeZero,
    EnsembleMismatch,
    KOutOfRange,
    ShapeMismatch,
)
from .pencil import PencilBlocks, linear_pencil_at, pencil_blocks
from .statecore import (
    DEFAULT_TOLERANCE,
    NEAR_BAND,
    DensityMatrix,
    Ensemble,
    RankTolerance,
    _freeze,
    as_complex_vector,
    derived_rng,
    ensemble_gram,
    rank_report,
)

PRUNE_REL = 1e-14

# Verdicts of factor_into_linear_forms.
FACTORED = "Factored"
NOT_PRODUCT = "NotProductOfLinearForms"
INCONCLUSIVE = "Inconclusive"

# Verdicts of linearity_diagnostic.
CONSISTENT_WITH_SEPARABLE = "ConsistentWithSeparable"
NONLINEAR_VARIETY_WITNESS = "NonlinearVarietyWitness"

# A division remainder below ACCEPT_REL certifies a linear factor; one
# above FAIL_REL certifies the candidate is not a factor.  The window in
# between is treated as ambiguous and can only yield Inconclusive.
ACCEPT_REL = 1e-9
FAIL_REL = 1e-4


class MultiPoly:
    """Sparse homogeneous polynomial in r_1..r_m with complex coefficients."""

    __slots__ = ("num_vars", "degree", "terms")

    def __init__(self, num_vars: int, degree: int, terms=None, prune: bool = True):
        self.num_vars = int(num_vars)
        self.degree = int(degree)
        clean: dict = {}
        if terms:
            for exps, coef in terms.items():
                e = tuple(int(x) for x in exps)
                if len(e) != self.num_vars or any(x < 0 for x in e):
                    raise ShapeMismatch(f"bad exponent multi-index {e} for {self.num_vars} variables")
                if sum(e) != self.degree:
                    raise ShapeMismatch(
                        f"term {e} breaks homogeneity: degree {sum(e)} != {self.degree}"
                    )
                c = complex(coef)
                if c != 0:
                    clean[e] = clean.get(e, 0j) + c
        self.terms = clean
        if prune:
            self._prune()

    def _prune(self):
        if not self.terms:
            return
        cut = PRUNE_REL * max(abs(c) for c in self.terms.values())
        self.terms = {e: c for e, c in self.terms.items() if abs(c) >= cut and c != 0}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, num_vars: int, degree: int) -> "MultiPoly":
        return cls(num_vars, degree, {})

    @classmethod
    def linear(cls, coeffs) -> "MultiPoly":
        c = as_complex_vector(coeffs, "linear form coefficients")
        m = c.size
        terms = {}
        for i, ci in enumerate(c):
            if ci != 0:
                e = [0] * m
                e[i] = 1
                terms[tuple(e)] = complex(ci)
        return cls(m, 1, terms)

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def canonical_terms(self):
        """Terms sorted by exponent multi-index; the serialization order."""
        return sorted(self.terms.items())

    def to_obj(self) -> dict:
        """Canonical JSON-ready form of the polynomial."""
        return {
            "vars": self.num_vars,
            "degree": self.degree,
            "terms": [
                {"exps": list(e), "coef": [float(c.real), float(c.imag)]}
                for e, c in self.canonical_terms()
            ],
        }

    def eval(self, coords) -> complex:
        """Direct monomial sum at raw coordinates."""
        c = np.asarray(coords, dtype=complex)
        if c.shape != (self.num_vars,):
            raise ShapeMismatch(f"expected {self.num_vars} coordinates, got {c.shape}")
        total = 0j
        for e, coef in self.terms.items():
            v = coef
            for x, p in zip(c, e):
                if p:
                    v *= x**p
            total += v
        return total

    def diff(self, i: int) -> "MultiPoly":
        """Partial derivative with respect to variable i."""
        out = {}
        for e, coef in self.terms.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            out[tuple(ne)] = coef * e[i]
        return MultiPoly(self.num_vars, max(self.degree - 1, 0), out)

    def gradient_at(self, coords) -> np.ndarray:
        return np.array([self.diff(i).eval(coords) for i in range(self.num_vars)])

    def restrict_to_line(self, u, w) -> np.ndarray:
        """Univariate coefficients (descending) of t -> p(u + t w)."""
        u = np.asarray(u, dtype=complex)
        w = np.asarray(w, dtype=complex)
        acc = np.zeros(self.degree + 1, dtype=complex)
        for e, coef in self.terms.items():
            poly = np.array([coef])
            for ui, wi, p in zip(u, w, e):
                base = np.array([wi, ui])
                for _ in range(p):
                    poly = np.convolve(poly, base)
            acc[self.degree + 1 - poly.size :] += poly
        return acc

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        if other.num_vars != self.num_vars or other.degree != self.degree:
            raise ShapeMismatch("can only add homogeneous polynomials of equal degree")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0j) + c
        return MultiPoly(self.num_vars, self.degree, out)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.num_vars, self.degree, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, MultiPoly):
            if other.num_vars != self.num_vars:
                raise ShapeMismatch("variable count mismatch in polynomial product")
            out: dict = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    out[e] = out.get(e, 0j) + c1 * c2
            return MultiPoly(self.num_vars, self.degree + other.degree, out)
        c = complex(other)
        return MultiPoly(self.num_vars, self.degree, {e: c * v for e, v in self.terms.items()})

    __rmul__ = __mul__

    def __repr__(self):
        return f"MultiPoly(vars={self.num_vars}, degree={self.degree}, terms={len(self.terms)})"


def eval_poly(p: MultiPoly, coords) -> complex:
    """Module-level alias for MultiPoly.eval."""
    return p.eval(coords)


@dataclass(frozen=True)
class LinearForm:
    """Nonzero linear form, scaled so its largest-modulus coefficient is 1."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = as_complex_vector(self.coefficients, "coefficients")
        idx = int(np.argmax(np.abs(c)))
        top = c[idx]
        if top == 0:
            raise ValueError("linear form must have a nonzero coefficient")
        object.__setattr__(self, "coefficients", _freeze(c / top))

    def eval(self, coords) -> complex:
        return complex(np.dot(self.coefficients, np.asarray(coords, dtype=complex)))

    def to_poly(self) -> MultiPoly:
        return MultiPoly.linear(self.coefficients)


def _canonical_factor(vec: np.ndarray) -> tuple:
    """LinearForm plus the scale the canonicalization divided out."""
    idx = int(np.argmax(np.abs(vec)))
    scale = complex(vec[idx])
    return LinearForm(vec), scale


@dataclass(frozen=True)
class FactorizationResult:
    """Outcome of the linear-forms splitting attempt.

    When status is Factored, constant * prod(factors) reproduces the
    input coefficient-wise within ``residual`` (relative, <= 1e-9).
    NotProductOfLinearForms always carries a division certificate.
    """

    status: str
    constant: complex
    factors: tuple
    residual: float
    certificate: dict | None = None


def _expand_product(num_vars: int, constant: complex, factors) -> MultiPoly:
    acc = MultiPoly(num_vars, 0, {(0,) * num_vars: constant})
    for f in factors:
        acc = acc * f.to_poly()
    return acc


def _relative_diff(a: MultiPoly, b: MultiPoly) -> float:
    scale = max(a.max_abs(), b.max_abs())
    if scale == 0.0:
        return 0.0
    return (a - b).max_abs() / scale


def divmod_linear(p: MultiPoly, coeffs) -> tuple:
    """Divide a homogeneous polynomial by a linear form.

    Returns (quotient, remainder) with p = form * quotient + remainder;
    the remainder is free of the pivot variable.  Exact synthetic
    division, no pruning of the remainder, so its size measures how far
    the form is from being a true factor.
    """
    lf = as_complex_vector(coeffs, "linear form")
    if lf.size != p.num_vars:
        raise ShapeMismatch("linear form has wrong variable count")
    if p.degree < 1:
        raise DegreeZero("cannot divide a polynomial of degree < 1")
    piv = int(np.argmax(np.abs(lf)))
    cp = lf[piv]
    if cp == 0:
        raise ValueError("linear form must be nonzero")
    rem = dict(p.terms)
    quo: dict = {}
    for level in range(p.degree, 0, -1):
        for e in [e for e in rem if e[piv] == level]:
            c = rem.pop(e)
            qe = tuple(x - 1 if idx == piv else x for idx, x in enumerate(e))
            qc = c / cp
            quo[qe] = quo.get(qe, 0j) + qc
            for i in range(p.num_vars):
                if i == piv or lf[i] == 0:
                    continue
                te = tuple(x + 1 if idx == i else x for idx, x in enumerate(qe))
                nv = rem.get(te, 0j) - qc * lf[i]
                if nv == 0:
                    rem.pop(te, None)
                else:
                    rem[te] = nv
    quotient = MultiPoly(p.num_vars, p.degree - 1, quo)
    remainder = MultiPoly(p.num_vars, p.degree, rem, prune=False)
    return quotient, remainder


# ---------------------------------------------------------------------------
# minors of the pencil


def pencil_minor_polys(
    pb: PencilBlocks,
    k: int,
    cap: int = 10_000,
    max_order: int = 4,
) -> list:
    """All (k+1) x (k+1) minors of N(r) as homogeneous polynomials.

    Computed by exact cofactor expansion over the linear-form entries.
    Enumeration order is row sets outer, column sets inner, both in
    lexicographic order, so outputs are canonical.
    """
    n, t = pb.n, pb.t
    order = k + 1
    if k < 0 or order > min(n, t):
        raise KOutOfRange(f"k must satisfy 0 <= k and k+1 <= min(n, t) = {min(n, t)}, got {k}")
    if order > max_order:
        raise CombinatorialBlowup(f"minor order {order} exceeds the cap {max_order}")
    count = math.comb(n, order) * math.comb(t, order)
    if count > cap:
        raise CombinatorialBlowup(f"{count} minors exceed the cap {cap}")
    m = pb.m
    entry = [
        [MultiPoly.linear([pb.blocks[i][j, l] for i in range(m)]) for l in range(t)]
        for j in range(n)
    ]
    minors = []
    for rows in combinations(range(n), order):
        for cols in combinations(range(t), order):
            sub = [[entry[j][l] for l in cols] for j in rows]
            minors.append(_det_poly(sub, m, order))
    return minors


def _det_poly(mat: list, num_vars: int, order: int) -> MultiPoly:
    size = len(mat)
    if size == 1:
        return mat[0][0]
    acc = MultiPoly.zero(num_vars, order)
    for j, head in enumerate(mat[0]):
        if head.is_zero:
            continue
        sub = [row[:j] + row[j + 1 :] for row in mat[1:]]
        cofactor = head * _det_poly(sub, num_vars, order - 1)
        acc = acc + (cofactor if j % 2 == 0 else -cofactor)
    return acc


def minor_vanish_threshold(pencil_value: np.ndarray, k: int, tol: RankTolerance = DEFAULT_TOLERANCE) -> float:
    """Vanishing cut for order-(k+1) minors evaluated at one point.

    Any (k+1) x (k+1) subdeterminant is bounded by the product of the
    top k+1 singular values of N(r), so scaling the rank threshold by
    the product of the top k gives a sound cut: below it exactly when
    the numeric rank is <= k, away from the near-threshold band.
    """
    s = np.linalg.svd(np.asarray(pencil_value, dtype=complex), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0.0
    tau = tol.threshold(float(s[0]), *pencil_value.shape)
    return 4.0 * float(np.prod(s[:k])) * tau


# ---------------------------------------------------------------------------
# separable minor structure


@dataclass(frozen=True)
class StructureReport:
    """Coefficient-level check of the product structure of every minor."""

    total_minors: int
    violations: tuple
    max_residual: float

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "total_minors": int(self.total_minors),
            "violations": [
                {"rows": list(r), "cols": list(c), "residual": float(x)}
                for r, c, x in self.violations
            ],
            "max_residual": float(self.max_residual),
        }


def separable_minor_structure(pe, k: int, residual_tol: float = 1e-10, cap: int = 10_000) -> StructureReport:
    """Verify every minor of a product realization splits as
    det(B restricted) times the k+1 linear forms of the chosen columns.

    Violations are reported, not raised.
    """
    from .statecore import product_ensemble_to_ensemble

    e = product_ensemble_to_ensemble(pe)
    pb = pencil_blocks(e)
    n, s = pb.n, pb.t
    order = k + 1
    if k < 0 or order > min(n, s):
        raise KOutOfRange(f"k must satisfy 0 <= k and k+1 <= min(n, s) = {min(n, s)}, got {k}")
    minors = pencil_minor_polys(pb, k, cap=cap)
    b = pe.factors_b
    forms = [MultiPoly.linear(pe.factors_a[:, u]) for u in range(s)]
    violations = []
    worst = 0.0
    idx = 0
    for rows in combinations(range(n), order):
        for cols in combinations(range(s), order):
            const = complex(np.linalg.det(b[np.ix_(rows, cols)]))
            expected = MultiPoly(pe.m, 0, {(0,) * pe.m: 1.0})
            for u in cols:
                expected = expected * forms[u]
            expected = expected * const if const != 0 else MultiPoly.zero(pe.m, order)
            res = _relative_diff(minors[idx], expected)
            worst = max(worst, res)
            if res > residual_tol:
                violations.append((rows, cols, res))
            idx += 1
    return StructureReport(len(minors), tuple(violations), worst)


# ---------------------------------------------------------------------------
# splitting into linear forms


def factor_into_linear_forms(p: MultiPoly, seed: int = 0) -> FactorizationResult:
    """Try to split a homogeneous polynomial into linear factors.

    Binary forms always split (complete univariate root-finding).  For
    three or more variables, candidate factors come from restricting
    the polynomial to random planes: each root of the restricted binary
    form lifts through the exact gradient (Hessian column for double
    points) and is then verified by exact division.  The
    NotProductOfLinearForms verdict requires every candidate from three
    independent planes to fail division decisively; anything softer is
    Inconclusive.
    """
    if p.is_zero or p.degree == 0:
        raise DegreeZero("factorization needs a nonzero polynomial of degree >= 1")
    if p.num_vars == 1:
        coef = p.terms[(p.degree,)]
        factors = tuple(LinearForm(np.array([1.0 + 0j])) for _ in range(p.degree))
        return FactorizationResult(FACTORED, coef, factors, 0.0)
    if p.num_vars == 2:
        return _factor_binary(p)
    return _factor_multivariate(p, seed)


def _polish_roots(coeffs: np.ndarray, roots: np.ndarray, rounds: int = 3) -> np.ndarray:
    der = np.polyder(coeffs)
    out = np.array(roots, dtype=complex)
    for _ in range(rounds):
        fv = np.polyval(coeffs, out)
        dv = np.polyval(der, out)
        safe = np.abs(dv) > 0
        out[safe] = out[safe] - fv[safe] / dv[safe]
    return out


def _factor_binary(p: MultiPoly) -> FactorizationResult:
    d = p.degree
    c = np.zeros(d + 1, dtype=complex)
    for (e0, e1), coef in p.terms.items():
        c[e1] = coef
    j0 = min(j for j in range(d + 1) if c[j] != 0)
    f = c[j0:]
    factors = []
    constant = 1.0 + 0j
    for _ in range(j0):
        factors.append(LinearForm(np.array([0.0, 1.0], dtype=complex)))
    if f.size > 1:
        roots = _polish_roots(f, np.roots(f))
        for z in roots:
            lf, scale = _canonical_factor(np.array([1.0, -z], dtype=complex))
            factors.append(lf)
            constant *= scale
    constant *= f[0]
    expansion = _expand_product(2, constant, factors)
    residual = _relative_diff(expansion, p)
    if residual <= ACCEPT_REL:
        return FactorizationResult(FACTORED, constant, tuple(factors), residual)
    return FactorizationResult(
        INCONCLUSIVE,
        constant,
        tuple(factors),
        residual,
        certificate={"reason": "binary expansion residual above tolerance", "residual": residual},
    )


def _extract_one_factor(work: MultiPoly, rng: np.random.Generator):
    """One deflation step: plane restriction, root lifting, division check.

    Returns (LinearForm, quotient, remainder_rel) on success, or a dict
    of failure diagnostics when no candidate divides.
    """
    m = work.num_vars
    scale = work.max_abs()
    best_rem = math.inf
    candidates = 0
    for _ in range(4):
        u = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        w = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        coeffs = work.restrict_to_line(u, w)
        top = float(np.max(np.abs(coeffs)))
        if top == 0.0 or abs(coeffs[0]) < 1e-8 * top:
            continue
        roots = _polish_roots(coeffs, np.roots(coeffs))
        for t0 in roots:
            x0 = u + t0 * w
            nrm = float(np.max(np.abs(x0)))
            if nrm == 0.0 or not np.isfinite(nrm):
                continue
            x0 = x0 / nrm
            grad = work.gradient_at(x0)
            gn = float(np.linalg.norm(grad))
            if gn > 1e-7 * scale:
                cand = grad
            else:
                # Double point of a repeated factor: the holomorphic
                # Hessian collapses to a rank-1 multiple of the factor.
                hess = np.array(
                    [[work.diff(i).diff(j).eval(x0) for j in range(m)] for i in range(m)]
                )
                norms = np.linalg.norm(hess, axis=0)
                col = int(np.argmax(norms))
                if norms[col] <= 1e-7 * scale:
                    continue
                cand = hess[:, col]
            lf = LinearForm(cand)
            quotient, remainder = divmod_linear(work, lf.coefficients)
            rel = remainder.max_abs() / scale if scale else 0.0
            candidates += 1
            best_rem = min(best_rem, rel)
            if rel <= ACCEPT_REL:
                return lf, quotient, rel
    return {"kind": "division", "candidates": candidates, "min_remainder": best_rem}


def _factor_multivariate(p: MultiPoly, seed: int) -> FactorizationResult:
    m = p.num_vars
    attempts = []
    for attempt in range(3):
        rng = derived_rng(seed, 77, attempt)
        work = p
        factors = []
        failure = None
        while work.degree >= 1:
            if work.is_zero:
                failure = {"kind": "vanished", "candidates": 0, "min_remainder": math.inf}
                break
            got = _extract_one_factor(work, rng)
            if isinstance(got, dict):
                failure = got
                break
            lf, work, _ = got
            factors.append(lf)
        if failure is None and work.degree == 0:
            constant = work.terms.get((0,) * m, 0j)
            expansion = _expand_product(m, constant, factors)
            residual = _relative_diff(expansion, p)
            if residual <= ACCEPT_REL:
                return FactorizationResult(FACTORED, constant, tuple(factors), residual)
            failure = {"kind": "re-expansion", "candidates": len(factors), "min_remainder": residual}
        failure["stage_degree"] = work.degree
        attempts.append(failure)
    # Only clean division failures certify: re-expansion drift on a true
    # product must never be mistaken for non-factorability.
    decisive = all(
        a.get("kind") == "division"
        and a.get("candidates", 0) >= 1
        and a.get("min_remainder", 0.0) >= FAIL_REL
        for a in attempts
    )
    cert = {"planes": attempts, "accept_tol": ACCEPT_REL, "fail_tol": FAIL_REL}
    if decisive:
        return FactorizationResult(NOT_PRODUCT, 0j, (), math.inf, certificate=cert)
    return FactorizationResult(INCONCLUSIVE, 0j, (), math.inf, certificate=cert)


# ---------------------------------------------------------------------------
# linearity diagnostic


@dataclass(frozen=True)
class DiagnosticReport:
    """Outcome of the variety-linearity diagnostic for one realization.

    The minors depend on the supplied ensemble even though the locus
    does not, so the report records which realization was analyzed.
    """

    verdict: str
    k: int
    minors_total: int
    minors_zero: int
    factored: int
    not_product: tuple
    inconclusive: int
    witness: dict | None
    ensemble_size: int
    ensemble_weights: tuple

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "k": int(self.k),
            "minors_total": int(self.minors_total),
            "minors_zero": int(self.minors_zero),
            "factored": int(self.factored),
            "not_product": [int(i) for i in self.not_product],
            "inconclusive": int(self.inconclusive),
            "witness": self.witness,
            "ensemble": {
                "t": int(self.ensemble_size),
                "weights": [float(w) for w in self.ensemble_weights],
            },
        }


def linearity_diagnostic(
    rho: DensityMatrix,
    ensemble: Ensemble,
    k: int,
    trials: int = 20,
    seed: int = 0,
    tol: RankTolerance = DEFAULT_TOLERANCE,
) -> DiagnosticReport:
    """Test whether the level-k locus looks like a union of linear pieces.

    Every nonzero minor splitting into linear forms is consistent with
    a separable state.  A minor that certifiably does not split only
    upgrades to NonlinearVarietyWitness when sampling also exhibits a
    curved certificate: two locus points whose connecting line leaves
    the locus while a curved continuation between them stays inside.
    Everything else is Inconclusive; the diagnostic never claims
    separability.
    """
    gram = ensemble_gram(ensemble)
    gap = float(np.max(np.abs(gram - rho.mat)))
    if gap > 1e-10:
        raise EnsembleMismatch(f"ensemble reconstructs rho only to {gap:.3e} (limit 1e-10)")
    pb = pencil_blocks(ensemble)
    minors = pencil_minor_polys(pb, k)
    zero = sum(1 for q in minors if q.is_zero)
    factored = 0
    inconclusive = 0
    not_product = []
    certificates = {}
    for idx, q in enumerate(minors):
        if q.is_zero:
            continue
        res = factor_into_linear_forms(q, seed=derived_rng(seed, 3, idx).integers(2**32))
        if res.status == FACTORED:
            factored += 1
        elif res.status == NOT_PRODUCT:
            not_product.append(idx)
            certificates[idx] = res.certificate
        else:
            inconclusive += 1
    nonzero = len(minors) - zero
    if factored == nonzero:
        verdict, witness = CONSISTENT_WITH_SEPARABLE, None
    elif not_product:
        witness = _search_curved_witness(minors, pb, k, not_product, trials, seed, tol)
        if witness is not None:
            witness["minor"] = minors[witness["minor_index"]].to_obj()
            witness["division_certificate"] = certificates[witness["minor_index"]]
            verdict = NONLINEAR_VARIETY_WITNESS
        else:
            verdict = INCONCLUSIVE
    else:
        verdict, witness = INCONCLUSIVE, None
    return DiagnosticReport(
        verdict,
        k,
        len(minors),
        zero,
        factored,
        tuple(not_product),
        inconclusive,
        witness,
        ensemble.size,
        tuple(float(w) for w in ensemble.weights),
    )


def _pairs(vec: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in vec]


def _search_curved_witness(minors, pb, k, not_product_idx, trials, seed, tol, near_band=NEAR_BAND):
    """Look for locus points with a curved local continuation.

    Points are found as roots of a non-splitting minor along random
    lines and verified against the numeric rank of the pencil (margin
    at least the near band) plus every symbolic minor.  Continuation
    steps Newton-correct back onto the minor's zero set; three
    non-collinear verified points with the chord midpoint decisively
    outside the locus certify curvature.
    """
    m = pb.m
    block_scale = max(float(np.max(np.abs(b))) for b in pb.blocks)

    def pencil(x):
        return linear_pencil_at(pb, x)

    def floor(x):
        return block_scale * float(np.sum(np.abs(x)))

    def in_variety(x):
        nv = pencil(x)
        rep = rank_report(nv, tol, scale_floor=floor(x))
        if rep.rank > k or rep.margin < near_band:
            return False
        cut = minor_vanish_threshold(nv, k, tol)
        return all(abs(q.eval(x)) <= cut for q in minors if not q.is_zero)

    def decisively_out(x):
        rep = rank_report(pencil(x), tol, scale_floor=floor(x))
        return rep.rank > k and rep.margin >= near_band

    for f_idx in not_product_idx:
        f = minors[f_idx]
        f_scale = f.max_abs()
        for trial in range(trials):
            rng = derived_rng(seed, 91, f_idx, trial)
            u = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            w = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            coeffs = f.restrict_to_line(u, w)
            top = float(np.max(np.abs(coeffs)))
            if top == 0.0 or abs(coeffs[0]) < 1e-8 * top:
                continue
            roots = _polish_roots(coeffs, np.roots(coeffs))
            for t0 in roots:
                x0 = u + t0 * w
                nrm = float(np.max(np.abs(x0)))
                if nrm == 0.0 or not np.isfinite(nrm):
                    continue
                x0 = x0 / nrm
                if not in_variety(x0):
                    continue
                grad = f.gradient_at(x0)
                gg = np.dot(grad, grad)
                if abs(gg) < 1e-12 * f_scale**2:
                    continue
                d = rng.standard_normal(m) + 1j * rng.standard_normal(m)
                d = d - (np.dot(grad, d) / gg) * grad
                dn = float(np.linalg.norm(d))
                if dn < 1e-8:
                    continue
                d = d / dn
                q1 = _newton_onto(f, x0 + 0.05 * d)
                q2 = _newton_onto(f, x0 + 0.10 * d)
                if q1 is None or q2 is None:
                    continue
                if not (in_variety(q1) and in_variety(q2)):
                    continue
                mid = (x0 + q2) / 2.0
                if not decisively_out(mid):
                    continue
                stack = np.vstack([x0, q1, q2])
                sv = np.linalg.svd(stack, compute_uv=False)
                bend = float(sv[2] / sv[0]) if sv[0] > 0 else 0.0
                if bend <= 1e-7:
                    continue
                mid_rep = rank_report(pencil(mid), tol)
                return {
                    "minor_index": int(f_idx),
                    "point_a": _pairs(x0),
                    "point_b": _pairs(q2),
                    "curved_point": _pairs(q1),
                    "line_midpoint": _pairs(mid),
                    "midpoint_rank": int(mid_rep.rank),
                    "collinearity_residual": bend,
                }
    return None


def _newton_onto(f: MultiPoly, x: np.ndarray, max_iter: int = 40):
    """Newton-correct x onto the zero set of a holomorphic polynomial."""
    scale = f.max_abs()
    target = 1e-14 * max(scale, 1e-300)
    x = np.array(x, dtype=complex)
    for _ in range(max_iter):
        fx = f.eval(x)
        if abs(fx) <= target:
            return x
        grad = f.gradient_at(x)
        denom = float(np.linalg.norm(grad)) ** 2
        if denom <= 1e-30:
            return None
        x = x - (fx / denom) * grad.conj()
    return x if abs(f.eval(x)) <= 10 * target else None
