"""JSON file formats for states, ensembles, points and polynomials.

Complex scalars are two-element arrays [re, im] everywhere.  Structural
problems raise ParseError; invariant violations surface as the named
statecore errors so callers can tell malformed files from invalid
states.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ParseError
from .pencil import ProjectivePoint
from .statecore import (
    DensityMatrix,
    Ensemble,
    ProductEnsemble,
    PureState,
    validate_density,
)
from .symbolic import MultiPoly


def json_dumps(obj) -> str:
    """Canonical JSON: sorted keys, compact separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def jfloat(x: float):
    x = float(x)
    return x if math.isfinite(x) else "inf"


# ---------------------------------------------------------------------------
# scalars and arrays


def _pair(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _parse_pair(obj, ctx: str) -> complex:
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise ParseError(f"{ctx}: complex scalar must be a two-element [re, im] array")
    try:
        return complex(float(obj[0]), float(obj[1]))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{ctx}: non-numeric complex pair") from exc


def vector_to_pairs(vec) -> list:
    return [_pair(z) for z in np.asarray(vec).ravel()]


def matrix_to_pairs(mat) -> list:
    return [[_pair(z) for z in row] for row in np.asarray(mat)]


def parse_vector(obj, ctx: str) -> np.ndarray:
    if not isinstance(obj, list):
        raise ParseError(f"{ctx}: expected an array of [re, im] pairs")
    return np.array([_parse_pair(x, ctx) for x in obj], dtype=complex)


def parse_matrix(obj, ctx: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(row, list) for row in obj):
        raise ParseError(f"{ctx}: expected a nested array of [re, im] pairs")
    width = len(obj[0])
    if any(len(row) != width for row in obj):
        raise ParseError(f"{ctx}: ragged rows")
    return np.array([[_parse_pair(x, ctx) for x in row] for row in obj], dtype=complex)


def _dims(obj, ctx: str) -> tuple:
    try:
        m, n = int(obj["m"]), int(obj["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{ctx}: missing or non-integer 'm'/'n'") from exc
    if m < 1 or n < 1:
        raise ParseError(f"{ctx}: dimensions must be positive, got ({m}, {n})")
    return m, n


# ---------------------------------------------------------------------------
# state containers


def density_to_obj(rho: DensityMatrix) -> dict:
    return {"m": rho.m, "n": rho.n, "matrix": matrix_to_pairs(rho.mat)}


def parse_density(obj) -> DensityMatrix:
    m, n = _dims(obj, "density")
    if "matrix" not in obj:
        raise ParseError("density: missing 'matrix'")
    return validate_density(parse_matrix(obj["matrix"], "density.matrix"), m, n)


def pure_to_obj(v: PureState) -> dict:
    return {"m": v.m, "n": v.n, "amplitudes": vector_to_pairs(v.amplitudes)}


def parse_pure(obj) -> PureState:
    m, n = _dims(obj, "pure state")
    if "amplitudes" not in obj:
        raise ParseError("pure state: missing 'amplitudes'")
    return PureState(m, n, parse_vector(obj["amplitudes"], "pure.amplitudes"))


def ensemble_to_obj(e: Ensemble) -> dict:
    return {
        "m": e.m,
        "n": e.n,
        "weights": [float(w) for w in e.weights],
        "vectors": [vector_to_pairs(e.vectors[:, l]) for l in range(e.size)],
    }


def parse_ensemble(obj) -> Ensemble:
    m, n = _dims(obj, "ensemble")
    if "weights" not in obj or "vectors" not in obj:
        raise ParseError("ensemble: missing 'weights' or 'vectors'")
    weights = obj["weights"]
    vecs = obj["vectors"]
    if not isinstance(weights, list) or not isinstance(vecs, list) or len(weights) != len(vecs):
        raise ParseError("ensemble: 'weights' and 'vectors' must be equal-length arrays")
    cols = [parse_vector(v, f"ensemble.vectors[{i}]") for i, v in enumerate(vecs)]
    if any(c.size != m * n for c in cols):
        raise ParseError(f"ensemble: vectors must have length m*n = {m * n}")
    return Ensemble(m, n, np.array(weights, dtype=float), np.column_stack(cols))


def product_ensemble_to_obj(pe: ProductEnsemble) -> dict:
    return {
        "m": pe.m,
        "n": pe.n,
        "weights": [float(w) for w in pe.weights],
        "factorsA": [vector_to_pairs(pe.factors_a[:, u]) for u in range(pe.size)],
        "factorsB": [vector_to_pairs(pe.factors_b[:, u]) for u in range(pe.size)],
    }


def parse_product_ensemble(obj) -> ProductEnsemble:
    m, n = _dims(obj, "product ensemble")
    for key in ("weights", "factorsA", "factorsB"):
        if key not in obj:
            raise ParseError(f"product ensemble: missing '{key}'")
    weights = obj["weights"]
    fa = obj["factorsA"]
    fb = obj["factorsB"]
    if not (isinstance(weights, list) and isinstance(fa, list) and isinstance(fb, list)):
        raise ParseError("product ensemble: fields must be arrays")
    if not len(weights) == len(fa) == len(fb):
        raise ParseError("product ensemble: 'weights', 'factorsA', 'factorsB' lengths differ")
    acols = [parse_vector(v, f"factorsA[{u}]") for u, v in enumerate(fa)]
    bcols = [parse_vector(v, f"factorsB[{u}]") for u, v in enumerate(fb)]
    if any(c.size != m for c in acols) or any(c.size != n for c in bcols):
        raise ParseError("product ensemble: factor lengths must match m / n")
    return ProductEnsemble(
        m, n, np.array(weights, dtype=float), np.column_stack(acols), np.column_stack(bcols)
    )


def point_to_obj(p: ProjectivePoint) -> dict:
    return {"coords": vector_to_pairs(p.coords)}


def parse_point(obj) -> ProjectivePoint:
    if isinstance(obj, dict):
        if "coords" not in obj:
            raise ParseError("point: missing 'coords'")
        coords = obj["coords"]
    else:
        coords = obj
    try:
        return ProjectivePoint(parse_vector(coords, "point.coords"))
    except ValueError as exc:
        raise ParseError(f"point: {exc}") from exc


def multipoly_to_obj(p: MultiPoly) -> dict:
    return p.to_obj()


def parse_multipoly(obj) -> MultiPoly:
    try:
        num_vars, degree = int(obj["vars"]), int(obj["degree"])
        terms = {
            tuple(int(x) for x in t["exps"]): _parse_pair(t["coef"], "poly.coef")
            for t in obj["terms"]
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"polynomial: malformed object ({exc})") from exc
    return MultiPoly(num_vars, degree, terms)


# ---------------------------------------------------------------------------
# files


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def load_state(path: str):
    """Dispatch a state file to its container type by key signature."""
    obj = load_json(path)
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    if "matrix" in obj:
        return parse_density(obj)
    if "amplitudes" in obj:
        return parse_pure(obj)
    if "factorsA" in obj:
        return parse_product_ensemble(obj)
    if "vectors" in obj:
        return parse_ensemble(obj)
    raise ParseError(
        f"{path}: unrecognized state file (expected 'matrix', 'amplitudes', 'vectors' or 'factorsA')"
    )
