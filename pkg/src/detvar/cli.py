"""Command-line surface.

    detvar <schmidt|membership|covariance|minors|linearity|ppt|slice> FILE [options]

Every subcommand takes --rel-eps (default 1e-10) and --seed (default
42); outputs are canonical JSON (or CSV for `slice`) and byte-identical
across runs with the same inputs and seed.  Exit codes: 0 success,
2 parse/validation error, 3 covariance disagreement or separable
structure violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import invariants, serialize, symbolic
from .errors import DetvarError, NotPure, ParseError
from .pencil import hermitian_form_at, pencil_blocks
from .statecore import (
    DensityMatrix,
    Ensemble,
    ProductEnsemble,
    PureState,
    RankTolerance,
    density_from_ensemble,
    numerical_rank,
    partial_transpose,
    product_ensemble_to_ensemble,
    pure_projector,
    rank_report,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_DISAGREEMENT = 3


@dataclass(frozen=True)
class RunConfig:
    """Validated per-invocation knobs shared by the subcommands."""

    seed: int = 42
    samples: int = 1
    rel_eps: float = 1e-10
    k: int | None = None
    output_path: str | None = None

    def __post_init__(self):
        if self.samples < 1:
            raise ParseError(f"--samples must be >= 1, got {self.samples}")
        if not (0.0 < self.rel_eps <= 1e-2):
            raise ParseError(f"--rel-eps must be in (0, 1e-2], got {self.rel_eps}")

    @property
    def tolerance(self) -> RankTolerance:
        return RankTolerance(self.rel_eps)


def _config(args) -> RunConfig:
    return RunConfig(
        seed=int(args.seed),
        samples=int(getattr(args, "samples", 1)),
        rel_eps=float(args.rel_eps),
        k=None if getattr(args, "k", None) is None else int(args.k),
        output_path=getattr(args, "out", None),
    )


def _as_density(state) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return pure_projector(state)
    if isinstance(state, ProductEnsemble):
        return density_from_ensemble(product_ensemble_to_ensemble(state))
    if isinstance(state, Ensemble):
        return density_from_ensemble(state)
    raise ParseError("input does not describe a state")


def _as_ensemble(state) -> Ensemble:
    if isinstance(state, Ensemble):
        return state
    if isinstance(state, ProductEnsemble):
        return product_ensemble_to_ensemble(state)
    if isinstance(state, PureState):
        return Ensemble(state.m, state.n, np.array([1.0]), state.amplitudes.reshape(-1, 1))
    raise ParseError("this command needs an ensemble, product-ensemble or pure-state file")


def _as_pure(state, tol: RankTolerance) -> PureState:
    if isinstance(state, PureState):
        return state
    if isinstance(state, DensityMatrix):
        rank = numerical_rank(state.mat, tol)
        if rank != 1:
            raise NotPure(f"density input has rank {rank} > 1")
        evals, evecs = np.linalg.eigh((state.mat + state.mat.conj().T) / 2.0)
        vec = evecs[:, -1]
        return PureState(state.m, state.n, vec / np.linalg.norm(vec))
    raise ParseError("schmidt needs a pure-state or density file")


def _parse_inline_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"--{what} is not valid JSON: {exc}") from exc


def _emit(obj) -> None:
    print(serialize.json_dumps(obj))


# ---------------------------------------------------------------------------
# subcommands


def cmd_schmidt(args) -> int:
    cfg = _config(args)
    v = _as_pure(serialize.load_state(args.file), cfg.tolerance)
    report = invariants.schmidt_number(v, cfg.tolerance)
    _emit(report.to_dict())
    return EXIT_OK


def cmd_membership(args) -> int:
    cfg = _config(args)
    rho = _as_density(serialize.load_state(args.file))
    point = serialize.parse_point(_parse_inline_json(args.point, "point"))
    k = rho.n - 1 if cfg.k is None else cfg.k
    result = invariants.member_a(rho, point, k, cfg.tolerance)
    _emit(result.to_dict())
    return EXIT_OK


def cmd_covariance(args) -> int:
    cfg = _config(args)
    rho = _as_density(serialize.load_state(args.file))
    k = rho.n - 1 if cfg.k is None else cfg.k
    t = invariants.random_local_unitary(rho.m, rho.n, cfg.seed)
    report = invariants.check_covariance(rho, t, k, cfg.samples, cfg.seed, cfg.tolerance)
    _emit(report.to_dict())
    return EXIT_DISAGREEMENT if report.disagree else EXIT_OK


def cmd_minors(args) -> int:
    cfg = _config(args)
    e = _as_ensemble(serialize.load_state(args.file))
    pb = pencil_blocks(e)
    k = min(pb.n, pb.t) - 1 if cfg.k is None else cfg.k
    minors = symbolic.pencil_minor_polys(pb, k)
    nonzero = [serialize.multipoly_to_obj(q) for q in minors if not q.is_zero]
    summary = {"count": len(nonzero), "zero_omitted": len(minors) - len(nonzero), "k": k}
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(serialize.json_dumps(nonzero))
        _emit(summary)
    else:
        summary["minors"] = nonzero
        _emit(summary)
    return EXIT_OK


def cmd_linearity(args) -> int:
    cfg = _config(args)
    state = serialize.load_state(args.file)
    e = _as_ensemble(state)
    rho = density_from_ensemble(e)
    pb = pencil_blocks(e)
    k = min(pb.n, pb.t) - 1 if cfg.k is None else cfg.k
    out: dict = {}
    bad_structure = False
    if isinstance(state, ProductEnsemble):
        structure = symbolic.separable_minor_structure(state, k)
        out["structure"] = structure.to_dict()
        bad_structure = not structure.ok
    report = symbolic.linearity_diagnostic(
        rho, e, k, trials=cfg.samples, seed=cfg.seed, tol=cfg.tolerance
    )
    out.update(report.to_dict())
    _emit(out)
    return EXIT_DISAGREEMENT if bad_structure else EXIT_OK


def cmd_ppt(args) -> int:
    _config(args)
    rho = _as_density(serialize.load_state(args.file))
    evals = np.linalg.eigvalsh(partial_transpose(rho))
    min_ev = float(evals[0])
    npt = min_ev < -1e-10
    _emit(
        {
            "verdict": "NPT" if npt else "PPT",
            "min_eigenvalue": serialize.jfloat(min_ev),
            "ppt_equivalent_to_separable": sorted((rho.m, rho.n)) in ([2, 2], [2, 3]),
        }
    )
    return EXIT_OK


def cmd_slice(args) -> int:
    cfg = _config(args)
    tol = cfg.tolerance
    rho = _as_density(serialize.load_state(args.file))
    samples = cfg.samples
    k = rho.n - 1 if cfg.k is None else cfg.k
    line_obj = _parse_inline_json(args.line, "line")
    if not isinstance(line_obj, dict) or "p" not in line_obj or "q" not in line_obj:
        raise ParseError("--line must be a JSON object with 'p' and 'q' points")
    p = serialize.parse_point(line_obj["p"]).coords
    q = serialize.parse_point(line_obj["q"]).coords
    if p.size != rho.m or q.size != rho.m:
        raise ParseError(f"line points must have {rho.m} coordinates")
    phi = float(line_obj.get("phi", 0.0))
    p = p / np.linalg.norm(p)
    q = q / np.linalg.norm(q)
    phase = complex(math.cos(phi), math.sin(phi))
    out_path = cfg.output_path
    lines = ["theta,min_eigenvalue,rank,member"]
    for theta in np.linspace(0.0, math.pi / 2.0, samples):
        theta = float(theta)
        r = math.cos(theta) * p + math.sin(theta) * phase * q
        nrm = float(np.linalg.norm(r))
        if nrm > 1e-12:
            r = r / nrm
        h = hermitian_form_at(rho, r)
        floor = float(np.max(np.abs(rho.mat))) * float(np.sum(np.abs(r))) ** 2
        rep = rank_report(h, tol, scale_floor=floor)
        min_ev = float(np.linalg.eigvalsh(h)[0])
        lines.append(f"{theta!r},{min_ev!r},{rep.rank},{int(rep.rank <= k)}")
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        _emit({"rows": samples, "out": out_path})
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detvar",
        description="Rank loci of bipartite density matrices: membership, Schmidt "
        "numbers, local-unitary covariance, symbolic minors and separability diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("file", help="JSON state file")
        sp.add_argument("--rel-eps", type=float, default=1e-10, help="rank tolerance (default 1e-10)")
        sp.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
        sp.set_defaults(func=func)
        return sp

    add("schmidt", cmd_schmidt, "Schmidt number and kernel-locus dimension of a pure state")

    sp = add("membership", cmd_membership, "rank-locus membership of one projective point")
    sp.add_argument("--point", required=True, help="JSON point: {\"coords\":[[re,im],...]}")
    sp.add_argument("--k", type=int, default=None, help="rank bound (default n-1)")

    sp = add("covariance", cmd_covariance, "sampled local-unitary covariance check")
    sp.add_argument("--k", type=int, default=None, help="rank bound (default n-1)")
    sp.add_argument("--samples", type=int, default=100, help="sample count (default 100)")

    sp = add("minors", cmd_minors, "dump the symbolic minors of an ensemble pencil")
    sp.add_argument("--k", type=int, default=None, help="rank bound (default min(n,t)-1)")
    sp.add_argument("--out", default=None, help="write the minor list to this path")

    sp = add("linearity", cmd_linearity, "variety-linearity diagnostic for one realization")
    sp.add_argument("--k", type=int, default=None, help="rank bound (default min(n,t)-1)")
    sp.add_argument("--samples", type=int, default=20, help="witness-search trials (default 20)")

    add("ppt", cmd_ppt, "partial-transpose cross-check")

    sp = add("slice", cmd_slice, "sample the Hermitian form along a projective line (CSV)")
    sp.add_argument("--k", type=int, default=None, help="rank bound (default n-1)")
    sp.add_argument("--samples", type=int, default=100, help="grid size (default 100)")
    sp.add_argument("--line", required=True, help="JSON: {\"p\":...,\"q\":...,\"phi\":0.0}")
    sp.add_argument("--out", default=None, help="write CSV to this path")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DetvarError as exc:
        print(
            serialize.json_dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return EXIT_INVALID


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
