"""Command-line front end: JSON problem files in, JSON reports out.

    banach-ortho run problem.json [--out report.json]
    banach-ortho suite paper-equivalences --seed 1 [--out summary.json]

Global overrides ``--tol``, ``--budget`` and ``--grid`` replace the
corresponding problem fields. Exit codes: 0 for any computed verdict
(including "not orthogonal"), 2 for schema errors, 3 for capability errors,
4 for diagnostic failures, 1 for anything else.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .errors import BanachOrthoError, DomainError
from .verdicts import encode

VERSION = 1


def _space(prob, key="space"):
    from .spaces import space_from_json
    if key not in prob:
        raise DomainError(f"problem needs {key!r}")
    return space_from_json(prob[key])


def _vector(prob, key, space):
    from .spaces import parse_vector
    if key not in prob:
        raise DomainError(f"problem needs {key!r}")
    v = parse_vector(prob[key], space.field, space.dim)
    if v.shape != (space.dim,):
        raise DomainError(f"{key!r} has length {v.size}, expected {space.dim}")
    return space.vec(v)


def _scalar(prob, key):
    if key not in prob:
        raise DomainError(f"problem needs {key!r}")
    v = prob[key]
    return complex(*v) if isinstance(v, (list, tuple)) else complex(v)


def _points(prob):
    from .spaces import parse_vector
    field = prob.get("field", "complex")
    if field not in ("real", "complex"):
        raise DomainError("field must be 'real' or 'complex'")
    pts = parse_vector(prob.get("points", []), field)
    return np.asarray(pts, dtype=complex), field


def _operator(prob, key):
    from .operators import OperatorDescriptor
    from .spaces import parse_matrix, space_from_json
    if key not in prob:
        raise DomainError(f"problem needs {key!r}")
    d = prob[key]
    if isinstance(d, list):
        d = {"matrix": d}
    dom = space_from_json(d.get("domain", prob.get("space")))
    cod = space_from_json(d["codomain"]) if "codomain" in d else dom
    return OperatorDescriptor(parse_matrix(d["matrix"], dom.field), dom, cod)


def _function(prob, key):
    from .functions import SampledFunction
    if key not in prob:
        raise DomainError(f"problem needs {key!r}")
    d = dict(prob[key])
    d.setdefault("codomain", prob.get("codomain"))
    return SampledFunction.from_json(d)


def _metric_maps(prob):
    from .functions import FiniteMetricSpace
    from .spaces import parse_vector
    metric = FiniteMetricSpace(np.asarray(prob["metric"], dtype=float))
    space = _space(prob, "codomain")
    maps = []
    for key in ("F", "G"):
        if key in prob:
            maps.append(np.array([parse_vector(v, space.field, space.dim) for v in prob[key]]))
    return metric, space, maps


def _ladder(prob):
    lad = prob.get("ladder")
    return None if lad is None else np.asarray(lad, dtype=float)


# -- handlers -----------------------------------------------------------------
# Each takes (problem, options) and returns a JSON-ready payload.

def _h_zero_in_conv(p, o):
    from .scalar_geometry import zero_in_conv
    pts, field = _points(p)
    return zero_in_conv(pts, o["tol"], field)


def _h_directional_support(p, o):
    from .scalar_geometry import directional_support
    pts, field = _points(p)
    ok, wit = directional_support(pts, _scalar(p, "mu"), field)
    return {"exists": ok, "witness": wit}


def _h_conv_hull(p, o):
    from .scalar_geometry import conv_hull
    pts, field = _points(p)
    return {"polygon": conv_hull(pts, field)}


def _h_hull_hausdorff(p, o):
    from .scalar_geometry import hull_hausdorff
    from .spaces import parse_vector
    a = parse_vector(p["p"], "complex")
    b = parse_vector(p["q"], "complex")
    return {"distance": hull_hausdorff(np.asarray(a, complex), np.asarray(b, complex))}


def _h_norm(p, o):
    s = _space(p)
    return {"norm": s.norm(_vector(p, "x", s))}


def _h_dual_norm(p, o):
    s = _space(p)
    return {"dual_norm": s.dual_norm(_vector(p, "phi", s))}


def _h_support_functionals(p, o):
    from .spaces import support_functionals
    s = _space(p)
    return support_functionals(s, _vector(p, "u", s), o["budget"], o["grid"])


def _h_is_smooth_point(p, o):
    from .spaces import is_smooth_point
    s = _space(p)
    return is_smooth_point(s, _vector(p, "x", s), grid=o["grid"])


def _h_is_strongly_exposed(p, o):
    from .spaces import is_strongly_exposed
    s = _space(p)
    return {"strongly_exposed": is_strongly_exposed(s, _vector(p, "x", s))}


def _h_dual_extreme_points(p, o):
    s = _space(p)
    return {"functionals": s.dual_extremes(o["grid"])}


def _h_bj_orthogonal(p, o):
    from .orthogonality import bj_orthogonal
    s = _space(p)
    return bj_orthogonal(s, _vector(p, "x", s), _vector(p, "y", s), o["tol"])


def _h_directional_orthogonal(p, o):
    from .orthogonality import directional_orthogonal
    s = _space(p)
    return directional_orthogonal(s, _vector(p, "x", s), _vector(p, "y", s),
                                  _scalar(p, "gamma"), o["tol"])


def _h_james_witness(p, o):
    from .orthogonality import james_witness
    s = _space(p)
    return james_witness(s, _vector(p, "x", s), _vector(p, "y", s), o["tol"], full=True)


def _h_directional_witness(p, o):
    from .orthogonality import directional_witness
    s = _space(p)
    return directional_witness(s, _vector(p, "x", s), _vector(p, "y", s),
                               _scalar(p, "gamma"), o["tol"], full=True)


def _h_best_approximation(p, o):
    from .orthogonality import best_approximation
    s = _space(p)
    lam, res = best_approximation(s, _vector(p, "x", s), _vector(p, "y", s))
    return {"lambda": lam, "residual": res}


def _range_inputs(p):
    s = _space(p)
    return s, _vector(p, "u", s), _vector(p, "z", s)


def _h_range_scan(p, o):
    from .numrange import DEFAULT_RAYS, range_scan
    s, u, z = _range_inputs(p)
    grid = p.get("grid") if o["grid_override"] is None else o["grid_override"]
    return range_scan(s, u, z, grid=grid or DEFAULT_RAYS, tol=o["tol"])


def _h_range_extreme(p, o):
    from .numrange import range_extreme
    s, u, z = _range_inputs(p)
    return range_extreme(s, u, z, grid=o["grid"])


def _h_range_delta(p, o):
    from .numrange import near_support_sampler, range_delta
    s, u, z = _range_inputs(p)
    sampler = None
    if p.get("sampler") == "near_support":
        sampler = near_support_sampler(s, u, _ladder(p), seed=o["seed"])
    elif isinstance(p.get("sampler"), list):
        from .spaces import parse_vector
        sampler = np.array([parse_vector(f, s.field, s.dim) for f in p["sampler"]])
    return range_delta(s, u, z, sampler=sampler, ladder=_ladder(p))


def _h_numerical_radius_v(p, o):
    from .numrange import numerical_radius_v
    s, u, z = _range_inputs(p)
    return numerical_radius_v(s, u, z, method=p.get("method", "auto"))


def _h_vu_seminorm(p, o):
    from .numrange import vu_seminorm
    s, u, z = _range_inputs(p)
    return {"value": vu_seminorm(s, u, z)}


def _h_is_vertex(p, o):
    from .numrange import is_vertex
    s = _space(p)
    return is_vertex(s, _vector(p, "u", s), o["budget"] or 64, seed=o["seed"])


def _h_is_spear_vector(p, o):
    from .numrange import is_spear_vector
    s = _space(p)
    return is_spear_vector(s, _vector(p, "u", s), o["budget"] or 64, o["tol"], seed=o["seed"],
                           grid=o["grid"])


def _h_vertex_smooth_check(p, o):
    from .numrange import vertex_smooth_check
    s, u, z = _range_inputs(p)
    return vertex_smooth_check(s, u, z, o["tol"])


def _h_operator_norm(p, o):
    from .operators import operator_norm
    return operator_norm(_operator(p, "T"))


def _h_attainment_set(p, o):
    from .operators import attainment_set
    return attainment_set(_operator(p, "T"), float(p.get("eta", 0.0)), o["budget"] or 64,
                          seed=o["seed"])


def _h_op_bj_general(p, o):
    from .operator_geometry import op_bj_general
    return op_bj_general(_operator(p, "T"), _operator(p, "A"), _ladder(p), o["tol"],
                         count=o["budget"] or 1024, seed=o["seed"])


def _h_op_bj_extreme(p, o):
    from .operator_geometry import op_bj_extreme
    return op_bj_extreme(_operator(p, "T"), _operator(p, "A"), o["tol"], grid=o["grid"])


def _h_bhatia_semrl(p, o):
    from .operator_geometry import bhatia_semrl
    return bhatia_semrl(_operator(p, "T"), _operator(p, "A"), o["tol"], seed=o["seed"])


def _h_bs_sequential(p, o):
    from .operator_geometry import bs_sequential
    return bs_sequential(_operator(p, "T"), _operator(p, "A"), _ladder(p), o["tol"],
                         count=o["budget"] or 2048, seed=o["seed"])


def _h_v_radius(p, o):
    from .operators import v_radius
    return {"v": v_radius(_operator(p, "T"), grid=o["grid"])}


def _h_v_g(p, o):
    from .operator_geometry import v_g
    return v_g(_operator(p, "G"), _operator(p, "T"), _ladder(p), count=o["budget"] or 512,
               seed=o["seed"])


def _h_v_orthogonal(p, o):
    from .operator_geometry import v_orthogonal
    return v_orthogonal(_operator(p, "T"), _operator(p, "A"), _ladder(p), o["tol"],
                        count=o["budget"] or 512, seed=o["seed"])


def _h_numerical_index(p, o):
    from .operator_geometry import index_certificate, numerical_index
    s = _space(p)
    res = numerical_index(s, restarts=o["budget"] or 64, seed=o["seed"])
    out = res.to_json()
    if p.get("certify"):
        out["certificate"] = index_certificate(s, res.witness)
    return out


def _h_smooth_operator_sufficient(p, o):
    from .operator_geometry import smooth_operator_sufficient
    return smooth_operator_sufficient(_operator(p, "T"))


def _h_rank_one_orthogonal_smooth(p, o):
    from .operator_geometry import rank_one_orthogonal_smooth
    A = _operator(p, "A")
    return rank_one_orthogonal_smooth(A, _vector(p, "x0", A.domain),
                                      _vector(p, "x0_star", A.domain),
                                      _vector(p, "u0", A.codomain), o["tol"])


def _h_spear_obstruction_check(p, o):
    from .operator_geometry import spear_obstruction_check
    return spear_obstruction_check(_operator(p, "G"), o["tol"], certify=p.get("certify", True))


def _h_sup_norm(p, o):
    from .functions import sup_norm
    return {"sup_norm": sup_norm(_function(p, "f"))}


def _h_attainment_set_f(p, o):
    from .functions import attainment_set_f
    return attainment_set_f(_function(p, "f"), float(p.get("eta", 0.0)))


def _h_c_orthogonal(p, o):
    from .functions import c_orthogonal
    return c_orthogonal(_function(p, "f"), _function(p, "g"), _ladder(p), o["tol"])


def _h_pointwise_witness_check(p, o):
    from .functions import MU_GRID, pointwise_witness_check
    grid = o["grid_override"] or MU_GRID
    return pointwise_witness_check(_function(p, "f"), _function(p, "g"), grid, o["tol"], _ladder(p))


def _blaschke(p, key):
    from .functions import BlaschkeParams
    if key not in p:
        raise DomainError(f"problem needs {key!r}")
    return BlaschkeParams.from_json(p[key])


def _h_blaschke_eval(p, o):
    from .functions import blaschke_eval
    from .spaces import parse_vector
    z = np.asarray(parse_vector(p["z"] if isinstance(p["z"], list) and p["z"]
                                and isinstance(p["z"][0], list) else [p["z"]], "complex"))
    return {"value": blaschke_eval(_blaschke(p, "B"), z)}


def _h_blaschke_orthogonal(p, o):
    from .functions import CIRCLE_GRID, blaschke_orthogonal
    return blaschke_orthogonal(_blaschke(p, "Bn"), _blaschke(p, "Bm"),
                               grid=o["grid_override"] or CIRCLE_GRID, tol=o["tol"])


def _h_disk_algebra_orthogonal(p, o):
    from .functions import disk_algebra_orthogonal
    from .spaces import parse_vector
    return disk_algebra_orthogonal(parse_vector(p["f"], "complex"), parse_vector(p["g"], "complex"),
                                   _ladder(p), o["tol"])


def _h_lipschitz_norm(p, o):
    from .functions import lipschitz_norm
    metric, space, maps = _metric_maps(p)
    if not maps:
        raise DomainError("problem needs 'F'")
    return {"lipschitz_norm": lipschitz_norm(metric, maps[0], space)}


def _h_lip_orthogonal(p, o):
    from .functions import lip_orthogonal
    metric, space, maps = _metric_maps(p)
    if len(maps) != 2:
        raise DomainError("problem needs 'F' and 'G'")
    return lip_orthogonal(metric, maps[0], maps[1], space, _ladder(p), o["tol"])


def _h_check(p, o):
    from .suites import check_instance
    if "property" not in p or "instance" not in p:
        raise DomainError("a check problem needs 'property' and 'instance'")
    return check_instance(p["property"], p["instance"], o["tol"])


HANDLERS = {name[3:]: fn for name, fn in globals().items() if name.startswith("_h_")}

# kinds whose result depends on random sampling; these need an explicit seed
SAMPLED = {"range_delta", "is_vertex", "is_spear_vector", "attainment_set", "op_bj_general",
           "bhatia_semrl", "bs_sequential", "v_g", "v_orthogonal", "numerical_index", "check"}


def run_problem(problem, tol=None, budget=None, grid=None):
    """Dispatch one problem; returns the report payload (no timings)."""
    from .orthogonality import DEFAULT_TOL
    from .spaces import DEFAULT_CIRCLE_GRID
    if not isinstance(problem, dict):
        raise DomainError("problem file must hold a JSON object")
    version = problem.get("version", VERSION)
    if version != VERSION:
        raise DomainError(f"unsupported problem version {version!r}")
    kind = problem.get("kind")
    if kind not in HANDLERS:
        raise DomainError(f"unknown problem kind {kind!r}; known kinds: "
                          + ", ".join(sorted(HANDLERS)))
    if kind in SAMPLED and "seed" not in problem:
        raise DomainError(f"{kind!r} samples at random and needs a 'seed'")
    seed = int(problem.get("seed", 0))
    opts = {
        "tol": float(tol if tol is not None else problem.get("tol", DEFAULT_TOL)),
        "budget": budget if budget is not None else problem.get("budget"),
        "grid_override": grid,
        "grid": int(grid if grid is not None else problem.get("grid", DEFAULT_CIRCLE_GRID)),
        "seed": seed,
    }
    if not opts["tol"] > 0:
        raise DomainError("tol must be positive")
    try:
        result = HANDLERS[kind](problem, opts)
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed {kind!r} problem: {exc!r}") from exc
    return {"version": VERSION, "kind": kind, "seed": seed, "tol": opts["tol"],
            "tool_version": __version__, "result": encode(result)}


def run_suite_report(name, seed, tol=None, budget=None):
    from .orthogonality import DEFAULT_TOL
    from .suites import run_suite
    summary = run_suite(name, seed, budget=budget, tol=DEFAULT_TOL if tol is None else tol)
    summary["tool_version"] = __version__
    return summary


def dumps(payload):
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".banach-ortho-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parser():
    ap = argparse.ArgumentParser(prog="banach-ortho", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--tol", type=float, help="override the tolerance")
    common.add_argument("--budget", type=int, help="override the sampling budget")
    common.add_argument("--grid", type=int, help="override the angular grid")
    common.add_argument("--timing", action="store_true",
                        help="also store the wall time in the report (breaks byte-identity)")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="solve one problem file")
    r.add_argument("problem", help="problem JSON file ('-' for stdin)")
    s = sub.add_parser("suite", parents=[common], help="run a property suite")
    s.add_argument("name")
    s.add_argument("--seed", type=int, required=True)
    sub.add_parser("kinds", help="list problem kinds")
    return ap


def main(argv=None):
    ap = _parser()
    args = ap.parse_args(argv)
    if args.command == "kinds":
        print("\n".join(sorted(HANDLERS)))
        return 0
    start = time.perf_counter()
    try:
        if args.command == "run":
            try:
                if args.problem == "-":
                    problem = json.load(sys.stdin)
                else:
                    with open(args.problem) as fh:
                        problem = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise DomainError(f"cannot read problem file: {exc}") from exc
            payload = run_problem(problem, args.tol, args.budget, args.grid)
        else:
            payload = run_suite_report(args.name, args.seed, args.tol, args.budget)
        if args.timing:
            payload["wall_time"] = time.perf_counter() - start
        text = dumps(payload)
    except BanachOrthoError as exc:
        print(f"banach-ortho: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # internal failure
        print(f"banach-ortho: internal error: {exc!r}", file=sys.stderr)
        return 1
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    print(f"banach-ortho: wall time {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
