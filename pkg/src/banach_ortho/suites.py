"""Randomized property suites with replayable instances.

Each property draws JSON-serializable instances from a seeded generator and
checks them in batches. A failing instance is emitted as a problem file of
kind ``check`` which :func:`banach_ortho.cli.run_problem` replays through the
same batch checker (with a batch of one).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .functions import (BlaschkeParams, FiniteMetricSpace, SampledFunction,
                        blaschke_definition, blaschke_eval,
                        blaschke_orthogonal, c_orthogonal, c_orthogonal_definition,
                        disk_algebra_orthogonal, lip_orthogonal, lip_orthogonal_definition,
                        pointwise_witness_check)
from .numrange import range_delta, range_extreme, range_scan, vertex_smooth_check
from .operator_geometry import (bhatia_semrl, bs_sequential, find_orthogonal_smooth,
                                index_certificate, numerical_index, op_bj_general,
                                rank_one_orthogonal_smooth, smooth_operator_sufficient,
                                spear_obstruction_check, v_orthogonal)
from .operators import OperatorDescriptor, OperatorSpace, VRadiusSpace
from .orthogonality import DEFAULT_TOL, bj_margins, james_witness
from .scalar_geometry import hull_hausdorff, unit_circle, zero_in_conv
from .spaces import PNormSpace, PolytopeSpace, parse_matrix, parse_vector, space_from_json
from .verdicts import encode

VERSION = 1
SCAN_TOL = 1e-10


@dataclass
class Property:
    name: str
    generate: object
    check: object
    summarize: object
    count: int
    description: str = ""


REGISTRY = {}


def add_property(prop):
    REGISTRY[prop.name] = prop


def _rng(seed, name):
    return np.random.default_rng([int(seed), zlib.crc32(name.encode())])


def _vec(v):
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return [[float(a.real), float(a.imag)] for a in v]
    return [float(a) for a in v]


def _mat(m):
    return [_vec(r) for r in np.asarray(m)]


def _gauss(rng, shape, cplx):
    g = rng.standard_normal(shape)
    if cplx:
        g = g + 1j * rng.standard_normal(shape)
    return g


def _near_threshold(margin, tol):
    """Margins within a factor of two of the decision threshold -tol."""
    return bool(-2.0 * tol <= margin <= -0.5 * tol)


def _agreement(results, threshold, all_in_band=False):
    outside = [r for r in results if not r["band"]]
    agree = sum(r["agree"] for r in outside)
    rate = agree / len(outside) if outside else 1.0
    total = sum(r["agree"] for r in results) / max(len(results), 1)
    stray = [r for r in outside if not r["agree"]]
    passed = rate >= threshold and (not all_in_band or not stray)
    return passed, {"instances": len(results), "outside_band": len(outside),
                    "agreement_outside_band": rate, "agreement_all": total,
                    "disagreements_outside_band": len(stray)}


def _mark(results, threshold, all_in_band=False):
    for r in results:
        r["ok"] = bool(r["agree"] or r["band"])
    return results


# -- criterion: James equivalence -----------------------------------------

JAMES_FAMILIES = ["l2_real", "l2_complex", "l1", "linf", "l3", "polytope"]


def _family_space(name, rng):
    if name == "l2_real":
        return PNormSpace("real", 3, 2)
    if name == "l2_complex":
        return PNormSpace("complex", 3, 2)
    if name == "l1":
        return PNormSpace("real", 3, 1)
    if name == "linf":
        return PNormSpace("real", 3, np.inf)
    if name == "l3":
        return PNormSpace("real", 3, 3)
    return PolytopeSpace("real", 3, rng.standard_normal((8, 3)))


def _james_generate(rng, count):
    per = max(1, count // len(JAMES_FAMILIES))
    out = []
    for fam in JAMES_FAMILIES:
        space = _family_space(fam, rng)
        xs = _gauss(rng, (per, 3), space.complex)
        ys = _gauss(rng, (per, 3), space.complex)
        kind = rng.random(per)
        # best approximation: x + lam y is orthogonal to y
        _, lams = bj_margins(space, xs, ys)
        for k in range(per):
            x, y = xs[k], ys[k]
            if kind[k] < 0.45:
                x = x + lams[k] * y
            elif kind[k] > 0.85:
                i, j = rng.choice(3, 2, replace=False)
                x = np.eye(3, dtype=space.dtype)[i]
                y = np.eye(3, dtype=space.dtype)[j] + (0.5 * rng.standard_normal() if fam == "l1" else 0.0)
            out.append({"family": fam, "space": space.to_json(), "x": _vec(x), "y": _vec(y)})
    return out


def _james_check(instances, tol):
    groups = {}
    for k, inst in enumerate(instances):
        groups.setdefault(repr(inst["space"]), []).append(k)
    results = [None] * len(instances)
    for keys in groups.values():
        space = space_from_json(instances[keys[0]]["space"])
        xs = np.array([parse_vector(instances[k]["x"], space.field, space.dim) for k in keys])
        ys = np.array([parse_vector(instances[k]["y"], space.field, space.dim) for k in keys])
        margins, _ = bj_margins(space, xs, ys)
        for k, x, y, m in zip(keys, xs, ys, margins):
            w = james_witness(space, x, y, tol, full=True)
            found = w.decision is True
            bj = bool(m >= -tol)
            results[k] = {"bj": bj, "james": found, "margin": float(m),
                          "agree": bj == found, "band": _near_threshold(m, tol),
                          "near_zero": bool(abs(m) <= 2 * tol)}
    for r in results:
        r["ok"] = bool(r["agree"] or r["near_zero"])
    return results


def _james_summary(results, tol):
    passed, stats = _agreement(results, 0.99)
    stray = [r for r in results if not r["agree"] and not r["near_zero"]]
    stats["disagreements_beyond_2tol"] = len(stray)
    return passed and not stray, stats


REGISTRY["james_equivalence"] = Property(
    "james_equivalence", _james_generate, _james_check, _james_summary, 3000,
    "definition-level orthogonality versus a norming functional annihilating y")


# -- criterion: range cross-validation --------------------------------------

def _range_generate(rng, count):
    out = []
    for k in range(count):
        p = 1.0 if k % 2 == 0 else np.inf
        space = PNormSpace("real", 3, p)
        kind = rng.integers(0, 3)
        if kind == 0:
            u = rng.standard_normal(3)
        elif kind == 1:
            u = space.ball_vertices()[rng.integers(len(space.ball_vertices()))]
        else:
            v = space.ball_vertices()
            i, j = rng.choice(len(v), 2, replace=False)
            u = 0.5 * (v[i] + v[j])
            if space.norm(u) < 1e-9:
                u = v[i]
        u = u / space.norm(u)
        z = rng.standard_normal(3)
        out.append({"space": space.to_json(), "u": _vec(u), "z": _vec(z)})
    return out


def _range_check(instances, tol):
    results = []
    for inst in instances:
        space = space_from_json(inst["space"])
        u = parse_vector(inst["u"], space.field, space.dim)
        z = parse_vector(inst["z"], space.field, space.dim)
        # the scan threshold fattens the range by about threshold / (gap to
        # the next face), so it runs well below tol; tol itself is reported
        scan = range_scan(space, u, z, tol=SCAN_TOL)
        ext = range_extreme(space, u, z)
        dl = range_delta(space, u, z)
        d = max(hull_hausdorff(scan.outer, ext.outer), hull_hausdorff(scan.outer, dl.inner),
                hull_hausdorff(ext.outer, dl.inner))
        bound = 2.0 * (scan.resolution + tol)
        coarse = range_scan(space, u, z, tol=tol)
        d_coarse = hull_hausdorff(coarse.outer, ext.outer)
        results.append({"hausdorff": d, "bound": bound, "ok": bool(d <= bound),
                        "hausdorff_at_tol": d_coarse, "exceeds_at_tol": bool(d_coarse > bound),
                        "agree": bool(d <= bound), "band": False})
    return results


def _range_summary(results, tol):
    bad = sum(not r["ok"] for r in results)
    return bad == 0, {"instances": len(results), "violations": bad,
                      "max_hausdorff": max(r["hausdorff"] for r in results),
                      "max_ratio": max(r["hausdorff"] / r["bound"] for r in results),
                      "scan_threshold": SCAN_TOL,
                      "exceedances_with_scan_at_tol": sum(r["exceeds_at_tol"] for r in results)}


REGISTRY["range_cross_validation"] = Property(
    "range_cross_validation", _range_generate, _range_check, _range_summary, 100,
    "scan, extreme-point and delta-ladder ranges coincide")


# -- criterion: Bhatia-Semrl -------------------------------------------------

def _bs_pair(rng, kind, n=3):
    t = _gauss(rng, (n, n), True)
    a = _gauss(rng, (n, n), True)
    if kind >= 2:
        u, _, vh = np.linalg.svd(t)
        s = np.array([1.0, 1.0, rng.uniform(0.1, 0.9)])
        t = (u * s) @ vh
    u, s, vh = np.linalg.svd(t)
    k = 1 if kind < 2 else 2
    uk, vk = u[:, :k], np.conj(vh[:k].T)
    if kind == 1:
        c = np.vdot(uk[:, 0], a @ vk[:, 0])
        a = a - c * np.outer(uk[:, 0], np.conj(vk[:, 0]))
    if kind == 3:
        # compression with zero trace: 0 lies in its numerical range
        m = np.conj(uk.T) @ a @ vk
        a = a - (np.trace(m) / k) * uk @ np.conj(vk.T)
    return t, a


def _bs_generate(rng, count):
    out = []
    for k in range(count):
        kind = int(k % 4)
        t, a = _bs_pair(rng, kind)
        out.append({"kind": kind, "T": _mat(t), "A": _mat(a)})
    return out


def _bs_check(instances, tol):
    h = PNormSpace("complex", 3, 2)
    op = OperatorSpace(h)
    ts = [parse_matrix(i["T"], "complex") for i in instances]
    as_ = [parse_matrix(i["A"], "complex") for i in instances]
    margins, _ = bj_margins(op, np.array([t.ravel() for t in ts]),
                            np.array([a.ravel() for a in as_]))
    results = []
    for t, a, m in zip(ts, as_, margins):
        T, A = OperatorDescriptor(t, h), OperatorDescriptor(a, h)
        b = bhatia_semrl(T, A, tol).decision
        g = op_bj_general(T, A, tol=tol).decision
        d = bool(m >= -tol)
        results.append({"bhatia_semrl": b, "general": g, "definition": d, "margin": float(m),
                        "agree": bool(b == g and b == d), "agree_general": bool(b == g),
                        "agree_definition": bool(b == d), "band": _near_threshold(m, tol)})
    return _mark(results, 0.99)


def _bs_summary(results, tol):
    outside = [r for r in results if not r["band"]]
    n = max(len(outside), 1)
    rg = sum(r["agree_general"] for r in outside) / n
    rd = sum(r["agree_definition"] for r in outside) / n
    all_g = sum(r["agree_general"] for r in results) / max(len(results), 1)
    all_d = sum(r["agree_definition"] for r in results) / max(len(results), 1)
    return rg >= 0.99 and rd >= 0.99, {
        "instances": len(results), "outside_band": len(outside),
        "agreement_general_outside_band": rg, "agreement_definition_outside_band": rd,
        "agreement_general_all": all_g, "agreement_definition_all": all_d,
        "orthogonal_by_bhatia_semrl": sum(bool(r["bhatia_semrl"]) for r in results)}


REGISTRY["bhatia_semrl_equivalence"] = Property(
    "bhatia_semrl_equivalence", _bs_generate, _bs_check, _bs_summary, 500,
    "Hilbert operator orthogonality through the attainment subspace")


# -- criterion: numerical index constants ----------------------------------

INDEX_TARGETS = [
    {"space": {"field": "real", "dim": 2, "kind": {"p": 2}}, "target": "zero"},
    {"space": {"field": "real", "dim": 2, "kind": {"p": 1}}, "target": "one"},
    {"space": {"field": "real", "dim": 2, "kind": {"p": "inf"}}, "target": "one"},
    {"space": {"field": "complex", "dim": 2, "kind": {"p": 2}}, "target": "half"},
]


def _index_generate(rng, count):
    return [dict(t, seed=int(rng.integers(2 ** 31))) for t in INDEX_TARGETS[:count]]


def _index_check(instances, tol):
    results = []
    for inst in instances:
        space = space_from_json(inst["space"])
        res = numerical_index(space, restarts=inst.get("restarts", 64), seed=inst["seed"])
        r = {"target": inst["target"], "upper": res.upper, "lower": res.lower}
        if inst["target"] == "zero":
            ok = res.upper <= 1e-6
        elif inst["target"] == "one":
            ok = abs(res.upper - 1.0) <= 1e-3 and res.lower is not None and res.lower >= 1 - 1e-3
        else:
            cert = index_certificate(space, res.witness)
            r.update(certificate=cert)
            ok = (res.upper <= 0.51 and cert["ratio"] >= 0.49
                  and abs(cert["ratio"] - cert["ratio_states"]) <= 1e-3)
        r.update(ok=bool(ok), agree=bool(ok), band=False)
        results.append(r)
    return results


def _all_ok(results, tol):
    bad = [r for r in results if not r["ok"]]
    stats = {"instances": len(results), "failures": len(bad)}
    if len(results) <= 8:
        stats["values"] = [{k: v for k, v in r.items() if k not in ("ok", "agree", "band")}
                           for r in results]
    return not bad, stats


REGISTRY["numerical_index_constants"] = Property(
    "numerical_index_constants", _index_generate, _index_check, _all_ok, 4,
    "n(l2 real) = 0, n(l1) = n(linf) = 1, n(l2 complex) = 1/2")


# -- criterion: obstruction chain --------------------------------------------

def _obstruction_generate(rng, count):
    return [{"p": p, "seed": int(rng.integers(2 ** 31))} for p in (1.5, 3.0)][:count]


def _obstruction_check(instances, tol):
    results = []
    for inst in instances:
        space = PNormSpace("real", 2, inst["p"])
        g = OperatorDescriptor(np.eye(2), space)
        ob = spear_obstruction_check(g, tol)
        idx = numerical_index(space, restarts=16, sweeps=6, seed=inst["seed"])
        ok = (ob["obstruction"] and ob["spear"] is False
              and ob["v_G_definition"] <= (1 - 1e-3) * ob["probe_norm"] and idx.upper <= 1 - 1e-3)
        results.append({"p": inst["p"], "obstruction": ob["obstruction"], "spear": ob["spear"],
                        "probe_v_G": ob.get("v_G"), "probe_v_G_definition": ob.get("v_G_definition"),
                        "index_upper": idx.upper, "ok": bool(ok), "agree": bool(ok), "band": False})
    return results


REGISTRY["obstruction_chain"] = Property(
    "obstruction_chain", _obstruction_generate, _obstruction_check, _all_ok, 2,
    "smooth strongly exposed two-dimensional lp spaces have index below one")


def _t51_generate(rng, count):
    out = []
    for k in range(count):
        fam = k % 4
        if fam == 0:
            space = PNormSpace("real", 3, 1)
        elif fam == 1:
            space = PNormSpace("real", 3, np.inf)
        elif fam == 2:
            space = PolytopeSpace("real", 3, rng.standard_normal((7, 3)))
        else:
            space = PNormSpace("complex", 2, np.inf)
        if space.complex:
            u = unit_circle(8)[rng.integers(8, size=2)]
        else:
            v = space.ball_vertices()
            u = v[rng.integers(len(v))]
        if rng.random() < 0.15 and not space.complex:
            u = rng.standard_normal(3)
        u = u / space.norm(u)
        z = _gauss(rng, space.dim, space.complex)
        if rng.random() < 0.2:
            z = u + 1e-3 * z
        out.append({"space": space.to_json(), "u": _vec(u), "z": _vec(z)})
    return out


def _t51_check(instances, tol):
    results = []
    for inst in instances:
        space = space_from_json(inst["space"])
        u = parse_vector(inst["u"], space.field, space.dim)
        z = parse_vector(inst["z"], space.field, space.dim)
        rep = vertex_smooth_check(space, u, z, tol)
        results.append({"applicable": rep["applicable"], "violation": rep["violation"],
                        "smooth": rep.get("smooth"), "ok": not rep["violation"],
                        "agree": not rep["violation"], "band": False})
    return results


def _t51_summary(results, tol):
    bad = sum(r["violation"] for r in results)
    app = sum(r["applicable"] for r in results)
    return bad == 0, {"instances": len(results), "applicable": app,
                      "smooth_applicable": sum(bool(r["smooth"]) for r in results if r["applicable"]),
                      "violations": bad}


REGISTRY["vertex_smooth_not_orthogonal"] = Property(
    "vertex_smooth_not_orthogonal", _t51_generate, _t51_check, _t51_summary, 1000,
    "at a vertex u, v_u-smooth points are never v_u-orthogonal to u")


# -- criterion: Blaschke ------------------------------------------------------

def _random_blaschke(rng):
    k = int(rng.integers(0, 3))
    nz = int(rng.integers(0 if k > 0 else 1, 5 - k))
    zs = []
    for _ in range(nz):
        r = rng.uniform(0.05, 0.95)
        zs.append(r * np.exp(2j * np.pi * rng.random()))
    return BlaschkeParams(k, zs)


def _blaschke_generate(rng, count):
    out = [{"Bn": BlaschkeParams(1).to_json(), "Bm": BlaschkeParams(2).to_json(), "expect": True}]
    b = _random_blaschke(rng)
    out.append({"Bn": b.to_json(), "Bm": b.to_json(), "expect": False})
    for _ in range(count):
        out.append({"Bn": _random_blaschke(rng).to_json(), "Bm": _random_blaschke(rng).to_json()})
    return out


def _blaschke_check(instances, tol):
    results = []
    for inst in instances:
        bn, bm = BlaschkeParams.from_json(inst["Bn"]), BlaschkeParams.from_json(inst["Bm"])
        bo = blaschke_orthogonal(bn, bm, tol=tol)
        de = blaschke_definition(bn, bm, tol=tol)
        r = {"blaschke": bo.decision, "definition": de.decision, "margin": de.margin,
             "hull_agree": bo.details["agree"], "agree": bool(bo.decision == de.decision),
             "band": _near_threshold(de.margin, tol)}
        if "expect" in inst:
            r["agree"] = bool(r["agree"] and bo.decision == inst["expect"])
            r["band"] = False
        r["ok"] = bool(r["agree"] or r["band"])
        results.append(r)
    return results


def _blaschke_summary(results, tol):
    passed, stats = _agreement(results[2:], 0.98)
    fixed = all(r["agree"] for r in results[:2])
    stats["fixed_pairs"] = fixed
    stats["hull_agreement"] = sum(r["hull_agree"] for r in results) / len(results)
    return passed and fixed, stats


REGISTRY["blaschke_equivalence"] = Property(
    "blaschke_equivalence", _blaschke_generate, _blaschke_check, _blaschke_summary, 50,
    "directional search on the circle versus sup-norm minimization")


# -- criterion: connected attainment -----------------------------------------

T43_SPACES = [{"field": "complex", "dim": 2, "kind": {"p": 2}},
              {"field": "real", "dim": 2, "kind": {"p": 2}},
              {"field": "real", "dim": 2, "kind": {"p": "inf"}}]


def _smooth_curve(rng, t, cplx, terms=3):
    out = np.zeros((len(t), 2), dtype=complex if cplx else float)
    for j in range(1, terms + 1):
        c = _gauss(rng, (2, 2), cplx) / j ** 2
        out += np.cos(j * t)[:, None] * c[0] + np.sin(j * t)[:, None] * c[1]
    return out + _gauss(rng, 2, cplx)


def _t43_generate(rng, count, n=240):
    out = []
    for k in range(count):
        space = space_from_json(T43_SPACES[k % 3])
        circle = rng.random() < 0.7
        t = 2 * np.pi * np.arange(n) / n if circle else np.linspace(0.0, 1.0, n)
        period = 2 * np.pi if circle else 1.0
        d = _smooth_curve(rng, t, space.complex)
        d = d / space.norm_batch(d)[:, None]
        kind = rng.random()
        start = rng.uniform(0, period)
        width = rng.uniform(0.05, 0.4) * period

        def dist(s):
            x = (t - s) % period if circle else np.abs(t - s)
            return np.minimum(x, period - x) if circle else x

        if kind < 0.15:
            near = np.minimum(dist(start), dist(start + period / 2 if circle else 1 - start))
            r = 1.0 - np.minimum(near / period, 0.5)
            r[np.argsort(near)[:2]] = 1.0
        else:
            gap = np.maximum(dist(start + width / 2) - width / 2, 0.0)
            r = 1.0 - 0.8 * np.minimum(gap / period, 1.0)
        f = d * r[:, None]
        g = _smooth_curve(rng, t, space.complex)
        if kind > 0.3:
            top = np.flatnonzero(space.norm_batch(f) >= 1.0 - 1e-9)
            vals = [y @ g[i] for i in top for y in space.support(f[i]).functionals]
            g = g - (np.mean(vals) / 1.0) * f
        out.append({"space": space.to_json(), "adjacency": "circle" if circle else "path",
                    "f": [_vec(v) for v in f], "g": [_vec(v) for v in g]})
    return out


def _t43_check(instances, tol):
    results = []
    for inst in instances:
        space = space_from_json(inst["space"])
        f = SampledFunction([parse_vector(v, space.field, 2) for v in inst["f"]], space,
                            adjacency=inst["adjacency"])
        g = f.like([parse_vector(v, space.field, 2) for v in inst["g"]])
        rep = pointwise_witness_check(f, g, tol=tol)
        results.append({"applicable": rep["applicable"], "orthogonal": rep.get("orthogonal"),
                        "violations": rep["violations"], "band_stable": rep.get("band_stable"),
                        "ok": rep["violations"] == 0, "agree": rep["violations"] == 0,
                        "band": False})
    return results


def _t43_summary(results, tol):
    bad = sum(r["violations"] > 0 for r in results)
    return bad == 0, {"instances": len(results),
                      "skipped_disconnected": sum(not r["applicable"] for r in results),
                      "nonvacuous": sum(bool(r["orthogonal"]) for r in results if r["applicable"]),
                      "instances_with_violations": bad}


REGISTRY["connected_attainment"] = Property(
    "connected_attainment", _t43_generate, _t43_check, _t43_summary, 200,
    "orthogonality in C(K, Y) localizes to one attaining point")


# -- criterion: scalar certificates ------------------------------------------

def _scalar_generate(rng, count):
    out = []
    for _ in range(count):
        real = rng.random() < 0.3
        m = int(rng.integers(1, 13))
        pts = rng.standard_normal(m) if real else _gauss(rng, m, True)
        pts = pts + (rng.standard_normal() if real else _gauss(rng, 1, True)[0]) * rng.uniform(0, 2)
        out.append({"field": "real" if real else "complex",
                    "points": _vec(np.asarray(pts, dtype=complex)) if not real else _vec(pts)})
    return out


def _critical_mus(pts):
    """Midpoints of the arcs on which {a : Re(mu a) >= 0} stays constant.

    The set changes only where Re(mu a) = 0 for some a, i.e. at
    mu = +-i conj(a)/|a|, so one direction per arc decides the whole circle.
    """
    nz = pts[np.abs(pts) > 0]
    if not len(nz):
        return np.zeros(0, complex)
    ang = np.angle(1j * np.conj(nz) / np.abs(nz))
    ang = np.sort(np.mod(np.concatenate([ang, ang + np.pi]), 2 * np.pi))
    nxt = np.append(ang[1:], ang[0] + 2 * np.pi)
    return np.exp(1j * 0.5 * (ang + nxt))


def _scalar_check(instances, tol, mu_grid=360):
    results = []
    mus = unit_circle(mu_grid)
    for inst in instances:
        fld = inst["field"]
        pts = np.array(parse_vector(inst["points"], fld), dtype=complex)
        cert = zero_in_conv(pts, tol, fld)
        verified = cert.verify(pts)
        dirs = np.array([1.0, -1.0]) if fld == "real" else np.concatenate([mus, _critical_mus(pts)])
        # vectorized form of directional_support over all directions
        directional = bool(np.all((dirs[:, None] * pts[None, :]).real.max(axis=1) >= 0.0))
        band = cert.distance <= 2 * tol and cert.distance > 0.0
        agree = directional == cert.inside
        results.append({"inside": cert.inside, "verified": bool(verified),
                        "directional": bool(directional), "agree": bool(agree),
                        "band": bool(band), "ok": bool(verified and (agree or band))})
    return results


def _scalar_summary(results, tol):
    unverified = sum(not r["verified"] for r in results)
    passed, stats = _agreement(results, 1.0)
    stats["unverified_certificates"] = unverified
    stats["inside"] = sum(r["inside"] for r in results)
    return passed and unverified == 0, stats


REGISTRY["scalar_certificates"] = Property(
    "scalar_certificates", _scalar_generate, _scalar_check, _scalar_summary, 10000,
    "hull certificates verify and match the directional test")


# -- invariant properties ----------------------------------------------------

def _bmod_generate(rng, count):
    return [{"B": _random_blaschke(rng).to_json()} for _ in range(count)]


def _bmod_check(instances, tol):
    z = unit_circle(720)
    rng = np.random.default_rng(0)
    inner = np.sqrt(rng.random(200)) * 0.999 * np.exp(2j * np.pi * rng.random(200))
    results = []
    for inst in instances:
        b = BlaschkeParams.from_json(inst["B"])
        dev = float(np.max(np.abs(np.abs(blaschke_eval(b, z)) - 1.0)))
        ins = float(np.max(np.abs(blaschke_eval(b, inner))))
        ok = dev <= 1e-12 and ins < 1.0
        results.append({"circle_deviation": dev, "inside_max": ins, "ok": ok,
                        "agree": ok, "band": False})
    return results


REGISTRY["blaschke_modulus"] = Property(
    "blaschke_modulus", _bmod_generate, _bmod_check, _all_ok, 50, "|B| = 1 on the circle")


def _twopt_generate(rng, count):
    return [{"f": _vec(rng.standard_normal(2)), "g": _vec(rng.standard_normal(2) if rng.random() < 0.5
                                                         else np.array([1.0, -1.0]) * rng.random())}
            for _ in range(count)]


def _twopt_check(instances, tol):
    line = PNormSpace("real", 1, 2)
    linf = PNormSpace("real", 2, np.inf)
    results = []
    for inst in instances:
        f = np.array(inst["f"])
        g = np.array(inst["g"])
        a = c_orthogonal(SampledFunction(f[:, None], line), SampledFunction(g[:, None], line),
                         tol=tol).decision
        m, _ = bj_margins(linf, f[None], g[None])
        b = bool(m[0] >= -tol)
        results.append({"agree": a == b, "band": False, "ok": a == b})
    return results


REGISTRY["two_point_identification"] = Property(
    "two_point_identification", _twopt_generate, _twopt_check, _all_ok, 200,
    "C of a two-point set with real values is linf^2")


def _lip_generate(rng, count):
    out = []
    for _ in range(count):
        n = int(rng.integers(3, 6))
        pts = rng.random((n, 2))
        fam = rng.integers(0, 2)
        F = rng.standard_normal((n, 2))
        G = rng.standard_normal((n, 2))
        F[0] = 0
        G[0] = 0
        out.append({"points": pts.tolist(), "p": "inf" if fam else 2,
                    "F": F.tolist(), "G": G.tolist(), "orth": bool(rng.random() < 0.5)})
    return out


def _lip_check(instances, tol):
    from .functions import LipschitzSpace
    results = []
    for inst in instances:
        pts = np.array(inst["points"])
        metric = FiniteMetricSpace(np.linalg.norm(pts[:, None] - pts[None], axis=2))
        space = PNormSpace("real", 2, inst["p"])
        F, G = np.array(inst["F"]), np.array(inst["G"])
        if inst["orth"]:
            lip = LipschitzSpace(metric, space)
            _, lam = bj_margins(lip, lip.embed(G)[None], lip.embed(F)[None])
            G = G + lam[0] * F
        a = lip_orthogonal(metric, F, G, space, tol=tol)
        d = lip_orthogonal_definition(metric, F, G, space, tol)
        results.append({"agree": a.decision == d.decision, "margin": d.margin,
                        "band": _near_threshold(d.margin, tol)})
    return _mark(results, 0.99)


REGISTRY["lipschitz_equivalence"] = Property(
    "lipschitz_equivalence", _lip_generate, _lip_check,
    lambda r, tol: _agreement(r, 0.99), 100, "difference-quotient test versus the Lipschitz norm")


def _disk_generate(rng, count):
    return [{"Bn": _random_blaschke(rng).to_json(), "Bm": _random_blaschke(rng).to_json()}
            for _ in range(count)]


def _disk_check(instances, tol):
    z = unit_circle(720)
    results = []
    for inst in instances:
        bn, bm = BlaschkeParams.from_json(inst["Bn"]), BlaschkeParams.from_json(inst["Bm"])
        a = disk_algebra_orthogonal(blaschke_eval(bn, z), blaschke_eval(bm, z), tol=tol)
        b = blaschke_orthogonal(bn, bm, tol=tol)
        results.append({"agree": a.decision == b.decision,
                        "band": _near_threshold(b.margin, tol)})
    return _mark(results, 0.99)


REGISTRY["disk_algebra_blaschke"] = Property(
    "disk_algebra_blaschke", _disk_generate, _disk_check,
    lambda r, tol: _agreement(r, 0.98), 30, "Choquet-boundary test agrees on Blaschke pairs")


def _rank1_generate(rng, count):
    out = []
    for k in range(count):
        sp = ({"field": "real", "dim": 2, "kind": {"p": 3}} if k % 2 == 0
              else {"field": "real", "dim": 2, "kind": {"p": 1.5}})
        out.append({"space": sp, "A": _mat(rng.standard_normal((2, 2))),
                    "x0": _vec(rng.standard_normal(2))})
    return out


def _rank1_check(instances, tol):
    results = []
    for inst in instances:
        space = space_from_json(inst["space"])
        A = OperatorDescriptor(parse_matrix(inst["A"], "real"), space)
        x0 = np.array(inst["x0"])
        x0 = x0 / space.norm(x0)
        xs = space.support(x0).functionals[0]
        u0 = find_orthogonal_smooth(space, A.matrix @ x0)
        if u0 is None:
            results.append({"ok": False, "agree": False, "band": False, "reason": "no u0"})
            continue
        rep = rank_one_orthogonal_smooth(A, x0, xs, u0, tol)
        ok = (not rep["violations"] and rep["smooth"]["applies"]
              and rep["smooth"].get("operator_smooth", False)
              and rep["general"].decision and rep["definition"].decision)
        results.append({"ok": bool(ok), "agree": bool(ok), "band": False,
                        "definition_margin": rep["definition"].margin})
    return results


REGISTRY["rank_one_smooth"] = Property(
    "rank_one_smooth", _rank1_generate, _rank1_check, _all_ok, 20,
    "u0 (x) x0* is smooth and orthogonal to A when u0 is orthogonal to A x0")


def _vorth_generate(rng, count):
    out = []
    for k in range(count):
        p = 2 if k % 2 == 0 else 1
        t, a = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
        out.append({"p": p, "T": _mat(t), "A": _mat(a), "orth": bool(rng.random() < 0.5)})
    return out


def _vorth_check(instances, tol):
    results = []
    for inst in instances:
        space = PNormSpace("real", 2, inst["p"])
        vs = VRadiusSpace(space)
        t, a = parse_matrix(inst["T"], "real"), parse_matrix(inst["A"], "real")
        if inst["orth"]:
            _, lam = bj_margins(vs, a.ravel()[None], t.ravel()[None])
            a = a + lam[0] * t
        T, A = OperatorDescriptor(t, space), OperatorDescriptor(a, space)
        v = v_orthogonal(T, A, tol=tol)
        m, _ = bj_margins(vs, t.ravel()[None], a.ravel()[None])
        d = bool(m[0] >= -tol)
        results.append({"agree": v.decision == d, "margin": float(m[0]),
                        "band": _near_threshold(m[0], tol)})
    return _mark(results, 0.99)


REGISTRY["numerical_radius_orthogonality"] = Property(
    "numerical_radius_orthogonality", _vorth_generate, _vorth_check,
    lambda r, tol: _agreement(r, 0.99), 60, "state test versus the v seminorm definition")


def _bsseq_generate(rng, count):
    return [dict(zip(("T", "A"), map(_mat, _bs_pair(rng, k % 4)))) for k in range(count)]


def _bsseq_check(instances, tol):
    h = PNormSpace("complex", 3, 2)
    results = []
    for inst in instances:
        T = OperatorDescriptor(parse_matrix(inst["T"], "complex"), h)
        A = OperatorDescriptor(parse_matrix(inst["A"], "complex"), h)
        b = bhatia_semrl(T, A, tol)
        s = bs_sequential(T, A, tol=tol)
        results.append({"agree": b.decision == s.decision, "band": False,
                        "bhatia_semrl": b.decision, "band_version": s.decision})
    return _mark(results, 0.95)


REGISTRY["band_bhatia_semrl"] = Property(
    "band_bhatia_semrl", _bsseq_generate, _bsseq_check,
    lambda r, tol: _agreement(r, 0.95), 24, "near-attainment band version of the Hilbert test")


def _cortho_generate(rng, count):
    out = []
    for k in range(count):
        sp = T43_SPACES[k % 3]
        cplx = sp["field"] == "complex"
        n = int(rng.integers(3, 9))
        f = _gauss(rng, (n, 2), cplx)
        g = _gauss(rng, (n, 2), cplx)
        out.append({"space": sp, "f": [_vec(v) for v in f], "g": [_vec(v) for v in g],
                    "orth": bool(rng.random() < 0.5)})
    return out


def _cortho_check(instances, tol):
    from .functions import SupNormSpace
    results = []
    for inst in instances:
        space = space_from_json(inst["space"])
        fv = np.array([parse_vector(v, space.field, 2) for v in inst["f"]])
        gv = np.array([parse_vector(v, space.field, 2) for v in inst["g"]])
        if inst["orth"]:
            sup = SupNormSpace(space, len(fv))
            _, lam = bj_margins(sup, gv.ravel()[None], fv.ravel()[None])
            gv = gv + lam[0] * fv
        f, g = SampledFunction(fv, space), SampledFunction(gv, space)
        a = c_orthogonal(f, g, tol=tol)
        d = c_orthogonal_definition(f, g, tol)
        results.append({"agree": a.decision == d.decision, "margin": d.margin,
                        "band": _near_threshold(d.margin, tol)})
    return _mark(results, 0.99)


REGISTRY["sup_norm_equivalence"] = Property(
    "sup_norm_equivalence", _cortho_generate, _cortho_check,
    lambda r, tol: _agreement(r, 0.99), 90, "extreme functionals at attaining points versus sup norm")


def _smooth_generate(rng, count):
    out = []
    for k in range(count):
        sp = [{"field": "real", "dim": 2, "kind": {"p": 2}},
              {"field": "real", "dim": 2, "kind": {"p": 1}},
              {"field": "complex", "dim": 2, "kind": {"p": 2}}][k % 3]
        t = _gauss(rng, (2, 2), sp["field"] == "complex")
        out.append({"space": sp, "T": _mat(t)})
    return out


def _smooth_check(instances, tol):
    results = []
    for inst in instances:
        space = space_from_json(inst["space"])
        T = OperatorDescriptor(parse_matrix(inst["T"], space.field), space)
        rep = smooth_operator_sufficient(T)
        ok = (not rep["applies"]) or rep["operator_smooth"]
        results.append({"applies": rep["applies"], "ok": bool(ok), "agree": bool(ok),
                        "band": False})
    return results


REGISTRY["smooth_operator_sufficient"] = Property(
    "smooth_operator_sufficient", _smooth_generate, _smooth_check, _all_ok, 30,
    "unique attainment at x0 with T x0 smooth gives a smooth operator")


SUITES = {
    "paper-equivalences": ["james_equivalence", "range_cross_validation",
                           "bhatia_semrl_equivalence", "numerical_index_constants",
                           "obstruction_chain", "vertex_smooth_not_orthogonal",
                           "blaschke_equivalence", "connected_attainment",
                           "scalar_certificates"],
    "invariants": ["blaschke_modulus", "two_point_identification", "lipschitz_equivalence",
                   "disk_algebra_blaschke", "rank_one_smooth",
                   "numerical_radius_orthogonality", "band_bhatia_semrl",
                   "sup_norm_equivalence", "smooth_operator_sufficient"],
}


def problem_for(name, inst, seed, tol):
    return {"version": VERSION, "kind": "check", "property": name, "instance": inst,
            "tol": tol, "seed": seed}


def check_instance(name, inst, tol=DEFAULT_TOL):
    if name not in REGISTRY:
        raise DomainError(f"unknown property {name!r}; known: {sorted(REGISTRY)}")
    return REGISTRY[name].check([inst], tol)[0]


def run_property(name, seed, count=None, tol=DEFAULT_TOL):
    if name not in REGISTRY:
        raise DomainError(f"unknown property {name!r}; known: {sorted(REGISTRY)}")
    prop = REGISTRY[name]
    n = prop.count if count is None else int(count)
    instances = prop.generate(_rng(seed, name), n)
    results = prop.check(instances, tol)
    passed, stats = prop.summarize(results, tol)
    first = next((k for k, r in enumerate(results) if not r["ok"]), None)
    return {"property": name, "passed": bool(passed), "stats": encode(stats),
            "failed_instances": sum(not r["ok"] for r in results),
            "first_failure": None if first is None else problem_for(name, instances[first], seed, tol),
            "first_failure_result": None if first is None else encode(results[first])}


def run_suite(name, seed, budget=None, tol=DEFAULT_TOL, only=None):
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
    props = [p for p in SUITES[name] if only is None or p in only]
    out = []
    for p in props:
        count = None if budget is None else min(REGISTRY[p].count, int(budget))
        out.append(run_property(p, seed, count, tol))
    return {"suite": name, "seed": int(seed), "tol": tol, "version": VERSION,
            "passed": sum(r["passed"] for r in out), "failed": sum(not r["passed"] for r in out),
            "properties": out}
