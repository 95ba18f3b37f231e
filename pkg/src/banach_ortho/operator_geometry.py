"""Orthogonality of operators, numerical index and spear obstructions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, minimize

from .errors import CapabilityError, DiagnosticError, DomainError
from .numrange import is_spear_vector, range_scan
from .operators import (OperatorDescriptor, OperatorSpace, _duality_map_batch, _hilbert,
                        _p_is, _sphere_points, _state_pairs, _vertices,
                        attainment_set, numerical_radii, operator_norm, operator_norms,
                        power_iteration, states_sample, top_singular_subspace, v_radius)
from .orthogonality import DEFAULT_TOL, bj_orthogonal
from .scalar_geometry import unit_circle, zero_in_conv
from .spaces import (DEFAULT_CIRCLE_GRID, PNormSpace, WeightedPNormSpace,
                     is_smooth_point, is_strongly_exposed)
from .verdicts import OrthoVerdict


def eta_ladder(kmin=4, kmax=14):
    return 2.0 ** -np.arange(kmin, kmax + 1)


def _check_pair(T, A):
    if T.domain.to_json() != A.domain.to_json() or T.codomain.to_json() != A.codomain.to_json():
        raise DomainError("operators act between different spaces")


def _rand_vec(rng, n, cplx):
    e = rng.standard_normal(n)
    if cplx:
        e = e + 1j * rng.standard_normal(n)
    return e / np.linalg.norm(e)


def _subspace_sphere(k, cplx, rng, rings=24, count=512):
    """Well-spread unit coefficient vectors for a k-dimensional attainment subspace.

    k = 2: a grid in Hopf coordinates (cos a, e^{i phi} sin a), or the circle
    in the real case; otherwise random directions.
    """
    if k == 2:
        if not cplx:
            t = np.pi * np.arange(2 * rings) / (2 * rings)
            return np.stack([np.cos(t), np.sin(t)], axis=1)
        a = 0.5 * np.pi * np.arange(rings + 1) / rings
        ph = unit_circle(2 * rings)
        return np.array([[np.cos(x), p * np.sin(x)] for x in a for p in ph])
    return np.array([_rand_vec(rng, k, cplx) for _ in range(count)])


def _near_attainment(T, count, seed):
    """Unit vectors around the attainment set at geometric distances."""
    d = T.domain
    att = attainment_set(T)
    rng = np.random.default_rng(seed)
    centers = list(att.points)
    if att.subspace is not None and att.subspace.shape[1] > 1:
        for c in _subspace_sphere(att.subspace.shape[1], d.complex, rng):
            centers.append(att.subspace @ c)
    pts = list(centers)
    for c in centers[:16]:
        for s in 2.0 ** -np.arange(1, 14):
            for _ in range(6):
                pts.append(c + s * _rand_vec(rng, d.dim, d.complex))
    pts.extend(_sphere_points(d, count, seed))
    pts = np.array(pts, dtype=d.dtype)
    return pts / d.norm_batch(pts)[:, None], att


def op_bj_general(T, A, ladder=None, tol=DEFAULT_TOL, count=1024, seed=0):
    """T orthogonal to A through near-attaining pairs (x, y*).

    Rung delta collects y*(Ax) over unit x and norming-type y* with
    Re y*(Tx) > ||T|| - delta; the decision is whether 0 is in the hull of
    the smallest rung.
    """
    _check_pair(T, A)
    ladder = eta_ladder() if ladder is None else np.sort(np.asarray(ladder))[::-1]
    xs, att = _near_attainment(T, count, seed)
    nt = att.norm
    na = operator_norm(A).value
    if na == 0.0:
        return OrthoVerdict(True, 0.0, None, True, {"reason": "A = 0"})
    c = T.codomain
    txs, axs = xs @ T.matrix.T, xs @ A.matrix.T
    near = c.norm_batch(txs) >= nt - ladder[0]
    txs, axs = txs[near], axs[near]
    if getattr(c, "smooth_everywhere", False) and isinstance(c, (PNormSpace, WeightedPNormSpace)):
        fs = _duality_map_batch(c, txs)
        strength = np.einsum("ij,ij->i", fs, txs).real
        values = np.einsum("ij,ij->i", fs, axs).astype(complex)
    else:
        strength, values = [], []
        for tx, ax in zip(txs, axs):
            for f in c.support(tx).functionals:
                strength.append((f @ tx).real)
                values.append(f @ ax)
        strength = np.array(strength)
        values = np.array(values, dtype=complex)
    rungs = []
    for dl in ladder:
        sel = strength > nt - dl
        if not np.any(sel):
            raise DiagnosticError(f"no sampled pair reaches the rung delta={dl:g}")
        cert = zero_in_conv(values[sel], tol * na, T.field)
        rungs.append({"delta": float(dl), "size": int(sel.sum()),
                      "distance": cert.distance})
    return OrthoVerdict(cert.inside, -cert.distance, cert, False,
                        {"rungs": rungs, "norm_T": nt, "norm_A": na})


def _extreme_reps(space, grid):
    """Representatives of ext(B_X) up to unimodular scalars, and exactness."""
    verts = _vertices(space)
    if verts is not None:
        return verts, True
    if _p_is(space, 1.0):
        return np.eye(space.dim, dtype=space.dtype), True
    if _p_is(space, np.inf) and space.complex:
        th = unit_circle(grid)
        if grid ** (space.dim - 1) > 200000:
            raise CapabilityError("torus grid too large")
        reps = [np.array((1.0,) + t) for t in itertools.product(th, repeat=space.dim - 1)]
        return np.array(reps, dtype=complex), False
    raise CapabilityError("extreme points of this unit ball are not enumerable")


def op_bj_extreme(T, A, tol=DEFAULT_TOL, grid=DEFAULT_CIRCLE_GRID):
    """T orthogonal to A via extreme pairs: 0 in conv{y*(Ax) : y*(Tx) = ||T||}.

    x runs over extreme points of the domain ball and y* over the extreme
    functionals of the face at Tx.
    """
    _check_pair(T, A)
    reps, exact = _extreme_reps(T.domain, grid)
    c = T.codomain
    images = reps @ T.matrix.T
    norms = c.norm_batch(images)
    nt = float(np.max(norms))
    if nt == 0.0:
        raise DomainError("T = 0")
    slack = 1e-9 if exact else (1.0 - np.cos(np.pi / grid)) * T.domain.dim
    vals = []
    exhaustive = exact
    for x, tx, ntx in zip(reps, images, norms):
        if ntx < nt * (1.0 - slack):
            continue
        face = c.support(tx, grid)
        exhaustive = exhaustive and face.exhaustive
        ax = A.matrix @ x
        for f in face.functionals:
            s = f @ tx
            vals.append(np.conj(s) / abs(s) * (f @ ax))
    if not vals:
        raise DiagnosticError("no extreme pair attains the norm")
    na = max(operator_norm(A).value, 1e-300)
    cert = zero_in_conv(np.array(vals), tol * na, T.field)
    return OrthoVerdict(cert.inside, -cert.distance, cert, exhaustive,
                        {"pairs": len(vals), "norm_T": nt})


def _require_hilbert(T):
    if not (_hilbert(T.domain) and _hilbert(T.codomain)):
        raise CapabilityError("this criterion is stated for Hilbert spaces")


def _min_quadratic_modulus(m, seed=0, starts=12, polish=8, target=0.0):
    """min |c^H m c| over unit c, by Nelder-Mead from eigenvector starts."""
    k = m.shape[0]
    cplx = np.iscomplexobj(m)
    if k == 1:
        return abs(m[0, 0]), np.ones(1, dtype=m.dtype)
    rng = np.random.default_rng(seed)
    cands = []
    for t in unit_circle(8):
        r = t * m
        cands.extend(np.linalg.eigh(0.5 * (r + np.conj(r.T)))[1].T)
    for _ in range(starts):
        cands.append(_rand_vec(rng, k, cplx))
    # pairs of eigenvectors with opposite values contain a zero on their span
    for a, b in itertools.combinations(cands[: 2 * k], 2):
        cands.append((a + b) / np.linalg.norm(a + b) if np.linalg.norm(a + b) > 0 else a)

    def unpack(p):
        return p[:k] + 1j * p[k:] if cplx else p

    def f(p):
        c = unpack(p)
        n2 = np.real(np.vdot(c, c))
        return abs(np.conj(c) @ m @ c) / n2 if n2 > 0 else np.inf

    best_v, best_c = np.inf, None
    scored = sorted(cands, key=lambda c: abs(np.conj(c) @ m @ c))
    for c in scored[:polish]:
        p0 = np.concatenate([c.real, c.imag]) if cplx else np.real(c)
        res = minimize(f, p0, method="Nelder-Mead",
                       options={"xatol": 1e-13, "fatol": 1e-16, "maxiter": 4000})
        if res.fun < best_v:
            c = unpack(res.x)
            best_v, best_c = res.fun, c / np.linalg.norm(c)
        if best_v <= target:
            break
    return float(best_v), best_c


def _support_distance(m, ngrid=720):
    """Distance from 0 to the numerical range of m (rotation trick)."""
    r = unit_circle(ngrid)[:, None, None] * m[None]
    h = np.linalg.eigvalsh(0.5 * (r + np.conj(np.swapaxes(r, 1, 2))))[:, -1]
    return max(0.0, -float(np.min(h)))


def bhatia_semrl(T, A, tol=DEFAULT_TOL, seed=0):
    """Hilbert-space test: some unit x with ||Tx|| = ||T|| and <Ax, Tx> = 0."""
    _check_pair(T, A)
    _require_hilbert(T)
    s, basis, _ = top_singular_subspace(T.matrix)
    na = float(np.linalg.svd(A.matrix, compute_uv=False)[0])
    if s[0] == 0.0:
        raise DomainError("T = 0")
    b = np.conj(A.matrix.T) @ T.matrix
    m = np.conj(basis.T) @ b @ basis
    thr = tol * s[0] * max(na, 1e-300)
    lower = _support_distance(m) if m.shape[0] > 1 else abs(m[0, 0])
    # a positive lower bound above thr already decides; fewer polishes then
    val, c = _min_quadratic_modulus(m, seed, polish=2 if lower > thr else 8,
                                    target=1e-3 * thr)
    return OrthoVerdict(val <= thr, -val, basis @ c, True,
                        {"min_value": val, "lower_bound": lower,
                         "multiplicity": int(m.shape[0]), "threshold": thr})


def bs_sequential(T, A, ladder=None, tol=DEFAULT_TOL, count=2048, seed=0):
    """Band version: min |<Ax, Tx>| over unit x with ||Tx|| >= ||T|| - eta."""
    _check_pair(T, A)
    _require_hilbert(T)
    ladder = eta_ladder() if ladder is None else np.sort(np.asarray(ladder))[::-1]
    nt, _ = power_iteration(T.matrix)
    na = float(np.linalg.svd(A.matrix, compute_uv=False)[0])
    xs, _ = _near_attainment(T, count, seed)
    b = np.conj(A.matrix.T) @ T.matrix
    tn = np.linalg.norm(xs @ T.matrix.T, axis=1)
    q = np.abs(np.einsum("ki,ij,kj->k", np.conj(xs), b, xs))
    n = T.domain.dim
    cplx = T.domain.complex
    def polish(x0, eta):
        def f(p):
            x = p[:n] + 1j * p[n:] if cplx else p
            x = x / np.linalg.norm(x)
            out = abs(np.conj(x) @ b @ x)
            short = (nt - eta) - np.linalg.norm(T.matrix @ x)
            return out + (10.0 * (nt + na) * short if short > 0 else 0.0)

        p0 = np.concatenate([x0.real, x0.imag]) if cplx else x0.real
        res = minimize(f, p0, method="Nelder-Mead",
                       options={"xatol": 1e-13, "fatol": 1e-16, "maxiter": 1500})
        x = res.x[:n] + 1j * res.x[n:] if cplx else res.x
        x = x / np.linalg.norm(x)
        if np.linalg.norm(T.matrix @ x) >= nt - eta:
            return float(abs(np.conj(x) @ b @ x)), x
        return np.inf, x

    # the smallest band is polished; wider bands contain it, so its best
    # point is carried outward
    rungs = []
    best, wit = np.inf, None
    for eta in ladder[::-1]:
        band = tn >= nt - eta
        if not np.any(band):
            raise DiagnosticError(f"empty band at eta={eta:g}")
        idx = np.flatnonzero(band)
        k = idx[np.argmin(q[idx])]
        if q[k] < best:
            best, wit = float(q[k]), xs[k]
        if eta == ladder[-1]:
            for k in idx[np.argsort(q[idx])][:2]:
                v, x = polish(xs[k], eta)
                if v < best:
                    best, wit = v, x
        rungs.append({"eta": float(eta), "min_value": best})
    rungs = rungs[::-1]
    best = rungs[-1]["min_value"]
    thr = tol * nt * max(na, 1e-300)
    return OrthoVerdict(best <= thr, -best, wit, False,
                        {"rungs": rungs, "threshold": thr})


# -- numerical radius seminorm --------------------------------------------

def v_g(G, T, ladder=None, count=512, seed=0):
    """v_G(T) = lim sup{|y*(Tx)| : Re y*(Gx) > 1 - delta} over a sample.

    Returns a dict with the rung values; ``value`` is the smallest rung.
    G must have norm one.
    """
    _check_pair(G, T)
    ng = operator_norm(G).value
    if abs(ng - 1.0) > 1e-9:
        raise DomainError("G must have norm one")
    ladder = eta_ladder() if ladder is None else np.sort(np.asarray(ladder))[::-1]
    xs, _ = _near_attainment(G, count, seed)
    c = G.codomain
    strength, vals = [], []
    for x in xs:
        gx = G.matrix @ x
        if c.norm(gx) < 1.0 - ladder[0]:
            continue
        tx = T.matrix @ x
        for f in c.support(gx).functionals:
            strength.append((f @ gx).real)
            vals.append(abs(f @ tx))
    strength, vals = np.array(strength), np.array(vals)
    rungs = []
    for dl in ladder:
        sel = strength > 1.0 - dl
        if not np.any(sel):
            raise DiagnosticError(f"empty rung delta={dl:g}")
        rungs.append({"delta": float(dl), "value": float(vals[sel].max())})
    return {"value": rungs[-1]["value"], "outer": rungs[0]["value"], "rungs": rungs}


def v_orthogonal(T, A, ladder=None, tol=DEFAULT_TOL, count=512, seed=0):
    """Orthogonality for the numerical-radius seminorm.

    Values x*(Ax) * conj(x*(Tx)) over states with |x*(Tx)| > v(T) - delta;
    the decision is 0 in the hull of the smallest rung. Degenerate when
    v(T) is (numerically) zero.
    """
    _check_pair(T, A)
    if not T.square:
        raise DomainError("numerical radius needs X = Y")
    space = T.domain
    v = v_radius(T)
    if v <= tol:
        return OrthoVerdict(None, 0.0, None, False, {"degenerate": True, "v_T": v})
    xs, fs, exhaustive = states_sample(space, T.matrix, count, seed)
    s = np.einsum("kj,ij,ki->k", xs, T.matrix, fs)
    a = np.einsum("kj,ij,ki->k", xs, A.matrix, fs)
    vals = a * np.conj(s)
    va = max(v_radius(A), 1e-300)
    ladder = eta_ladder() if ladder is None else np.sort(np.asarray(ladder))[::-1]
    rungs = []
    cert = None
    for dl in ladder:
        sel = np.abs(s) >= (v * (1.0 - 1e-9) if exhaustive else v - dl)
        if not np.any(sel):
            raise DiagnosticError(f"empty rung delta={dl:g}")
        cert = zero_in_conv(vals[sel], tol * v * va, T.field)
        rungs.append({"delta": float(dl), "size": int(sel.sum()), "distance": cert.distance})
    return OrthoVerdict(cert.inside, -cert.distance, cert, exhaustive,
                        {"rungs": rungs, "v_T": v, "degenerate": False})


# -- numerical index -------------------------------------------------------

@dataclass
class IndexResult:
    upper: float
    witness: np.ndarray
    lower: float | None = None
    lower_method: str | None = None
    restarts: int = 0
    details: dict = field(default_factory=dict)

    def to_json(self):
        from .verdicts import encode
        return {"upper": self.upper, "lower": self.lower, "lower_method": self.lower_method,
                "witness": encode(self.witness), "restarts": self.restarts,
                "details": encode(self.details)}


def _ratio_batch(space, mats):
    nt = operator_norms(space, space, mats)[0]
    v = numerical_radii(space, mats)
    return np.where(nt > 0, v / np.where(nt > 0, nt, 1.0), np.inf)


def _directions(dim):
    eye = np.eye(dim)
    dirs = list(eye)
    for i, j in itertools.combinations(range(dim), 2):
        dirs.append((eye[i] + eye[j]) / np.sqrt(2))
        dirs.append((eye[i] - eye[j]) / np.sqrt(2))
    return np.array(dirs)


def index_lower_bound_lp(space):
    """Exact n(X) for real polyhedral spaces by linear programming.

    v(T) is the maximum of |f(T x)| over the finite list of vertex/face
    states and ||T|| the maximum of |g(T w)| over vertices w and dual
    extreme points g, so n(X) = 1 / max_(w, g) max{g(T w) : |f(T x)| <= 1}.
    Returns 0 when v has a kernel (unbounded program).
    """
    pairs = _state_pairs(space)
    if pairs is None:
        raise CapabilityError("needs a real space with finitely many ball vertices")
    xs, fs = pairs
    n = space.dim
    rows = np.array([np.outer(f, x).ravel() for x, f in zip(xs, fs)])
    a_ub = np.vstack([rows, -rows])
    b_ub = np.ones(len(a_ub))
    verts = space.ball_vertices()
    duals = space.dual_extremes()
    best = 0.0
    seen = set()
    for w in verts:
        for g in duals:
            obj = np.outer(g, w).ravel()
            key = tuple(np.round(obj, 12))
            if key in seen or tuple(np.round(-obj, 12)) in seen:
                continue
            seen.add(key)
            res = linprog(-obj, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * (n * n),
                          method="highs")
            if res.status == 3:
                return 0.0
            if res.status != 0:
                raise DiagnosticError(f"linear program failed: {res.message}")
            best = max(best, -res.fun)
    return 1.0 / best


def numerical_index(space, restarts=64, seed=0, sweeps=12, rounds=8):
    """Upper bound for n(X) = inf v(T)/||T|| by multi-start direct search.

    All restarts advance together: each sweep does a line search along every
    coordinate direction and every pairwise sum/difference of coordinates
    (these escape the ridges where plain coordinate descent stalls). Real
    polyhedral spaces of dimension <= 3 also get the exact LP value as a
    certified lower bound.
    """
    n = space.dim
    cplx = space.complex
    dim = n * n * (2 if cplx else 1)
    rng = np.random.default_rng(seed)
    p = rng.standard_normal((restarts, dim))

    def to_mats(pp):
        pp = pp.reshape(pp.shape[:-1] + (-1,))
        m = pp[..., : n * n] + 1j * pp[..., n * n:] if cplx else pp
        return m.reshape(pp.shape[:-1] + (n, n))

    def ratio(pp):
        flat = pp.reshape(-1, dim)
        return _ratio_batch(space, to_mats(flat)).reshape(pp.shape[:-1])

    p = p / np.linalg.norm(p, axis=1)[:, None]
    cur = ratio(p)
    dirs = _directions(dim)
    step = np.full(restarts, 0.5)
    grid = np.linspace(-1.0, 1.0, 17)
    history = [float(cur.min())]
    for _ in range(sweeps):
        start = cur.copy()
        for d in dirs:
            lo = -step
            width = 2.0 * step
            for _ in range(rounds):
                ts = lo[:, None] + width[:, None] * (grid[None, :] + 1.0) / 2.0
                cand = p[:, None, :] + ts[..., None] * d[None, None, :]
                vals = ratio(cand)
                k = np.argmin(vals, axis=1)
                rows = np.arange(restarts)
                better = vals[rows, k] < cur
                p = np.where(better[:, None], cand[rows, k], p)
                cur = np.where(better, vals[rows, k], cur)
                lo = ts[rows, np.clip(k, 1, 15)] - width / 16.0
                width = width / 8.0
        p = p / np.linalg.norm(p, axis=1)[:, None]
        gain = start - cur
        step = np.where(gain < 1e-12, step * 0.5, step)
        history.append(float(cur.min()))
        if np.all(step < 1e-9):
            break
    best = int(np.argmin(cur))
    res = minimize(lambda q: float(ratio(q[None])[0]), p[best], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
    upper = min(float(cur[best]), float(res.fun))
    wit = to_mats((res.x if res.fun < cur[best] else p[best])[None])[0]
    out = IndexResult(upper, wit, restarts=restarts, details={"history": history})
    if not cplx and n <= 3 and _state_pairs(space) is not None:
        out.lower = index_lower_bound_lp(space) * (1.0 - 1e-9)
        out.lower_method = "vertex_state_lp"
    return out


def index_certificate(space, witness, count=8192):
    """Ratio on a witness by two routes: the default radius and dense states."""
    t = OperatorDescriptor(witness, space)
    nt = operator_norm(t).value
    v_main = v_radius(t)
    xs = _sphere_points(space, count, seed=7)
    fs = np.array([space.support(x).functionals[0] for x in xs])
    v_states = float(np.max(np.abs(np.einsum("kj,ij,ki->k", xs, witness, fs))))
    return {"norm": nt, "v": v_main, "v_states": v_states,
            "ratio": v_main / nt, "ratio_states": v_states / nt}


# -- smoothness and rank-one constructions --------------------------------

def _unique_up_to_scalar(points, space, tol=1e-6):
    x0 = points[0]
    for x in points[1:]:
        if space.complex:
            ph = np.vdot(x0, x)
            ph = ph / abs(ph) if abs(ph) > 0 else 1.0
            d = space.norm(x - ph * x0)
        else:
            d = min(space.norm(x - x0), space.norm(x + x0))
        if d > tol:
            return False
    return True


def smooth_operator_sufficient(T, cross_check=True):
    """Unique attainment (up to scalars) at x0 with T x0 smooth => T smooth."""
    att = attainment_set(T)
    d, c = T.domain, T.codomain
    if att.subspace is not None:
        unique = att.subspace.shape[1] == 1
    else:
        unique = _unique_up_to_scalar(att.points, d)
    x0 = att.points[0]
    image = is_smooth_point(c, T.matrix @ x0)
    out = {"applies": bool(unique and image.decision), "unique_attainment": bool(unique),
           "attainment_exhaustive": att.exhaustive, "image_smooth": bool(image.decision),
           "x0": x0}
    if cross_check and out["applies"]:
        op = OperatorSpace(d, c)
        sm = is_smooth_point(op, T.matrix.ravel())
        out["operator_smooth"] = bool(sm.decision)
        out["operator_face_diameter"] = float(sm.margin)
    return out


def exposing_functional(space, x0):
    """A functional strongly exposing the unit vector x0 (mean of its face)."""
    face = space.support(x0).functionals
    f = face.mean(axis=0)
    f = f / (f @ x0).real
    return f


def find_orthogonal_smooth(space, w, seed=0, tol=DEFAULT_TOL):
    """A smooth unit vector u with u orthogonal to w, or None."""
    rng = np.random.default_rng(seed)
    nw = space.norm(w)
    if nw == 0.0:
        raise DomainError("w must be non-zero")
    if space.smooth_everywhere and not space.complex:
        a = w / nw
        for _ in range(8):
            c = _rand_vec(rng, space.dim, False)
            if abs(abs(c @ a) - np.linalg.norm(a)) < 1e-6:
                continue

            def g(t):
                u = np.cos(t) * a + np.sin(t) * c
                u = u / space.norm(u)
                return (space.support(u).functionals[0] @ w).real, u

            lo, hi = 0.0, np.pi
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if g(mid)[0] > 0:
                    lo = mid
                else:
                    hi = mid
                if hi - lo < 1e-15:
                    break
            u = g(0.5 * (lo + hi))[1]
            if bj_orthogonal(space, u, w, tol).decision:
                return u
        return None
    if space.complex:
        if not space.smooth_everywhere:
            return None

        def h(p):
            u = p[: space.dim] + 1j * p[space.dim:]
            nu = space.norm(u)
            return abs(space.support(u / nu).functionals[0] @ w) if nu > 0 else np.inf

        for _ in range(8):
            u0 = _rand_vec(rng, space.dim, True)
            res = minimize(h, np.concatenate([u0.real, u0.imag]), method="Nelder-Mead",
                           options={"xatol": 1e-14, "fatol": 1e-16, "maxiter": 4000})
            u = res.x[: space.dim] + 1j * res.x[space.dim:]
            u = u / space.norm(u)
            if bj_orthogonal(space, u, w, tol).decision:
                return u
        return None
    try:
        duals = space.dual_extremes()
        verts = space.ball_vertices()
    except CapabilityError:
        return None
    for f in duals:
        if abs(f @ w) > 1e-12 * nw:
            continue
        facet = verts[np.abs(verts @ f - 1.0) <= 1e-12]
        if len(facet) == 0:
            continue
        u = facet.mean(axis=0)
        u = u / space.norm(u)
        if is_smooth_point(space, u).decision and bj_orthogonal(space, u, w, tol).decision:
            return u
    return None


def rank_one_orthogonal_smooth(A, x0, x0_star, u0, tol=DEFAULT_TOL):
    """Build T = u0 (x) x0* and check that T is smooth and orthogonal to A.

    Preconditions (reported under ``violations``): x0 a strongly exposed
    unit vector, x0* of norm one with x0*(x0) = 1, u0 a smooth unit vector
    orthogonal to A x0.
    """
    d, c = A.domain, A.codomain
    x0, x0_star, u0 = d.vec(x0), d.vec(x0_star), c.vec(u0)
    bad = []
    if abs(d.norm(x0) - 1.0) > 1e-9 or not is_strongly_exposed(d, x0):
        bad.append("x0 is not a strongly exposed unit vector")
    try:
        dn = d.dual_norm(x0_star)
    except CapabilityError:
        dn = 1.0
    if abs(dn - 1.0) > 1e-9 or abs(x0_star @ x0 - 1.0) > 1e-9:
        bad.append("x0* is not a norming functional of x0")
    if abs(c.norm(u0) - 1.0) > 1e-9 or not is_smooth_point(c, u0).decision:
        bad.append("u0 is not a smooth unit vector")
    if not bj_orthogonal(c, u0, A.matrix @ x0, tol).decision:
        bad.append("u0 is not orthogonal to A x0")
    T = OperatorDescriptor(np.outer(u0, x0_star), d, c)
    out = {"T": T, "violations": bad}
    if bad:
        return out
    out["smooth"] = smooth_operator_sufficient(T)
    out["general"] = op_bj_general(T, A, tol=tol)
    out["definition"] = bj_orthogonal(OperatorSpace(d, c), T.matrix.ravel(),
                                      A.matrix.ravel(), tol)
    return out


def _exposed_candidates(space):
    cands = list(np.eye(space.dim, dtype=space.dtype))
    try:
        cands.extend(space.ball_vertices())
    except CapabilityError:
        pass
    out = []
    for x in cands:
        x = x / space.norm(x)
        if is_strongly_exposed(space, x):
            out.append(x)
    return out


def spear_obstruction_check(G, tol=DEFAULT_TOL, certify=True, grid=DEFAULT_CIRCLE_GRID):
    """Look for a strongly exposed x0 and a smooth u0 orthogonal to G x0.

    Such a pair yields the rank-one probe T = u0 (x) x0* with v_G(T) < ||T||,
    so G cannot be a spear. With ``certify`` the probe's range is also
    computed from the definition (outer estimate of its radius).
    """
    X, Y = G.domain, G.codomain
    if abs(operator_norm(G).value - 1.0) > 1e-9:
        raise DomainError("G must have norm one")
    for x0 in _exposed_candidates(X):
        w = G.matrix @ x0
        if Y.norm(w) == 0.0:
            continue
        u0 = find_orthogonal_smooth(Y, w)
        if u0 is None:
            continue
        xs = exposing_functional(X, x0)
        T = OperatorDescriptor(np.outer(u0, xs), X, Y)
        norm_t = operator_norm(T).value
        vg = v_g(G, T)
        out = {"obstruction": True, "x0": x0, "u0": u0, "x0_star": xs, "probe": T.matrix,
               "probe_norm": norm_t, "v_G": vg["value"], "v_G_outer": vg["outer"]}
        op = OperatorSpace(X, Y)
        if certify:
            est = range_scan(op, G.matrix.ravel(), T.matrix.ravel(), grid=8)
            out["v_G_definition"] = est.radius
        sp = is_spear_vector(op, G.matrix.ravel(), probe_budget=4,
                             extra_probes=[T.matrix.ravel()])
        out["spear"] = sp.decision
        out["spear_verdict"] = sp
        return out
    return {"obstruction": False, "spear": None}
