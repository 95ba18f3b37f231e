"""Operators between finite-dimensional spaces: norms, attainment, radii.

Matrices have shape (codomain.dim, domain.dim). The space of operators is
itself a :class:`~banach_ortho.spaces.NormedSpace` (:class:`OperatorSpace`,
vectors are row-major flattened matrices), so every vector-level routine
applies to operators unchanged. :class:`VRadiusSpace` does the same for
the numerical-radius seminorm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import CapabilityError, DomainError
from .scalar_geometry import unit_circle
from .spaces import (DEFAULT_CIRCLE_GRID, NormedSpace, PNormSpace,
                     SupportSample, WeightedPNormSpace, parse_matrix, space_from_json)

GAP_TOL = 1e-8
SPHERE_SAMPLES = 4096


class OperatorDescriptor:
    """A matrix with its domain and codomain spaces."""

    def __init__(self, matrix, domain, codomain=None):
        codomain = domain if codomain is None else codomain
        if domain.field != codomain.field:
            raise DomainError("domain and codomain must share the scalar field")
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (codomain.dim, domain.dim):
            raise DomainError(f"matrix shape {m.shape} does not match "
                              f"({codomain.dim}, {domain.dim})")
        if not np.all(np.isfinite(m)):
            raise DomainError("matrix has non-finite entries")
        if domain.field == "real":
            if np.any(np.abs(m.imag) > 1e-12):
                raise DomainError("real operator given complex entries")
            m = m.real.copy()
        self.matrix = m
        self.domain = domain
        self.codomain = codomain

    @property
    def field(self):
        return self.domain.field

    @property
    def square(self):
        return self.domain is self.codomain or (
            self.domain.dim == self.codomain.dim
            and self.domain.to_json() == self.codomain.to_json())

    def __call__(self, x):
        return self.matrix @ x

    def with_matrix(self, m):
        return OperatorDescriptor(m, self.domain, self.codomain)

    def to_json(self):
        m = self.matrix
        rows = ([[[float(v.real), float(v.imag)] for v in r] for r in m]
                if self.field == "complex" else m.tolist())
        return {"domain": self.domain.to_json(), "codomain": self.codomain.to_json(),
                "matrix": rows}

    @classmethod
    def from_json(cls, d):
        dom = space_from_json(d["domain"])
        cod = space_from_json(d.get("codomain", d["domain"]))
        return cls(parse_matrix(d["matrix"], dom.field), dom, cod)


def _hilbert(s):
    return isinstance(s, PNormSpace) and s.p == 2.0


def _p_is(s, p):
    return isinstance(s, PNormSpace) and s.p == p


def _vertices(s):
    """Unit-ball vertices for real polyhedral spaces, else None."""
    if s.complex:
        return None
    try:
        v = s.ball_vertices()
    except CapabilityError:
        return None
    if isinstance(s, PNormSpace) and np.isinf(s.p) and s.dim > 16:
        return None
    return v


def _smooth_2d_real(s):
    return (not s.complex and s.dim == 2
            and isinstance(s, (PNormSpace, WeightedPNormSpace)) and s.smooth_everywhere)


# -- operator norm -------------------------------------------------------

def power_iteration(m, tol=1e-12, maxiter=500, seed=0):
    """Largest singular value of m by power iteration on m^H m.

    When the Rayleigh quotient stalls for ``maxiter`` steps the iteration
    matrix is squared (same top eigenvector, squared eigenvalue ratio) and
    the run restarts from the current vector. Returns (sigma, v).
    """
    m = np.asarray(m)
    g = np.conj(m.T) @ m
    n = g.shape[0]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + (1j * rng.standard_normal(n) if np.iscomplexobj(m) else 0)
    v = v / np.linalg.norm(v)
    it_mat = g / max(np.max(np.abs(g)), 1e-300)
    for _ in range(12):
        rq_old = -1.0
        converged = False
        for _ in range(maxiter):
            w = it_mat @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                return 0.0, v
            v = w / nw
            rq = float(np.real(np.conj(v) @ (g @ v)))
            if abs(rq - rq_old) <= tol * max(rq, 1e-300):
                converged = True
                break
            rq_old = rq
        if converged:
            break
        it_mat = it_mat @ it_mat
        it_mat = it_mat / max(np.max(np.abs(it_mat)), 1e-300)
    rq = float(np.real(np.conj(v) @ (g @ v)))
    return float(np.sqrt(max(rq, 0.0))), v


def _max_on_angle(fvals, batch, ngrid=128, period=np.pi, rounds=12):
    """Maximize periodic functions of one angle, one per batch row.

    ``fvals(t)`` maps a (batch, m) angle array to values. A grid locates
    the global maximum, then a shrinking local grid refines it.
    """
    t = np.linspace(0.0, period, ngrid, endpoint=False)[None, :].repeat(batch, 0)
    v = fvals(t)
    k = np.argmax(v, axis=1)
    rows = np.arange(batch)
    best_t, best_v = t[rows, k], v[rows, k]
    width = 2.0 * period / ngrid
    lo = best_t - period / ngrid
    grid = np.linspace(0.0, 1.0, 9)
    for _ in range(rounds):
        tt = lo[:, None] + width * grid[None, :]
        vv = fvals(tt)
        k = np.argmax(vv, axis=1)
        better = vv[rows, k] > best_v
        best_v = np.where(better, vv[rows, k], best_v)
        best_t = np.where(better, tt[rows, k], best_t)
        lo = best_t - width / 8.0
        width = width / 4.0
    return best_t, best_v


def _angle_vec(t):
    return np.stack([np.cos(t), np.sin(t)], axis=-1)


def _sphere_points(space, count, seed=0):
    """Quasi-random points on the unit sphere of a space (Sobol directions)."""
    from scipy.stats import qmc
    from scipy.special import ndtri

    d = space.dim * (2 if space.complex else 1)
    m = max(1, int(np.ceil(np.log2(count))))
    pts = qmc.Sobol(d, scramble=True, seed=seed).random_base2(m)[:count]
    g = ndtri(np.clip(pts, 1e-12, 1 - 1e-12))
    if space.complex:
        g = g[:, : space.dim] + 1j * g[:, space.dim:]
    return g / space.norm_batch(g)[:, None]


def _norm_general(domain, codomain, m, samples=SPHERE_SAMPLES, seed=0):
    """Heuristic lower bound: sphere sampling plus Nelder-Mead polish."""
    xs = _sphere_points(domain, samples, seed)
    vals = codomain.norm_batch(xs @ m.T)
    order = np.argsort(vals)[::-1][:4]
    best_v, best_x = float(vals[order[0]]), xs[order[0]]
    cplx = domain.complex

    def unpack(p):
        return p[: domain.dim] + 1j * p[domain.dim:] if cplx else p

    def neg_ratio(p):
        x = unpack(p)
        nx = domain.norm_batch(x[None, :])[0]
        if nx == 0:
            return 0.0
        return -codomain.norm_batch((m @ x)[None, :])[0] / nx

    for k in order:
        x0 = np.concatenate([xs[k].real, xs[k].imag]) if cplx else xs[k]
        res = minimize(neg_ratio, x0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
        if -res.fun > best_v:
            x = unpack(res.x)
            best_v, best_x = -res.fun, x / domain.norm(x)
    return best_v, best_x


def operator_norms(domain, codomain, mats, hilbert_route="svd"):
    """Operator norms of a stack of matrices, with maximizing unit vectors.

    Returns (values, witnesses, exact). ``exact`` is False only for the
    heuristic sampling route.
    """
    mats = np.asarray(mats)
    b = mats.shape[0]
    n = domain.dim
    if _p_is(domain, 1.0):
        cols = np.transpose(mats, (0, 2, 1)).reshape(-1, codomain.dim)
        cn = codomain.norm_batch(cols).reshape(b, n)
        j = np.argmax(cn, axis=1)
        return cn[np.arange(b), j], np.eye(n, dtype=domain.dtype)[j], True
    if _hilbert(domain) and _hilbert(codomain):
        if hilbert_route == "power":
            out = [power_iteration(m) for m in mats]
            return np.array([o[0] for o in out]), np.array([o[1] for o in out]), True
        _, s, vh = np.linalg.svd(mats)
        w = np.conj(vh[:, 0, :])
        return s[:, 0], w, True
    verts = _vertices(domain)
    if verts is not None:
        images = np.einsum("bij,kj->bki", mats, verts).reshape(-1, codomain.dim)
        vals = codomain.norm_batch(images).reshape(b, len(verts))
        k = np.argmax(vals, axis=1)
        return vals[np.arange(b), k], verts[k], True
    if _smooth_2d_real(domain):
        def f(t):
            x = _angle_vec(t)
            y = np.einsum("bij,bmj->bmi", mats, x)
            num = codomain.norm_batch(y.reshape(-1, codomain.dim)).reshape(t.shape)
            return num / domain.norm_batch(x.reshape(-1, 2)).reshape(t.shape)
        t, v = _max_on_angle(f, b)
        x = _angle_vec(t)
        x = x / domain.norm_batch(x)[:, None]
        return v, x, True
    out = [_norm_general(domain, codomain, m) for m in mats]
    return np.array([o[0] for o in out]), np.array([o[1] for o in out]), False


@dataclass
class NormResult:
    value: float
    witness: np.ndarray
    exact: bool
    route: str

    def __float__(self):
        return float(self.value)


def operator_norm(T):
    """||T|| with a maximizing unit vector.

    Exact routes: l_1 domain (largest column), Hilbert to Hilbert (power
    iteration), real domains with finitely many ball vertices (maximum
    over vertices), real 2-D smooth domains (angle search). Otherwise a
    sampled lower bound flagged ``exact=False``.
    """
    d, c = T.domain, T.codomain
    if _p_is(d, 1.0):
        route = "l1_columns"
    elif _hilbert(d) and _hilbert(c):
        route = "power_iteration"
    elif _vertices(d) is not None:
        route = "ball_vertices"
    elif _smooth_2d_real(d):
        route = "angle_search"
    else:
        route = "sampled_ascent"
    vals, wit, exact = operator_norms(d, c, T.matrix[None], hilbert_route="power")
    return NormResult(float(vals[0]), wit[0], exact, route)


# -- attainment ------------------------------------------------------------

@dataclass
class AttainmentSample:
    """Unit vectors x with ||Tx|| >= ||T|| - eta.

    ``exhaustive`` means the points (with their scalar multiples, and the
    unit sphere of ``subspace`` in the Hilbert case) cover the extreme
    points of the attainment set.
    """

    points: np.ndarray
    eta: float
    exhaustive: bool
    norm: float
    subspace: np.ndarray | None = None


def top_singular_subspace(m):
    u, s, vh = np.linalg.svd(m)
    k = int(np.sum(s >= s[0] - GAP_TOL * max(1.0, s[0])))
    return s, np.conj(vh[:k].T), u[:, :k]


def attainment_set(T, eta=0.0, budget=64, seed=0):
    d, c, m = T.domain, T.codomain, T.matrix
    nt = operator_norm(T)
    if nt.value == 0.0:
        raise DomainError("the zero operator attains its norm everywhere")
    thr = nt.value - max(eta, 1e-12 * nt.value)
    if _hilbert(d) and _hilbert(c):
        s, basis, _ = top_singular_subspace(m)
        pts = basis.T
        if not d.complex:
            pts = np.vstack([pts, -pts])
        return AttainmentSample(pts, eta, True, nt.value, basis)
    if _p_is(d, 1.0):
        cn = c.norm_batch(m.T)
        idx = np.flatnonzero(cn >= thr)
        e = np.eye(d.dim, dtype=d.dtype)[idx]
        pts = e if d.complex else np.vstack([e, -e])
        return AttainmentSample(pts, eta, True, nt.value)
    verts = _vertices(d)
    if verts is not None:
        vals = c.norm_batch(verts @ m.T)
        return AttainmentSample(verts[vals >= thr], eta, True, nt.value)
    xs = _sphere_points(d, SPHERE_SAMPLES, seed)
    vals = c.norm_batch(xs @ m.T)
    pts = list(xs[vals >= thr][:budget]) + [nt.witness]
    if not d.complex:
        pts.append(-nt.witness)
    return AttainmentSample(np.array(pts), eta, False, nt.value)


# -- operator space as a normed space -------------------------------------

class OperatorSpace(NormedSpace):
    """L(X, Y) with the operator norm; vectors are flattened matrices."""

    kind = "operator_norm"

    def __init__(self, domain, codomain=None):
        codomain = domain if codomain is None else codomain
        super().__init__(domain.field, domain.dim * codomain.dim)
        self.domain = domain
        self.codomain = codomain
        self.shape = (codomain.dim, domain.dim)

    def mat(self, v):
        return np.asarray(v).reshape(self.shape)

    def flat(self, m):
        return np.asarray(m).reshape(-1)

    def norm_batch(self, xs):
        xs = np.asarray(xs)
        return operator_norms(self.domain, self.codomain,
                              xs.reshape((-1,) + self.shape))[0]

    def support(self, x, grid=DEFAULT_CIRCLE_GRID, budget=None):
        """Functionals A -> y*(A x) with x attaining and y* norming Tx."""
        t = OperatorDescriptor(self.mat(self.vec(x)), self.domain, self.codomain)
        att = attainment_set(t)
        rows = []
        exhaustive = att.exhaustive
        points = att.points
        if att.subspace is not None and att.subspace.shape[1] > 1:
            exhaustive = False
            rng = np.random.default_rng(0)
            k = att.subspace.shape[1]
            extra = rng.standard_normal((32, k))
            if self.complex:
                extra = extra + 1j * rng.standard_normal((32, k))
            extra = extra @ att.subspace.T
            points = np.vstack([points, extra / np.linalg.norm(extra, axis=1)[:, None]])
        for p in points:
            y = t.matrix @ p
            face = self.codomain.support(y, grid)
            exhaustive = exhaustive and face.exhaustive
            for ys in face.functionals:
                rows.append(np.outer(ys, p).reshape(-1))
        uniq = []
        for r in rows:
            if not any(np.max(np.abs(r - q)) <= 1e-12 for q in uniq):
                uniq.append(r)
        return SupportSample(np.array(uniq), exhaustive)

    def dual_norm(self, phi):
        # nuclear-type dual norm only for Hilbert spaces (trace norm)
        if _hilbert(self.domain) and _hilbert(self.codomain):
            return float(np.sum(np.linalg.svd(self.mat(phi), compute_uv=False)))
        raise CapabilityError("dual of the operator norm is available for Hilbert spaces only")

    def to_json(self):
        return {"operator_space": {"domain": self.domain.to_json(),
                                   "codomain": self.codomain.to_json()}}


# -- numerical radius ------------------------------------------------------

def _rotation_radius_2x2(mats, ngrid=96):
    """max over theta of lambda_max(Re(theta T)) for 2x2 complex matrices."""
    a, b = mats[:, 0, 0], mats[:, 0, 1]
    c, d = mats[:, 1, 0], mats[:, 1, 1]

    def f(t):
        th = np.exp(1j * t)
        p = (th * a[:, None]).real
        q = (th * d[:, None]).real
        off = 0.5 * (th * b[:, None] + np.conj(th * c[:, None]))
        return 0.5 * (p + q) + np.sqrt(0.25 * (p - q) ** 2 + np.abs(off) ** 2)

    return _max_on_angle(f, len(mats), ngrid, 2.0 * np.pi)[1]


def _rotation_radius(mats, ngrid=360):
    """Rotation trick: v(T) = max_theta lambda_max((theta T + (theta T)^H)/2)."""
    th = unit_circle(ngrid)
    out = []
    for m in mats:
        rot = th[:, None, None] * m[None]
        herm = 0.5 * (rot + np.conj(np.transpose(rot, (0, 2, 1))))
        lam = np.linalg.eigvalsh(herm)[:, -1]
        k = int(np.argmax(lam))

        def f(t, m=m):
            r = np.exp(1j * t) * m
            return np.linalg.eigvalsh(0.5 * (r + np.conj(r.T)))[-1]

        lo, hi = 2 * np.pi * (k - 1) / ngrid, 2 * np.pi * (k + 1) / ngrid
        from .orthogonality import golden_section
        _, negv = golden_section(lambda t: -f(t), lo, hi, 1e-12)
        out.append(max(lam[k], -negv))
    return np.array(out)


def _state_pairs(space, grid=DEFAULT_CIRCLE_GRID):
    """Finite list of states (x, x*) for real polyhedral spaces."""
    verts = _vertices(space)
    if verts is None:
        return None
    xs, fs = [], []
    for v in verts:
        for f in space.support(v, grid).functionals:
            xs.append(v)
            fs.append(f)
    return np.array(xs), np.array(fs)


def numerical_radii(space, mats, grid=DEFAULT_CIRCLE_GRID):
    """v(T) = sup |x*(Tx)| over states, for a stack of square matrices."""
    mats = np.asarray(mats)
    b = mats.shape[0]
    if _hilbert(space):
        if space.complex:
            if space.dim == 2:
                return _rotation_radius_2x2(mats)
            return _rotation_radius(mats)
        sym = 0.5 * (mats + np.transpose(mats, (0, 2, 1)))
        ev = np.linalg.eigvalsh(sym)
        return np.maximum(np.abs(ev[:, 0]), np.abs(ev[:, -1]))
    pairs = _state_pairs(space, grid)
    if pairs is not None:
        xs, fs = pairs
        vals = np.einsum("kj,bij,ki->bk", xs, mats, fs)
        return np.abs(vals).max(axis=1)
    if _smooth_2d_real(space):
        def f(t):
            x = _angle_vec(t)
            x = x / space.norm_batch(x.reshape(-1, 2)).reshape(t.shape)[..., None]
            phis = _duality_map_batch(space, x.reshape(-1, 2)).reshape(x.shape)
            tx = np.einsum("bij,bmj->bmi", mats, x)
            return np.abs(np.sum(phis * tx, axis=-1))
        return _max_on_angle(f, b)[1]
    return np.array([_radius_sampled(space, m) for m in mats])


def _duality_map_batch(space, xs):
    """Support functionals of smooth spaces, row by row (unit inputs)."""
    if isinstance(space, WeightedPNormSpace):
        return _duality_map_batch(space.base, xs * space.s) * space.s
    p = space.p
    nx = space.norm_batch(xs)[:, None]
    ax = np.abs(xs) / nx
    ph = np.conj(xs / np.where(np.abs(xs) > 0, np.abs(xs), 1.0))
    if not space.complex:
        ph = ph.real
    return ph * ax ** (p - 1.0)


def _radius_sampled(space, m, samples=SPHERE_SAMPLES):
    """Sampled states (x on the sphere, x* from its face) plus polish."""
    xs = _sphere_points(space, samples)
    best = 0.0
    best_x = xs[0]
    for x in xs:
        for f in space.support(x).functionals:
            val = abs(f @ (m @ x))
            if val > best:
                best, best_x = val, x
    cplx = space.complex

    def neg(p):
        x = p[: space.dim] + 1j * p[space.dim:] if cplx else p
        nx = space.norm(x)
        if nx == 0:
            return 0.0
        x = x / nx
        return -max(abs(f @ (m @ x)) for f in space.support(x).functionals)

    x0 = np.concatenate([best_x.real, best_x.imag]) if cplx else best_x
    res = minimize(neg, x0, method="Nelder-Mead", options={"maxiter": 800})
    return max(best, -res.fun)


def v_radius(T, grid=DEFAULT_CIRCLE_GRID):
    """Numerical radius v(T) of a square operator."""
    if not T.square:
        raise DomainError("numerical radius needs X = Y")
    return float(numerical_radii(T.domain, T.matrix[None], grid)[0])


class VRadiusSpace(NormedSpace):
    """L(X) with the numerical-radius seminorm v."""

    kind = "v_seminorm"
    is_seminorm = True

    def __init__(self, space):
        super().__init__(space.field, space.dim * space.dim)
        self.base = space
        self.shape = (space.dim, space.dim)

    def norm_batch(self, xs):
        return numerical_radii(self.base, np.asarray(xs).reshape((-1,) + self.shape))


def states_sample(space, T=None, count=512, seed=0, grid=DEFAULT_CIRCLE_GRID):
    """States (x, x*) of a space: exhaustive list or a sphere sample.

    When T is given, maximizers of |x*(Tx)| and perturbations of them at
    several scales are added so that near-maximal bands are populated.
    """
    pairs = _state_pairs(space, grid)
    if pairs is not None:
        return pairs[0], pairs[1], True
    xs = list(_sphere_points(space, count, seed))
    rng = np.random.default_rng(seed)
    if T is not None:
        centers = _radius_maximizers(space, T)
        for cx in centers:
            for th in (unit_circle(8) if space.complex else [1.0, -1.0]):
                xs.append(th * cx)
            for s in 2.0 ** -np.arange(1, 12):
                for _ in range(8):
                    e = rng.standard_normal(space.dim)
                    if space.complex:
                        e = e + 1j * rng.standard_normal(space.dim)
                    xs.append(cx + s * e / np.linalg.norm(e))
    xs = np.array(xs, dtype=space.dtype)
    xs = xs / space.norm_batch(xs)[:, None]
    fx, ff = [], []
    for x in xs:
        for f in space.support(x, grid).functionals[:4]:
            fx.append(x)
            ff.append(f)
    return np.array(fx), np.array(ff), False


def _radius_maximizers(space, m):
    """Unit vectors (near-)maximizing |x*(Tx)|."""
    if _hilbert(space):
        out = []
        if space.complex:
            th = unit_circle(360)
            lam = []
            for t in th:
                r = t * m
                w, v = np.linalg.eigh(0.5 * (r + np.conj(r.T)))
                lam.append((w[-1], v[:, -1]))
            best = max(l[0] for l in lam)
            out = [v for w, v in lam if w >= best - 1e-9 * max(1.0, best)]
        else:
            w, v = np.linalg.eigh(0.5 * (m + m.T))
            out = [v[:, 0], v[:, -1]]
        return out
    xs = _sphere_points(space, 2048)
    vals = []
    for x in xs:
        vals.append(max(abs(f @ (m @ x)) for f in space.support(x).functionals))
    vals = np.array(vals)
    best = np.max(vals)
    return list(xs[vals >= best - 1e-3 * max(best, 1e-300)][:8])
