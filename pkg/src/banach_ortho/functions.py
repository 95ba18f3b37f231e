"""Sampled function spaces: C(K, Y) on grids, the disk algebra, Lipschitz maps.

A compact K is replaced by a finite grid (optionally with circle or path
adjacency so that connectedness of attainment sets can be checked). With a
finite grid all suprema are maxima, so attainment sets are computed exactly
on the grid and the band ladder is reported as a sensitivity measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DiagnosticError, DomainError
from .orthogonality import DEFAULT_TOL, bj_orthogonal
from .operator_geometry import eta_ladder
from .scalar_geometry import unit_circle, zero_in_conv
from .spaces import NormedSpace, PNormSpace, SupportSample, space_from_json, parse_vector
from .verdicts import OrthoVerdict

CIRCLE_GRID = 720
MU_GRID = 360
ATTAIN_REL = 1e-9


class SampledFunction:
    """Values of a Y-valued function on a finite grid."""

    def __init__(self, values, codomain, grid=None, adjacency="none"):
        vals = np.asarray(values, dtype=complex)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.shape[0] == 0:
            raise DomainError("grid is empty")
        if vals.shape[1] != codomain.dim:
            raise DomainError("values do not match the codomain dimension")
        if not np.all(np.isfinite(vals)):
            raise DomainError("function values must be finite")
        if codomain.field == "real":
            if np.any(np.abs(vals.imag) > 1e-12):
                raise DomainError("real codomain given complex values")
            vals = vals.real.copy()
        if adjacency not in ("circle", "path", "none"):
            raise DomainError(f"unknown adjacency {adjacency!r}")
        self.values = vals
        self.codomain = codomain
        self.grid = list(range(len(vals))) if grid is None else list(grid)
        if len(self.grid) != len(vals):
            raise DomainError("grid and values differ in length")
        self.adjacency = adjacency

    def __len__(self):
        return len(self.values)

    def norms(self):
        return self.codomain.norm_batch(self.values)

    def like(self, values):
        return SampledFunction(values, self.codomain, self.grid, self.adjacency)

    def to_json(self):
        if self.codomain.complex:
            vals = [[[float(v.real), float(v.imag)] for v in row] for row in self.values]
        else:
            vals = self.values.tolist()
        return {"grid": self.grid, "adjacency": self.adjacency, "values": vals,
                "codomain": self.codomain.to_json()}

    @classmethod
    def from_json(cls, d):
        cod = space_from_json(d["codomain"])
        vals = [parse_vector(v, cod.field, cod.dim) for v in d["values"]]
        return cls(np.array(vals), cod, d.get("grid"), d.get("adjacency", "none"))


def circle_function(fn, codomain, n=CIRCLE_GRID):
    """Sample fn(t) at n equally spaced angles, with circle adjacency."""
    t = 2.0 * np.pi * np.arange(n) / n
    vals = np.array([np.atleast_1d(fn(tt)) for tt in t])
    return SampledFunction(vals, codomain, list(t), "circle")


def sup_norm(f):
    return float(np.max(f.norms()))


def _components(idx, n, adjacency):
    """Connected components of the index set on the grid graph."""
    idx = sorted(int(i) for i in idx)
    if not idx:
        return []
    if adjacency == "none":
        return [[i] for i in idx]
    comps = [[idx[0]]]
    for i in idx[1:]:
        if i == comps[-1][-1] + 1:
            comps[-1].append(i)
        else:
            comps.append([i])
    if adjacency == "circle" and len(comps) > 1 and comps[0][0] == 0 and comps[-1][-1] == n - 1:
        comps[0] = comps.pop() + comps[0]
    return comps


@dataclass
class FunctionAttainment:
    indices: list
    components: list
    eta: float

    @property
    def connected(self):
        return len(self.components) == 1


def attainment_set_f(f, eta=0.0):
    """Grid points with ||f(t)|| >= ||f|| - eta, with their components."""
    nr = f.norms()
    nf = float(nr.max())
    if nf == 0.0:
        raise DomainError("attainment set of the zero function")
    idx = np.flatnonzero(nr >= nf - max(eta, ATTAIN_REL * nf))
    return FunctionAttainment(list(idx), _components(idx, len(f), f.adjacency), eta)


def _face_values(space, fv, gv, norm_f, ladder, tol, scale, field):
    """Hull test on {y*(g_k) : y* in ext face at f_k, f_k (near) attaining}.

    Rows of fv/gv are evaluation points (grid points or difference
    quotients). The decision uses the exact attainment set of the finite
    grid; band rungs are reported alongside.
    """
    nr = space.norm_batch(fv)
    keep = np.flatnonzero(nr >= norm_f - ladder[0])
    strength, vals = [], []
    for k in keep:
        for y in space.support(fv[k]).functionals:
            s = y @ fv[k]
            strength.append(abs(s))
            vals.append(np.conj(s) / abs(s) * (y @ gv[k]))
    strength = np.array(strength)
    vals = np.array(vals, dtype=complex)
    rungs = []
    for eta in ladder:
        sel = strength >= norm_f - eta
        cert = zero_in_conv(vals[sel], tol * scale, field)
        rungs.append({"eta": float(eta), "size": int(sel.sum()), "inside": cert.inside})
    exact = strength >= norm_f * (1.0 - ATTAIN_REL)
    if not np.any(exact):
        raise DiagnosticError("empty attainment set")
    cert = zero_in_conv(vals[exact], tol * scale, field)
    stable = all(r["inside"] == cert.inside for r in rungs[-2:])
    return OrthoVerdict(cert.inside, -cert.distance, cert, True,
                        {"rungs": rungs, "band_stable": stable, "points": int(exact.sum())})


def c_orthogonal(f, g, ladder=None, tol=DEFAULT_TOL):
    """f orthogonal to g in C(K, Y): extreme functionals at attaining points."""
    if len(f) != len(g) or f.codomain.to_json() != g.codomain.to_json():
        raise DomainError("functions live on different grids or codomains")
    ladder = eta_ladder() if ladder is None else np.sort(np.asarray(ladder))[::-1]
    nf = sup_norm(f)
    if nf == 0.0:
        raise DomainError("f = 0")
    ng = max(sup_norm(g), 1e-300)
    return _face_values(f.codomain, f.values, g.values, nf, ladder, tol, ng, f.codomain.field)


class SupNormSpace(NormedSpace):
    """Y-valued functions on an N-point grid with the sup norm (flattened)."""

    kind = "sup"

    def __init__(self, codomain, npoints):
        super().__init__(codomain.field, codomain.dim * npoints)
        self.codomain = codomain
        self.npoints = npoints

    def norm_batch(self, xs):
        xs = np.asarray(xs)
        rows = xs.reshape(-1, self.codomain.dim)
        return self.codomain.norm_batch(rows).reshape(xs.shape[0], self.npoints).max(axis=1)

    def support(self, x, grid=64, budget=None):
        v = np.asarray(x).reshape(self.npoints, self.codomain.dim)
        nr = self.codomain.norm_batch(v)
        top = np.flatnonzero(nr >= nr.max() * (1.0 - ATTAIN_REL))
        out, exhaustive = [], True
        for t in top:
            face = self.codomain.support(v[t], grid)
            exhaustive = exhaustive and face.exhaustive
            for y in face.functionals:
                phi = np.zeros((self.npoints, self.codomain.dim), dtype=self.dtype)
                phi[t] = y
                out.append(phi.ravel())
        return SupportSample(np.array(out), exhaustive)


def c_orthogonal_definition(f, g, tol=DEFAULT_TOL):
    space = SupNormSpace(f.codomain, len(f))
    return bj_orthogonal(space, f.values.ravel(), g.values.ravel(), tol)


def _directional_batch(space, xs, ys, tol):
    """For each row: inf over real t of ||x + t y|| - ||x|| >= -tol."""
    from .orthogonality import minimize_along_batch

    nx = space.norm_batch(xs)
    ny = space.norm_batch(ys)
    zero = ny == 0.0
    radii = 2.0 * nx / np.where(zero, 1.0, ny)
    vals = minimize_along_batch(space, xs, np.where(zero[:, None], 0.0, ys), radii)[1]
    return (vals - nx >= -tol) | zero


def _face_intervals(space, fx, gy, mus):
    """lo/hi of Re(mu w*(g(t))) over extreme norming functionals w* at f(t).

    Returns arrays of shape (len(mus), len(fx)).
    """
    lo = np.full((len(mus), len(fx)), np.inf)
    hi = np.full((len(mus), len(fx)), -np.inf)
    for k, (x, y) in enumerate(zip(fx, gy)):
        fun = space.support(x).functionals
        s = fun @ x
        w = np.conj(s) / np.abs(s) * (fun @ y)
        r = (mus[:, None] * w[None, :]).real
        lo[:, k] = r.min(axis=1)
        hi[:, k] = r.max(axis=1)
    return lo, hi


def _adjacent_pairs(indices, n, adjacency):
    pos = {int(i): k for k, i in enumerate(indices)}
    pairs = []
    for k, i in enumerate(indices):
        j = int(i) + 1
        if adjacency == "circle":
            j %= n
        if j in pos and j != int(i):
            pairs.append((k, pos[j]))
    return pairs


def pointwise_witness_check(f, g, mu_grid=MU_GRID, tol=DEFAULT_TOL, ladder=None, confirm=8):
    """Connected-attainment statement: pointwise orthogonality at some t.

    For each direction mu (mu = 1 over the reals) a witness is an attaining
    grid point whose face interval of Re(mu w*(g(t))) contains zero, or two
    adjacent attaining points whose intervals lie on opposite sides of zero
    (a zero of the continuous function between them). Grid witnesses for a
    few directions are confirmed by the norm-level directional test. Only
    checked when f is orthogonal to g.
    """
    att = attainment_set_f(f)
    half = attainment_set_f(f, 0.5 * ATTAIN_REL * sup_norm(f))
    out = {"applicable": att.connected, "components": len(att.components),
           "attainment_size": len(att.indices),
           "band_stable": len(half.components) == len(att.components),
           "violations": 0, "checked": 0}
    if not att.connected:
        out["reason"] = "attainment set is disconnected on the grid"
        return out
    verdict = c_orthogonal(f, g, ladder, tol)
    out["orthogonal"] = verdict.decision
    if not verdict.decision:
        out["note"] = "vacuous: f is not orthogonal to g"
        return out
    Y = f.codomain
    fx = f.values[att.indices]
    gy = g.values[att.indices]
    mus = unit_circle(mu_grid) if Y.complex else np.array([1.0 + 0j])
    lo, hi = _face_intervals(Y, fx, gy, mus)
    band = tol * max(sup_norm(g), 1.0)
    hit = (lo <= band) & (hi >= -band)
    pairs = _adjacent_pairs(att.indices, len(f), f.adjacency)
    bracket = np.zeros(len(mus), dtype=bool)
    for a, b in pairs:
        bracket |= ((hi[:, a] < -band) & (lo[:, b] > band)) | ((lo[:, a] > band) & (hi[:, b] < -band))
    grid_ok = hit.any(axis=1)
    ok = grid_ok | bracket
    bad = [complex(m) for m in mus[~ok]]
    confirmed = 0
    checked_confirm = 0
    sel = np.flatnonzero(grid_ok)[:confirm]
    for m in sel:
        k = int(np.flatnonzero(hit[m])[0])
        checked_confirm += 1
        if Y.complex:
            confirmed += bool(_directional_batch(Y, fx[k:k + 1], mus[m] * gy[k:k + 1], tol)[0])
        else:
            confirmed += bool(bj_orthogonal(Y, fx[k], gy[k], tol).decision)
    out.update(checked=len(mus), violations=len(bad), failed_mu=bad[:8],
               grid_witness=int(grid_ok.sum()), bracket_only=int((bracket & ~grid_ok).sum()),
               confirmed=confirmed, confirm_checked=checked_confirm)
    if confirmed < checked_confirm:
        out["violations"] += checked_confirm - confirmed
        out["note"] = "face interval witness not confirmed by the norm-level test"
    return out


# -- Blaschke products -----------------------------------------------------

@dataclass
class BlaschkeParams:
    k: int = 0
    zeros: list = field(default_factory=list)

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise DomainError("k must be a nonnegative integer")
        self.k = int(self.k)
        self.zeros = [complex(a) for a in self.zeros]
        for a in self.zeros:
            if not 0.0 < abs(a) < 1.0:
                raise DomainError("Blaschke zeros need 0 < |a| < 1")

    @property
    def degree(self):
        return self.k + len(self.zeros)

    def to_json(self):
        return {"k": self.k, "zeros": [[a.real, a.imag] for a in self.zeros]}

    @classmethod
    def from_json(cls, d):
        zs = [complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(z)
              for z in d.get("zeros", [])]
        return cls(d.get("k", 0), zs)


def blaschke_eval(params, z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1.0 + 1e-12):
        raise DomainError("Blaschke products are evaluated on the closed disk")
    out = z ** params.k
    for a in params.zeros:
        out = out * (abs(a) / a) * (z - a) / (1.0 - np.conj(a) * z)
    return out


def blaschke_orthogonal(bn, bm, grid=CIRCLE_GRID, mu_grid=MU_GRID, tol=DEFAULT_TOL):
    """Directional search: for each mu some z0 on the circle with
    Re(mu conj(Bn(z0)) Bm(z0)) = 0, located by sign changes on the grid and
    refined by bisection. Cross-checked with the hull test on the grid.
    """
    ang = 2.0 * np.pi * np.arange(grid) / grid
    h = np.conj(blaschke_eval(bn, np.exp(1j * ang))) * blaschke_eval(bm, np.exp(1j * ang))

    def hval(t):
        z = np.exp(1j * t)
        return np.conj(blaschke_eval(bn, z)) * blaschke_eval(bm, z)

    failed, witnesses = [], []
    for mu in unit_circle(mu_grid):
        r = (mu * h).real
        hit = np.flatnonzero(np.abs(r) <= tol)
        if hit.size:
            witnesses.append(float(ang[hit[0]]))
            continue
        sc = np.flatnonzero(np.sign(r) != np.sign(np.roll(r, -1)))
        if sc.size == 0:
            failed.append(complex(mu))
            continue
        i = int(sc[0])
        lo, hi = ang[i], ang[i] + 2.0 * np.pi / grid
        rlo = (mu * hval(lo)).real
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            rm = (mu * hval(mid)).real
            if abs(rm) <= tol:
                break
            if np.sign(rm) == np.sign(rlo):
                lo, rlo = mid, rm
            else:
                hi = mid
        witnesses.append(float(mid))
    hull = zero_in_conv(h, tol)
    decision = not failed
    return OrthoVerdict(decision, -hull.distance, witnesses[:8], True,
                        {"failed_mu": len(failed), "hull_inside": hull.inside,
                         "hull_distance": hull.distance, "agree": hull.inside == decision})


def blaschke_definition(bn, bm, grid=CIRCLE_GRID, tol=DEFAULT_TOL):
    """Definition-level test: inf over lambda of the sampled sup norm."""
    z = unit_circle(grid)
    space = SupNormSpace(PNormSpace("complex", 1, 2), grid)
    return bj_orthogonal(space, blaschke_eval(bn, z), blaschke_eval(bm, z), tol)


def disk_algebra_orthogonal(f, g, ladder=None, tol=DEFAULT_TOL):
    """Orthogonality in the disk algebra from samples on the circle grid.

    The set is {theta g(s) : theta f(s) = ||f||}, the boundary circle being
    the Choquet boundary.
    """
    f = np.asarray(f, dtype=complex).ravel()
    g = np.asarray(g, dtype=complex).ravel()
    if f.shape != g.shape:
        raise DomainError("samples differ in length")
    nf = float(np.max(np.abs(f)))
    if nf == 0.0:
        raise DomainError("f = 0")
    ladder = eta_ladder() if ladder is None else np.sort(np.asarray(ladder))[::-1]
    scalars = PNormSpace("complex", 1, 2)
    return _face_values(scalars, f[:, None], g[:, None], nf, ladder, tol,
                        max(float(np.max(np.abs(g))), 1e-300), "complex")


# -- Lipschitz maps ----------------------------------------------------------

class FiniteMetricSpace:
    """Points 0..n-1 with a distance matrix; point 0 is the base point."""

    def __init__(self, dist, labels=None):
        d = np.asarray(dist, dtype=float)
        n = d.shape[0]
        if d.shape != (n, n) or n < 2:
            raise DomainError("distance matrix must be square with n >= 2")
        if np.max(np.abs(d - d.T)) > 1e-12 or np.max(np.abs(np.diag(d))) > 1e-12:
            raise DomainError("distance matrix must be symmetric with zero diagonal")
        off = d[~np.eye(n, dtype=bool)]
        if np.any(off <= 0):
            raise DomainError("distinct points need positive distance")
        # tri[i, j, k] = d(i, j) + d(j, k) - d(i, k)
        tri = d[:, :, None] + d[None, :, :] - d[:, None, :]
        if np.min(tri) < -1e-12:
            raise DomainError("triangle inequality fails")
        self.dist = d
        self.labels = list(range(n)) if labels is None else list(labels)

    @property
    def size(self):
        return self.dist.shape[0]

    def pairs(self):
        n = self.size
        return [(s, t) for s in range(n) for t in range(s + 1, n)]


def _quotients(metric, values):
    i, j = np.triu_indices(metric.size, 1)
    return (values[i] - values[j]) / metric.dist[i, j][:, None]


def _check_based(values, space):
    v = np.asarray(values)
    if v.ndim == 1:
        v = v[:, None]
    if space.norm(np.asarray(v[0], dtype=space.dtype)) > 1e-12:
        raise DomainError("Lipschitz maps must vanish at the base point")
    return np.asarray(v, dtype=space.dtype)


def lipschitz_norm(metric, values, space):
    v = _check_based(values, space)
    return float(np.max(space.norm_batch(_quotients(metric, v))))


class LipschitzSpace(NormedSpace):
    """Lip_0(M, Y) for a finite pointed metric space; base value omitted."""

    kind = "lipschitz"

    def __init__(self, metric, codomain):
        super().__init__(codomain.field, codomain.dim * (metric.size - 1))
        self.metric = metric
        self.codomain = codomain

    def embed(self, values):
        return np.asarray(values)[1:].ravel()

    def norm_batch(self, xs):
        xs = np.asarray(xs)
        b = xs.shape[0]
        vals = np.concatenate([np.zeros((b, 1, self.codomain.dim), dtype=xs.dtype),
                               xs.reshape(b, self.metric.size - 1, self.codomain.dim)], axis=1)
        i, j = np.triu_indices(self.metric.size, 1)
        q = (vals[:, i] - vals[:, j]) / self.metric.dist[i, j][None, :, None]
        return self.codomain.norm_batch(q.reshape(-1, self.codomain.dim)).reshape(b, -1).max(axis=1)


def lip_orthogonal(metric, F, G, space, ladder=None, tol=DEFAULT_TOL):
    """F orthogonal to G in Lip_0: functionals on difference quotients."""
    f = _check_based(F, space)
    g = _check_based(G, space)
    qf, qg = _quotients(metric, f), _quotients(metric, g)
    nf = float(np.max(space.norm_batch(qf)))
    if nf == 0.0:
        raise DomainError("F = 0")
    ladder = eta_ladder() if ladder is None else np.sort(np.asarray(ladder))[::-1]
    ng = max(float(np.max(space.norm_batch(qg))), 1e-300)
    return _face_values(space, qf, qg, nf, ladder, tol, ng, space.field)


def lip_orthogonal_definition(metric, F, G, space, tol=DEFAULT_TOL):
    lip = LipschitzSpace(metric, space)
    f = _check_based(F, space)
    g = _check_based(G, space)
    return bj_orthogonal(lip, lip.embed(f), lip.embed(g), tol)
