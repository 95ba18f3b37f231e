"""Abstract numerical ranges V(Z, u, z), numerical radii, vertices and spears.

Three independent routes compute the range of a unit vector u:

* ``range_scan``: alpha is in the range exactly when u is BJ-orthogonal to
  z - alpha*u, so the range is traced by bisection along rays, each step a
  definition-level orthogonality test;
* ``range_extreme``: the hull of phi(z) over dual-ball extreme points with
  phi(u) = 1;
* ``range_delta``: hulls of psi(z)*conj(psi(u)) over a norming sample with
  |psi(u)| > 1 - delta, for a decreasing ladder of delta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, DiagnosticError, DomainError
from .orthogonality import DEFAULT_TOL, bj_margins, bj_orthogonal
from .scalar_geometry import conv_hull, diameter, max_modulus, polygon_contains, unit_circle
from .spaces import DEFAULT_CIRCLE_GRID, VuSpace, is_smooth_point
from .verdicts import OrthoVerdict

DEFAULT_RAYS = 96


def default_ladder(kmin=3, kmax=20):
    return 2.0 ** -np.arange(kmin, kmax + 1)


@dataclass
class RangeEstimate:
    """Inner and outer convex polygons bracketing a numerical range."""

    inner: np.ndarray
    outer: np.ndarray
    method: str
    field: str
    resolution: float = 0.0
    params: dict = field(default_factory=dict)

    @property
    def radius(self):
        return max_modulus(self.outer)

    @property
    def inner_radius(self):
        return max_modulus(self.inner)

    def contains_zero(self, which="outer", tol=1e-9):
        poly = self.outer if which == "outer" else self.inner
        return polygon_contains(poly, [0.0], tol)

    def to_json(self):
        def poly(p):
            return [[float(v.real), float(v.imag)] for v in p]
        return {"method": self.method, "field": self.field,
                "inner": poly(self.inner), "outer": poly(self.outer),
                "resolution": self.resolution, "params": self.params}


def _unit_check(space, u):
    u = space.vec(u)
    if abs(space.norm(u) - 1.0) > 1e-9:
        raise DomainError("numerical ranges are taken at unit vectors")
    return u


def _trivial(space, value, method):
    pt = np.array([complex(value)])
    return RangeEstimate(pt, pt.copy(), method, space.field)


def _ray_exit(c, e, radius):
    """Largest r >= 0 with |c + r e| <= radius (e unimodular)."""
    b = (np.conj(c) * e).real
    disc = b * b - abs(c) ** 2 + radius * radius
    return np.maximum(0.0, -b + np.sqrt(np.maximum(disc, 0.0)))


def range_scan(space, u, z, grid=DEFAULT_RAYS, tol=DEFAULT_TOL, rel_res=1e-6):
    """Trace V(Z, u, z) through orthogonality tests along rays.

    The rays start at a point of the range obtained from a support
    functional at u and point in ``grid`` equally spaced directions (two
    in the real case), plus the directions towards the other support
    values so that degenerate (segment-shaped) ranges are found. The
    inner polygon joins points passing the test at ``tol``, the outer one
    points passing at ``2*tol``; everything lives in |alpha| <= ||z||.
    """
    u = _unit_check(space, u)
    z = space.vec(z)
    nz = space.norm(z)
    if nz == 0.0:
        return _trivial(space, 0.0, "scan")
    seeds = np.zeros(0, complex)
    try:
        face = space.support(u).functionals
        if len(face) > 64:
            face = face[np.linspace(0, len(face) - 1, 64).astype(int)]
        seeds = np.asarray(face @ z, dtype=complex)
    except CapabilityError:
        pass
    center = complex(seeds.mean()) if len(seeds) else 0j
    if space.complex:
        dirs = list(unit_circle(grid))
        for s in seeds:
            d = s - center
            if abs(d) > 1e-9 * nz:
                dirs.extend([d / abs(d), -d / abs(d)])
        dirs = np.array(dirs)
    else:
        center = complex(center.real)
        dirs = np.array([1.0 + 0j, -1.0 + 0j])
    big = nz * (1.0 + 1e-9) + 1e-12
    rmax = _ray_exit(center, dirs, big)
    res = rel_res * (1.0 + nz)

    def passes(r, thr):
        alpha = center + r * dirs
        w = z[None, :] - alpha[:, None] * u[None, :]
        if not space.complex:
            w = w.real
        m, _ = bj_margins(space, np.repeat(u[None, :], len(alpha), axis=0), w)
        return m >= -thr

    def bisect(lo, hi, thr):
        lo, hi = lo.copy(), hi.copy()
        ok = passes(hi, thr)
        lo = np.where(ok, hi, lo)
        while np.any(hi - lo > res):
            mid = 0.5 * (lo + hi)
            ok = passes(mid, thr)
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        return lo

    r_in = bisect(np.zeros(len(dirs)), rmax, tol)
    r_out = bisect(r_in, rmax, 2.0 * tol)
    field_ = space.field
    inner = conv_hull(center + r_in * dirs, field_)
    outer = conv_hull(center + r_out * dirs, field_)
    spacing = res
    if space.complex and len(outer) > 1:
        ring = center + r_out[:grid] * dirs[:grid]
        spacing = float(np.max(np.abs(ring - np.roll(ring, 1)))) + res
    center_ok = bool(passes(np.zeros(1), tol)[0]) if len(dirs) else True
    return RangeEstimate(inner, outer, "scan", field_, spacing,
                         {"rays": int(len(dirs)), "tol": tol, "center": center,
                          "center_certified": center_ok})


def range_extreme(space, u, z, grid=DEFAULT_CIRCLE_GRID):
    """Hull of phi(z) over extreme points of the dual ball with phi(u) = 1.

    Exact for real polytope norms. In the complex case the extreme set is
    a circle-grid discretization; each candidate is rotated so that phi(u)
    is real and kept when |phi(u)| is within the grid slack of 1.
    """
    u = _unit_check(space, u)
    z = space.vec(z)
    ext = space.dual_extremes(grid)
    vu = ext @ u
    if space.complex:
        slack = 1.0 - np.cos(np.pi / grid) + 1e-9
        sel = np.abs(vu) >= 1.0 - slack * space.dim
        rot = np.conj(vu[sel] / np.abs(vu[sel]))
        vals = rot * (ext[sel] @ z)
        resolution = float(np.pi / grid * np.sum(np.abs(z)))
    else:
        sel = np.abs(vu - 1.0) <= 1e-9
        vals = ext[sel] @ z
        resolution = 0.0
    if not np.any(sel):
        raise DiagnosticError("no extreme functional attains at u")
    hull = conv_hull(vals.astype(complex), space.field)
    return RangeEstimate(hull, hull.copy(), "extreme", space.field, resolution,
                         {"count": int(np.sum(sel))})


def extreme_sampler(space, grid=DEFAULT_CIRCLE_GRID):
    return space.dual_extremes(grid)


def near_support_sampler(space, u, ladder=None, per_rung=24, seed=0):
    """Support functionals at points near u, at distances matching a ladder.

    For each delta a batch of points u + delta*e (e random) is mapped to a
    support functional; together with the exact face at u these sample the
    dual sphere densely where |psi(u)| is close to 1.
    """
    rng = np.random.default_rng(seed)
    u = space.vec(u)
    ladder = default_ladder() if ladder is None else np.asarray(ladder)
    rows = list(space.support(u).functionals)
    for d in ladder:
        for _ in range(per_rung):
            e = rng.standard_normal(space.dim)
            if space.complex:
                e = e + 1j * rng.standard_normal(space.dim)
            e = e / np.linalg.norm(e)
            rows.append(space.support(u + d * e).functionals[0])
    return np.array(rows)


def range_delta(space, u, z, sampler=None, ladder=None, tol=1e-9):
    """Ladder of hulls of psi(z)*conj(psi(u)) with |psi(u)| > 1 - delta.

    ``sampler`` is an array of dual-sphere functionals (one-norming for the
    space; the caller vouches for this). Default: extreme points when the
    space has a finite extreme set, otherwise the near-support sampler.
    """
    u = _unit_check(space, u)
    z = space.vec(z)
    deltas = default_ladder() if ladder is None else np.asarray(ladder, dtype=float)
    if np.any(np.diff(deltas) >= 0):
        raise DomainError("delta ladder must strictly decrease")
    if sampler is None:
        try:
            sampler = space.dual_extremes()
        except CapabilityError:
            sampler = near_support_sampler(space, u, deltas)
    lam = np.asarray(sampler)
    pu = lam @ u
    vals = (lam @ z) * np.conj(pu)
    rungs = []
    for d in deltas:
        sel = np.abs(pu) > 1.0 - d
        if not np.any(sel):
            raise DiagnosticError(f"empty rung at delta={d:g}")
        rungs.append(conv_hull(vals[sel].astype(complex), space.field))
    nested = [bool(polygon_contains(rungs[k - 1], rungs[k], tol)) for k in range(1, len(rungs))]
    est = RangeEstimate(rungs[-1], rungs[0], "delta_ladder", space.field,
                        float(diameter(rungs[0]) - diameter(rungs[-1])),
                        {"deltas": deltas.tolist(), "nested": all(nested),
                         "rung_sizes": [len(r) for r in rungs],
                         "rung_radii": [max_modulus(r) for r in rungs]})
    est.rungs = rungs
    return est


def face_radius_batch(face, zs):
    """max over face functionals of |phi(z)|, row by row."""
    return np.abs(np.asarray(zs) @ np.asarray(face).T).max(axis=1)


@dataclass
class RadiusEstimate:
    upper: float
    lower: float
    method: str

    def __float__(self):
        return float(self.upper)


def numerical_radius_v(space, u, z, method="auto", **kw):
    """v(Z, u, z) = sup |V(Z, u, z)|, with an upper and a lower estimate."""
    u = _unit_check(space, u)
    z = space.vec(z)
    if method == "auto":
        try:
            smp = space.support(u)
            if smp.exhaustive and not smp.gridded:
                v = float(face_radius_batch(smp.functionals, z[None, :])[0])
                return RadiusEstimate(v, v, "face")
        except CapabilityError:
            pass
        method = "scan"
    est = {"scan": range_scan, "extreme": range_extreme, "delta": range_delta}[method](
        space, u, z, **kw)
    return RadiusEstimate(est.radius, est.inner_radius, method)


def vu_space(space, u):
    return VuSpace(space, u)


def vu_seminorm(space, u, z):
    return VuSpace(space, u).norm(z)


def _probes(space, budget, seed):
    rng = np.random.default_rng(seed)
    probes = list(np.eye(space.dim, dtype=space.dtype))
    for _ in range(budget):
        e = rng.standard_normal(space.dim)
        if space.complex:
            e = e + 1j * rng.standard_normal(space.dim)
        probes.append(e)
    return probes


def is_vertex(space, u, probe_budget=64, tol=1e-9, seed=0):
    """Whether v(Z, u, .) is a norm.

    A kernel witness is searched among probes and, when the face at u is
    enumerated exactly, in the null space of the face functionals (a
    nonzero z killed by every face functional has v(z) = 0).
    """
    u = _unit_check(space, u)
    vu = VuSpace(space, u)
    for z in _probes(space, probe_budget, seed):
        z = vu.vec(z)
        if vu.norm(z) <= tol * space.norm(z):
            return OrthoVerdict(False, vu.norm(z) / space.norm(z), z, True,
                                {"route": "probe"})
    if vu.face_exhaustive:
        _, s, vh = np.linalg.svd(vu.generators)
        rank = int(np.sum(s > 1e-10 * max(1.0, s[0])))
        if rank < space.dim:
            z = np.conj(vh[-1]) if space.complex else vh[-1]
            z = z / space.norm(z)
            return OrthoVerdict(False, vu.norm(z), z, True, {"route": "null_space"})
        return OrthoVerdict(True, float(s[-1]), None, True, {"route": "rank"})
    return OrthoVerdict(True, 0.0, None, False, {"route": "probe"})


def _display_gap(space, u, z, ngrid=360):
    """max over unimodular theta of ||u + theta z|| - (1 + ||z||)."""
    th = unit_circle(ngrid) if space.complex else np.array([1.0, -1.0])
    pts = u[None, :] + th[:, None] * z[None, :]
    if not space.complex:
        pts = pts.real
    return float(np.max(space.norm_batch(pts)) - 1.0 - space.norm(z))


def is_spear_vector(space, u, probe_budget=64, tol=1e-7, seed=0, grid=DEFAULT_CIRCLE_GRID,
                    extra_probes=()):
    """Whether v(Z, u, z) = ||z|| for all z.

    Probes: basis vectors, random vectors and ball vertices when known.
    For spaces with a finite dual extreme set the answer is also decided
    exhaustively: u is a spear exactly when |phi(u)| = 1 for every dual
    extreme point phi (the face at u then generates the whole dual ball).
    """
    u = _unit_check(space, u)
    vu = VuSpace(space, u, grid)
    probes = _probes(space, probe_budget, seed)
    try:
        probes.extend(space.ball_vertices())
    except CapabilityError:
        pass
    probes.extend(extra_probes)
    worst, worst_gap, worst_disp = None, -np.inf, 0.0
    for z in probes:
        z = vu.vec(z)
        z = z / space.norm(z)
        gap = 1.0 - vu.norm(z)
        if gap > worst_gap:
            worst, worst_gap = z, gap
            worst_disp = _display_gap(space, u, z)
    sampled = worst_gap <= tol
    details = {"worst_gap": worst_gap, "display_gap": worst_disp, "probes": len(probes)}
    try:
        ext = space.dual_extremes(grid)
        exact = bool(np.all(np.abs(np.abs(ext @ u) - 1.0) <= 1e-9))
        details["extreme_check"] = exact
        return OrthoVerdict(exact and sampled, worst_gap, worst, True, details)
    except CapabilityError:
        return OrthoVerdict(sampled, worst_gap, worst, not sampled, details)


def vertex_smooth_check(space, u, z, tol=DEFAULT_TOL, probe_budget=16):
    """For a vertex u: if z is smooth for v_u then z is not v_u-orthogonal to u."""
    report = {"applicable": True, "violation": False}
    try:
        u = _unit_check(space, u)
        z = space.vec(z)
    except DomainError as exc:
        return {"applicable": False, "reason": str(exc), "violation": False}
    vert = is_vertex(space, u, probe_budget)
    if not vert.decision:
        return {"applicable": False, "reason": "u is not a vertex", "violation": False}
    vu = VuSpace(space, u)
    if vu.norm(z) == 0.0:
        return {"applicable": False, "reason": "z = 0", "violation": False}
    smooth = is_smooth_point(vu, z)
    orth = bj_orthogonal(vu, z, u, tol)
    report.update({"smooth": bool(smooth.decision), "face_diameter": smooth.margin,
                   "orthogonal": bool(orth.decision), "margin": orth.margin})
    report["violation"] = bool(smooth.decision and orth.decision)
    return report


def unit_range_gap(space, u, z, **kw):
    """1 - max |V((Z, v_u), z/v_u(z), u)|; zero when the range meets the circle."""
    vu = VuSpace(space, u)
    z = vu.vec(z)
    zn = z / vu.norm(z)
    est = range_scan(vu, zn, u, **kw)
    return abs(1.0 - est.radius)
