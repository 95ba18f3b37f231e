"""Planar convex geometry over the scalar field.

Scalars are handled as complex numbers throughout; a real scalar set is a
complex array with zero imaginary parts plus the ``field="real"`` tag, which
switches hulls to intervals and separating directions to signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DomainError

UNIT_TOL = 1e-12


def as_scalars(points, field="complex"):
    """Validate and convert a scalar set to a 1-D complex array."""
    if field not in ("real", "complex"):
        raise DomainError(f"unknown field {field!r}")
    arr = np.atleast_1d(np.asarray(points, dtype=complex)).ravel()
    if arr.size == 0:
        raise DomainError("scalar set is empty")
    if not np.all(np.isfinite(arr)):
        raise DomainError("scalar set contains non-finite values")
    if field == "real":
        scale = 1.0 + np.max(np.abs(arr))
        if np.max(np.abs(arr.imag)) > 1e-12 * scale:
            raise DomainError("real scalar set has non-zero imaginary parts")
        arr = arr.real.astype(complex)
    return arr


def _cross(o, a, b):
    return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)


def hull_indices(points, field="complex"):
    """Indices of the hull vertices, counter-clockwise (real: [min, max])."""
    pts = as_scalars(points, field)
    if field == "real":
        lo, hi = int(np.argmin(pts.real)), int(np.argmax(pts.real))
        return [lo] if pts[lo].real == pts[hi].real else [lo, hi]
    keep = _interior_filter(pts)
    order = keep[np.lexsort((pts[keep].imag, pts[keep].real))]
    uniq = [int(order[0])]
    for i in order[1:]:
        if pts[i] != pts[uniq[-1]]:
            uniq.append(int(i))
    if len(uniq) <= 2:
        return uniq
    scale = np.max(np.abs(pts[uniq] - pts[uniq[0]]))
    eps = 1e-14 * scale * scale
    xs, ys = pts.real.tolist(), pts.imag.tolist()

    def chain(seq):
        out = []
        for i in seq:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                if (xs[a] - xs[o]) * (ys[i] - ys[o]) - (ys[a] - ys[o]) * (xs[i] - xs[o]) > eps:
                    break
                out.pop()
            out.append(i)
        return out

    lower = chain(uniq)
    upper = chain(uniq[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:
        return [uniq[0], uniq[-1]]
    return hull


def _interior_filter(pts, ndir=16, min_size=48):
    """Indices of points not strictly inside the polygon of directional extremes.

    Points strictly inside a polygon spanned by input points are never hull
    vertices, so dropping them leaves the hull unchanged.
    """
    n = len(pts)
    if n < min_size:
        return np.arange(n)
    dirs = unit_circle(ndir)
    ext = np.argmax((np.conj(dirs)[:, None] * pts[None, :]).real, axis=1)
    poly = [int(ext[0])]
    for i in ext[1:]:
        if pts[i] != pts[poly[-1]] and pts[i] != pts[poly[0]]:
            poly.append(int(i))
    if len(poly) < 3:
        return np.arange(n)
    a = pts[poly]
    b = np.roll(a, -1)
    scale = np.max(np.abs(a - a[0]))
    cr = _cross(a[:, None], b[:, None], pts[None, :])
    inside = np.all(cr > 1e-9 * scale * scale, axis=0)
    return np.flatnonzero(~inside)


def conv_hull(points, field="complex"):
    """Minimal counter-clockwise vertex list of the convex hull.

    For the real field the result is the interval ``[min, max]`` (one point
    if the set is a singleton). Collinear complex sets give a segment.
    """
    pts = as_scalars(points, field)
    return pts[hull_indices(pts, field)]


def _segment_closest(a, b, q):
    d = b - a
    den = abs(d) ** 2
    if den == 0.0:
        return abs(q - a), a, 0.0
    t = ((q - a).real * d.real + (q - a).imag * d.imag) / den
    t = min(1.0, max(0.0, t))
    p = a + t * d
    return abs(q - p), p, t


def _closest(poly, q):
    """Closest point of a convex polygon to q, as (distance, local idx, weights)."""
    m = len(poly)
    if m == 1:
        return abs(q - poly[0]), [0], [1.0]
    if m >= 3:
        inside = all(_cross(poly[i], poly[(i + 1) % m], q) >= 0.0 for i in range(m))
        if inside:
            best = None
            for i in range(1, m - 1):
                w = _barycentric(poly[0], poly[i], poly[i + 1], q)
                if w is not None and (best is None or min(w) > min(best[1])):
                    best = ([0, i, i + 1], w)
            if best is not None:
                w = np.clip(best[1], 0.0, None)
                return 0.0, best[0], list(w / w.sum())
    best = None
    edges = m if m >= 3 else 1
    for i in range(edges):
        j = (i + 1) % m
        dist, _, t = _segment_closest(poly[i], poly[j], q)
        if best is None or dist < best[0]:
            best = (dist, [i, j], [1.0 - t, t])
    return best


def _barycentric(a, b, c, q):
    m = np.array([[a.real, b.real, c.real], [a.imag, b.imag, c.imag], [1.0, 1.0, 1.0]])
    if abs(np.linalg.det(m)) < 1e-300:
        return None
    return np.linalg.solve(m, np.array([q.real, q.imag, 1.0]))


def hull_distance(points, q=0.0, field="complex"):
    """Euclidean distance from the scalar q to conv(points)."""
    pts = as_scalars(points, field)
    idx = hull_indices(pts, field)
    return float(_closest(pts[idx], complex(q))[0])


@dataclass
class HullCertificate:
    """Witness for 0 being inside or outside a planar convex hull.

    ``inside``: ``points`` (at most three, two for the real field) with
    convex ``weights``. ``outside``: unit ``direction`` mu and ``gap > 0``
    with ``Re(mu * a) < -gap`` for every point a.
    """

    kind: str
    distance: float
    points: np.ndarray = dc_field(default_factory=lambda: np.zeros(0, complex))
    indices: list = dc_field(default_factory=list)
    weights: np.ndarray = dc_field(default_factory=lambda: np.zeros(0))
    direction: complex | None = None
    gap: float | None = None

    @property
    def inside(self):
        return self.kind == "inside"

    def combination(self):
        return complex(np.dot(self.weights, self.points))

    def verify(self, points, tol_abs=None):
        """Check the certificate against the full point set."""
        pts = np.asarray(points, dtype=complex).ravel()
        scale = 1.0 + float(np.max(np.abs(pts)))
        if self.inside:
            w = np.asarray(self.weights)
            ok = bool(np.all(w >= 0.0)) and abs(w.sum() - 1.0) <= 1e-12
            bound = 1e-9 * scale if tol_abs is None else tol_abs
            return ok and abs(self.combination()) <= bound
        vals = (self.direction * pts).real
        return abs(abs(self.direction) - 1.0) <= UNIT_TOL and self.gap > 0 and bool(
            np.all(vals < -self.gap)
        )

    def to_json(self):
        out = {"kind": self.kind, "distance": self.distance}
        if self.inside:
            out["points"] = [[p.real, p.imag] for p in self.points]
            out["weights"] = [float(w) for w in self.weights]
        else:
            out["direction"] = [self.direction.real, self.direction.imag]
            out["gap"] = self.gap
        return out


def zero_in_conv(points, tol=1e-7, field="complex"):
    """Decide whether 0 lies within distance ``tol`` of conv(points).

    Returns a :class:`HullCertificate`; distance exactly ``tol`` counts as
    inside.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    pts = as_scalars(points, field)
    idx = hull_indices(pts, field)
    poly = pts[idx]
    if field == "real" and len(poly) == 2 and poly[0].real <= 0.0 <= poly[1].real:
        a, b = poly[0].real, poly[1].real
        w = np.array([b / (b - a), -a / (b - a)]) if b > a else np.array([1.0, 0.0])
        return HullCertificate("inside", 0.0, poly.copy(), list(idx), w)
    dist, loc, w = _closest(poly, 0j)
    keep = [k for k, wk in zip(loc, w) if wk > 0.0] or [loc[0]]
    wk = np.array([wk for wk in w if wk > 0.0] or [1.0])
    wk = wk / wk.sum()
    if dist <= tol:
        return HullCertificate(
            "inside", float(dist), poly[keep], [idx[k] for k in keep], wk
        )
    nearest = complex(np.dot(wk, poly[keep]))
    mu = -np.conj(nearest) / abs(nearest)
    if field == "real":
        mu = complex(np.sign(mu.real))
    sep = float(np.min(-(mu * pts).real))
    gap = sep - 1e-12 * (1.0 + float(np.max(np.abs(pts))))
    if gap <= 0.0:
        gap = 0.5 * sep
    return HullCertificate("outside", float(dist), direction=complex(mu), gap=gap)


def directional_support(points, mu, field="complex"):
    """Return ``(exists, witness)`` for some a with Re(mu * a) >= 0."""
    pts = as_scalars(points, field)
    mu = complex(mu)
    if abs(abs(mu) - 1.0) > UNIT_TOL:
        raise DomainError("direction must be unimodular")
    vals = (mu * pts).real
    k = int(np.argmax(vals))
    if vals[k] >= 0.0:
        return True, complex(pts[k])
    return False, None


def unit_circle(n):
    """n equally spaced points of the unit circle, starting at 1."""
    return np.exp(2j * np.pi * np.arange(n) / n)


def hull_hausdorff(p, q):
    """Symmetric Hausdorff distance between two convex polygons.

    For convex sets the distance to the other set is a convex function, so
    its maximum over a polygon is reached at a vertex.
    """
    pa = conv_hull(p)
    qa = conv_hull(q)
    d1 = max(_closest(qa, v)[0] for v in pa)
    d2 = max(_closest(pa, v)[0] for v in qa)
    return float(max(d1, d2))


def polygon_contains(poly, points, tol=1e-9):
    """True when every point lies within ``tol`` of conv(poly)."""
    hull = conv_hull(poly)
    return all(_closest(hull, complex(v))[0] <= tol for v in np.atleast_1d(points))


def max_modulus(poly):
    return float(np.max(np.abs(np.asarray(poly, dtype=complex))))


def diameter(poly):
    pts = np.asarray(poly, dtype=complex).ravel()
    if pts.size < 2:
        return 0.0
    return float(np.max(np.abs(pts[:, None] - pts[None, :])))
