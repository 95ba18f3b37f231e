"""Birkhoff-James and directional orthogonality by direct minimization.

The map lam -> ||x + lam y|| is convex, so any local search that respects
convexity is global. Real scalars use golden-section search; complex
scalars use a nested search over (Re lam, Im lam) in which both levels are
vectorized bracket-shrinking grids (partial minimization of a convex
function is convex, so the outer level is again a convex 1-D problem),
followed by a Nelder-Mead polish.
Any minimizer lies in |lam| <= 2||x||/||y||, since beyond that radius
||x + lam y|| > ||x||.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize

from .errors import CapabilityError, DomainError
from .scalar_geometry import unit_circle, zero_in_conv
from .verdicts import OrthoVerdict

DEFAULT_TOL = 1e-7
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = 1.0 - INV_PHI


def golden_section(f, a, b, xtol=1e-10, maxiter=400):
    """Minimize a unimodal f on [a, b]; returns (x, f(x))."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > xtol and it < maxiter:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        it += 1
    return (c, fc) if fc <= fd else (d, fd)


def shrink_grid_min(fvec, lo, width, xtol, npts=17):
    """Minimize many convex 1-D functions at once.

    ``fvec`` maps an (M, npts) array of abscissae to values; ``lo`` and
    ``width`` give each bracket. For a convex function the minimizer lies
    between the neighbours of the discrete argmin, so each round shrinks
    the bracket by (npts - 1) / 2.
    """
    lo = np.array(lo, dtype=float)
    width = np.broadcast_to(np.asarray(width, dtype=float), lo.shape).copy()
    xtol = np.broadcast_to(np.asarray(xtol, dtype=float), lo.shape)
    grid = np.linspace(0.0, 1.0, npts)
    rows = np.arange(lo.shape[0])
    best_t = lo.copy()
    best_v = np.full(lo.shape, np.inf)
    while True:
        t = lo[:, None] + width[:, None] * grid[None, :]
        v = fvec(t)
        k = np.argmin(v, axis=1)
        vk = v[rows, k]
        better = vk < best_v
        best_v = np.where(better, vk, best_v)
        best_t = np.where(better, t[rows, k], best_t)
        if np.all(width <= xtol):
            return best_t, best_v
        k = np.clip(k, 1, npts - 2)
        lo = t[rows, k - 1]
        width = 2.0 * width / (npts - 1)


def _line_values(space, x, y):
    def f(lam):
        return float(space.norm_batch((x + lam * y)[None, :])[0])
    return f


def minimize_along(space, x, y, radius, direction=1.0):
    """min over real t in [-radius, radius] of ||x + t*direction*y||."""
    dy = direction * y
    f = _line_values(space, x, dy)
    xtol = 1e-10 * max(1.0, radius)
    t, v = golden_section(f, -radius, radius, xtol)
    f0 = f(0.0)
    if f0 <= v:
        return 0.0, f0
    return t, v


def minimize_along_batch(space, xs, ys, radii):
    """Vectorized real-line minimization for many (x, y) pairs."""
    xs, ys = np.asarray(xs), np.asarray(ys)
    radii = np.asarray(radii, dtype=float)
    n = xs.shape[1]

    def fvec(t):
        pts = xs[:, None, :] + t[:, :, None] * ys[:, None, :]
        return space.norm_batch(pts.reshape(-1, n)).reshape(t.shape)

    t, v = shrink_grid_min(fvec, -radii, 2.0 * radii, 1e-10 * np.maximum(1.0, radii))
    f0 = space.norm_batch(xs)
    keep0 = f0 <= v
    return np.where(keep0, 0.0, t), np.where(keep0, f0, v)


def golden_batch(fvec, a, b, xtol):
    """Golden-section search on many unimodal functions at once.

    ``fvec`` maps an array of abscissae (one per row) to values. Every row
    runs the same number of steps, enough for its bracket to fall below its
    ``xtol``. Returns the best point seen in each row and its value.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    xtol = np.broadcast_to(np.asarray(xtol, dtype=float), a.shape)
    span = np.max((b - a) / xtol)
    steps = int(np.ceil(np.log(max(span, 1.0)) / -np.log(INV_PHI))) + 1
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fvec(c), fvec(d)
    for _ in range(steps):
        left = fc <= fd
        a2 = np.where(left, a, c)
        b2 = np.where(left, d, b)
        new = np.where(left, b2 - INV_PHI * (b2 - a2), a2 + INV_PHI * (b2 - a2))
        fnew = fvec(new)
        c, d, fc, fd = (np.where(left, new, d), np.where(left, c, new),
                        np.where(left, fnew, fd), np.where(left, fc, fnew))
        a, b = a2, b2
    pick = fc <= fd
    return np.where(pick, c, d), np.where(pick, fc, fd)


def minimize_plane_batch(space, xs, ys, radii):
    """min over complex lam in |Re|, |Im| <= radius, for many pairs at once.

    Nested golden sections: the inner search over Im(lam) gives a convex
    function of Re(lam) (a partial minimum of a convex function), which the
    outer search minimizes.
    """
    xs, ys = np.asarray(xs), np.asarray(ys)
    radii = np.asarray(radii, dtype=float)
    xtol = 1e-10 * np.maximum(1.0, radii)

    def inner(a):
        def fvec(b):
            return space.norm_batch(xs + (a + 1j * b)[:, None] * ys)
        return golden_batch(fvec, -radii, radii, xtol)

    a_best, _ = golden_batch(lambda a: inner(a)[1], -radii, radii, xtol)
    b_best, val = inner(a_best)
    lam = a_best + 1j * b_best
    f0 = space.norm_batch(xs)
    keep0 = f0 <= val
    return np.where(keep0, 0j, lam), np.where(keep0, f0, val)


def minimize_plane(space, x, y, radius):
    """min over complex lam in the square |Re|, |Im| <= radius."""
    lam_arr, val_arr = minimize_plane_batch(space, x[None, :], y[None, :], [radius])
    lam, val = complex(lam_arr[0]), float(val_arr[0])

    def h(p):
        return float(space.norm_batch((x + complex(p[0], p[1]) * y)[None, :])[0])

    step = max(1e-6 * radius, 1e-12)
    simplex = np.array([[lam.real, lam.imag], [lam.real + step, lam.imag],
                        [lam.real, lam.imag + step]])
    res = minimize(h, [lam.real, lam.imag], method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": 1e-13,
                            "fatol": 1e-15, "maxfev": 200})
    if res.fun < val:
        lam, val = complex(res.x[0], res.x[1]), float(res.fun)
    return lam, val


def bj_margins(space, xs, ys):
    """Definition-level margins inf ||x + lam y|| - ||x|| for many pairs.

    Pairs with x = 0 or y = 0 get margin 0. Returns (margins, lambdas).
    """
    xs = np.asarray(xs, dtype=space.dtype)
    ys = np.asarray(ys, dtype=space.dtype)
    nx = space.norm_batch(xs)
    ny = space.norm_batch(ys)
    live = (nx > 0) & (ny > 0)
    margins = np.zeros(len(xs))
    lams = np.zeros(len(xs), dtype=space.dtype)
    if live.any():
        radii = 2.0 * nx[live] / ny[live]
        if space.complex:
            lam, val = minimize_plane_batch(space, xs[live], ys[live], radii)
        else:
            lam, val = minimize_along_batch(space, xs[live], ys[live], radii)
        margins[live] = val - nx[live]
        lams[live] = lam
    return margins, lams


def _prepare(space, x, y):
    x = space.vec(x)
    y = space.vec(y)
    return x, y, space.norm(x), space.norm(y)


def bj_orthogonal(space, x, y, tol=DEFAULT_TOL):
    """Decide x perp_B y: inf over scalars lam of ||x + lam y|| >= ||x|| - tol."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    x, y, nx, ny = _prepare(space, x, y)
    if nx == 0.0 or ny == 0.0:
        return OrthoVerdict(True, 0.0, 0.0, True, {"trivial": True})
    radius = 2.0 * nx / ny
    if space.complex:
        lam, val = minimize_plane(space, x, y, radius)
    else:
        lam, val = minimize_along(space, x, y, radius)
    margin = val - nx
    return OrthoVerdict(margin >= -tol, margin, lam, True,
                        {"norm_x": nx, "min_value": val})


def directional_orthogonal(space, x, y, gamma, tol=DEFAULT_TOL):
    """Decide x perp_gamma y: ||x + t gamma y|| >= ||x|| - tol for real t."""
    gamma = complex(gamma)
    if abs(abs(gamma) - 1.0) > 1e-12:
        raise DomainError("gamma must be unimodular")
    if not space.complex and abs(gamma.imag) > 1e-12:
        raise DomainError("real spaces only admit gamma = +1 or -1")
    x, y, nx, ny = _prepare(space, x, y)
    if nx == 0.0 or ny == 0.0:
        return OrthoVerdict(True, 0.0, 0.0, True, {"trivial": True})
    g = gamma if space.complex else gamma.real
    t, val = minimize_along(space, x, y, 2.0 * nx / ny, g)
    margin = val - nx
    return OrthoVerdict(margin >= -tol, margin, t, True,
                        {"norm_x": nx, "min_value": val, "gamma": gamma})


def _face_for_witness(space, x, y, grid):
    """Face functionals at x, plus whether they describe the whole face."""
    try:
        smp = space.support(x, grid=grid)
        if smp.exhaustive:
            return smp.functionals, True
        base = list(smp.functionals)
    except CapabilityError:
        base = []
    # heuristic: support functionals slightly off x in the directions theta*y
    nx, ny = space.norm(x), space.norm(y)
    s = 1e-7 * nx / ny
    thetas = unit_circle(16) if space.complex else np.array([1.0, -1.0])
    rows = base
    for th in thetas:
        try:
            rows.extend(space.support(x + s * th * y, grid=grid).functionals[:1])
        except CapabilityError:
            return np.zeros((0, space.dim)), False
    return np.array(rows), False


def james_witness(space, x, y, tol=DEFAULT_TOL, grid=64, full=False):
    """A norm-one phi with phi(x) = ||x|| and |phi(y)| <= tol, or None.

    The face of the dual ball at x is mapped through y; a Caratheodory
    certificate for 0 in the hull of the image supplies the weights that
    combine face functionals into the witness. With ``full=True`` an
    :class:`OrthoVerdict` is returned whose decision is None when a
    heuristic search fails ("unknown").
    """
    x, y, nx, ny = _prepare(space, x, y)
    if nx == 0.0:
        raise DomainError("james_witness needs x != 0")
    face, exhaustive = _face_for_witness(space, x, y, grid) if ny > 0 else (
        space.support(x, grid=grid).functionals, True)
    if len(face) == 0:
        out = OrthoVerdict(None, float("nan"), None, False, {"reason": "no face sample"})
        return out if full else None
    vals = face @ y
    cert = zero_in_conv(vals, tol, space.field)
    phi = None
    if cert.inside:
        phi = np.tensordot(cert.weights, face[cert.indices], axes=1)
        if not exhaustive and abs(phi @ x - nx) > max(tol, 1e-6 * nx):
            phi = None
    if not full:
        return phi
    decision = phi is not None if (exhaustive or phi is not None) else None
    return OrthoVerdict(decision, cert.distance, phi, exhaustive,
                        {"certificate": cert, "face_size": len(face)})


def directional_witness(space, x, y, gamma, tol=DEFAULT_TOL, grid=64, full=False):
    """A norm-one x* with x*(x) = gamma ||x|| and Re x*(y) = 0, or None."""
    gamma = complex(gamma)
    if abs(abs(gamma) - 1.0) > 1e-12:
        raise DomainError("gamma must be unimodular")
    x, y, nx, ny = _prepare(space, x, y)
    if nx == 0.0:
        raise DomainError("directional_witness needs x != 0")
    g = gamma if space.complex else gamma.real
    face, exhaustive = _face_for_witness(space, x, g * y, grid)
    if len(face) == 0:
        out = OrthoVerdict(None, float("nan"), None, False, {"reason": "no face sample"})
        return out if full else None
    vals = (face @ (g * y)).real
    cert = zero_in_conv(vals, tol, "real")
    phi = None
    if cert.inside:
        phi = g * np.tensordot(cert.weights, face[cert.indices], axes=1)
    if not full:
        return phi
    decision = phi is not None if (exhaustive or phi is not None) else None
    return OrthoVerdict(decision, cert.distance, phi, exhaustive,
                        {"certificate": cert, "face_size": len(face)})


def best_approximation(space, x, y):
    """Best approximation of x from span{y}: (lam, x - lam*y)."""
    x, y, nx, ny = _prepare(space, x, y)
    if ny == 0.0:
        raise DomainError("best approximation from span{0} is undefined")
    radius = 2.0 * max(nx, 1e-300) / ny
    if space.complex:
        mu, _ = minimize_plane(space, x, y, radius)
    else:
        mu, _ = minimize_along(space, x, y, radius)
    if getattr(space, "smooth_everywhere", False):
        mu = _refine_smooth(space, x, y, mu, radius)
    lam = -mu
    return lam, x - lam * y


def _slope(space, x, y, t):
    w = x + t * y
    if space.norm(w) == 0.0:
        return 0j
    return complex(space.support(w).functionals[0] @ y)


def _bisect_root(g, t0, h, iters=80):
    """Root of an increasing function near t0 (sign-change bracket)."""
    lo, hi = t0 - h, t0 + h
    for _ in range(40):
        if g(lo) <= 0.0:
            break
        lo -= 2.0 * (t0 - lo)
    for _ in range(40):
        if g(hi) >= 0.0:
            break
        hi += 2.0 * (hi - t0)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if g(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _refine_smooth(space, x, y, mu, radius, rounds=6):
    """Zero of the derivative of ||x + t y|| (smooth norms), from a value-based start.

    Value comparisons locate a minimizer only to about sqrt(eps); the slope
    Re phi_{x+ty}(y), with phi the support functional, is accurate to eps.
    """
    h = 1e-7 * radius + 1e-300
    best = space.norm(x + mu * y)
    if not space.complex:
        t = _bisect_root(lambda s: _slope(space, x, y, s).real, float(np.real(mu)), h)
        cand = t
    else:
        a, b = float(np.real(mu)), float(np.imag(mu))
        for _ in range(rounds):
            a = _bisect_root(lambda s: _slope(space, x, y, s + 1j * b).real, a, h)
            b = _bisect_root(lambda s: -_slope(space, x, y, a + 1j * s).imag, b, h)
        cand = a + 1j * b
    return cand if space.norm(x + cand * y) <= best + 8.0 * np.finfo(float).eps * max(best, 1.0) else mu
