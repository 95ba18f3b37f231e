"""Finite-dimensional normed and seminormed spaces.

Every space exposes ``norm``/``norm_batch`` and, where the geometry allows
it, the dual norm, the face of the dual ball at a point (support
functionals) and the extreme points of the dual ball. Functionals act by
the bilinear pairing ``phi(x) = sum(phi_i * x_i)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapabilityError, DomainError
from .scalar_geometry import unit_circle
from .verdicts import OrthoVerdict

DEFAULT_CIRCLE_GRID = 64
SMOOTH_TOL = 1e-6
ZERO_REL = 1e-9


@dataclass
class SupportSample:
    """Functionals phi with dual norm 1 and phi(u) = ||u||.

    ``exhaustive`` means the convex hull of ``functionals`` is the whole
    face (up to the circle grid in the complex case when ``gridded``).
    """

    functionals: np.ndarray
    exhaustive: bool
    gridded: bool = False

    def __len__(self):
        return len(self.functionals)

    @property
    def first(self):
        return self.functionals[0]


def _parse_p(p):
    if isinstance(p, str):
        if p.lower() in ("inf", "infinity"):
            return np.inf
        p = float(p)
    p = float(p)
    if not p >= 1.0:
        raise DomainError("p must lie in [1, inf]")
    return p


def conj_exponent(p):
    if p == 1.0:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _pnorm_rows(a, p):
    a = np.abs(a)
    if np.isinf(p):
        return a.max(axis=-1)
    if p == 1.0:
        return a.sum(axis=-1)
    if p == 2.0:
        return np.sqrt((a * a).sum(axis=-1))
    m = a.max(axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    return m[..., 0] * ((a / safe) ** p).sum(axis=-1) ** (1.0 / p)


def _phase(z):
    """z/|z| with 1 at zero."""
    z = np.asarray(z, dtype=complex)
    out = np.ones_like(z)
    nz = np.abs(z) > 0
    out[nz] = z[nz] / np.abs(z[nz])
    return out


class NormedSpace:
    """Common interface; subclasses fill in the geometry they support."""

    kind = "abstract"
    is_seminorm = False

    def __init__(self, field, dim):
        if field not in ("real", "complex"):
            raise DomainError(f"unknown field {field!r}")
        if int(dim) < 1:
            raise DomainError("dimension must be positive")
        self.field = field
        self.dim = int(dim)

    @property
    def complex(self):
        return self.field == "complex"

    @property
    def dtype(self):
        return complex if self.complex else float

    def vec(self, x):
        """Coerce to a coordinate array of the right length and type."""
        a = np.asarray(x)
        if a.ndim != 1 or a.shape[0] != self.dim:
            raise DomainError(f"expected a vector of length {self.dim}, got shape {a.shape}")
        a = a.astype(complex)
        if not np.all(np.isfinite(a)):
            raise DomainError("vector has non-finite entries")
        if not self.complex:
            if np.any(np.abs(a.imag) > 1e-12 * (1.0 + np.abs(a.real).max())):
                raise DomainError("real space given a complex vector")
            return a.real.copy()
        return a

    def scalars(self):
        return complex if self.complex else float

    def norm(self, x):
        return float(self.norm_batch(self.vec(x)[None, :])[0])

    def norm_batch(self, xs):
        return np.array([self.norm(x) for x in xs])

    def dual_norm(self, phi):
        raise CapabilityError(f"dual norm not available for {self.kind}")

    def support(self, x, grid=DEFAULT_CIRCLE_GRID, budget=None):
        raise CapabilityError(f"support functionals not available for {self.kind}")

    def dual_extremes(self, grid=DEFAULT_CIRCLE_GRID):
        raise CapabilityError(f"dual extreme points not enumerable for {self.kind}")

    def strongly_exposed(self, x):
        raise CapabilityError(f"strong exposure test not available for {self.kind}")

    def ball_vertices(self):
        raise CapabilityError(f"unit-ball vertices not enumerable for {self.kind}")

    @property
    def smooth_everywhere(self):
        return False

    def to_json(self):
        raise CapabilityError(f"{self.kind} has no JSON form")

    def __repr__(self):
        return f"<{type(self).__name__} {self.field} dim={self.dim}>"


class PNormSpace(NormedSpace):
    """l_p^n, real or complex, 1 <= p <= inf."""

    kind = "p_norm"

    def __init__(self, field, dim, p):
        super().__init__(field, dim)
        self.p = _parse_p(p)
        self.q = conj_exponent(self.p)

    @property
    def smooth_everywhere(self):
        return 1.0 < self.p < np.inf

    @property
    def hilbert(self):
        return self.p == 2.0

    def norm_batch(self, xs):
        return _pnorm_rows(np.asarray(xs), self.p)

    def dual_norm(self, phi):
        return float(_pnorm_rows(self.vec(phi)[None, :], self.q)[0])

    def support(self, x, grid=DEFAULT_CIRCLE_GRID, budget=None):
        x = self.vec(x)
        nx = self.norm(x)
        if nx == 0.0:
            raise DomainError("support functionals of the zero vector are undefined")
        ph = np.conj(_phase(x)) if self.complex else np.sign(x)
        ax = np.abs(x) / nx
        if 1.0 < self.p < np.inf:
            phi = ph * ax ** (self.p - 1.0)
            return SupportSample(phi.astype(self.dtype)[None, :], True)
        if np.isinf(self.p):
            act = np.flatnonzero(ax >= 1.0 - ZERO_REL)
            rows = np.zeros((len(act), self.dim), dtype=self.dtype)
            for r, i in enumerate(act):
                rows[r, i] = ph[i] if self.complex else np.sign(x[i])
            return SupportSample(rows, True)
        # p == 1: free coordinates where x vanishes
        free = np.flatnonzero(ax <= ZERO_REL)
        base = np.where(ax > ZERO_REL, ph, 0.0).astype(self.dtype)
        if not len(free):
            return SupportSample(base[None, :], True)
        vals = unit_circle(grid) if self.complex else np.array([1.0, -1.0])
        rows = []
        for combo in itertools.product(vals, repeat=len(free)):
            r = base.copy()
            r[free] = combo
            rows.append(r)
        return SupportSample(np.array(rows), True, gridded=self.complex)

    def dual_extremes(self, grid=DEFAULT_CIRCLE_GRID):
        n = self.dim
        if np.isinf(self.p):
            phases = unit_circle(grid) if self.complex else np.array([1.0, -1.0])
            rows = [t * np.eye(n)[i] for i in range(n) for t in phases]
            return np.array(rows, dtype=self.dtype)
        if self.p == 1.0:
            phases = unit_circle(grid) if self.complex else np.array([1.0, -1.0])
            if len(phases) ** n > 2_000_000:
                raise CapabilityError("dual extreme-point grid too large")
            return np.array(list(itertools.product(phases, repeat=n)), dtype=self.dtype)
        raise CapabilityError("l_p dual balls with 1 < p < inf have no finite extreme set")

    def strongly_exposed(self, x):
        x = self.vec(x)
        if 1.0 < self.p < np.inf:
            return True
        ax = np.abs(x)
        if self.p == 1.0:
            return int(np.sum(ax > ZERO_REL)) == 1
        return bool(np.all(ax >= 1.0 - 1e-9))

    def ball_vertices(self):
        n = self.dim
        if self.complex:
            raise CapabilityError("complex balls have no finite vertex set")
        if self.p == 1.0:
            return np.vstack([np.eye(n), -np.eye(n)])
        if np.isinf(self.p):
            return np.array(list(itertools.product([1.0, -1.0], repeat=n)))
        raise CapabilityError("smooth l_p balls have no vertices")

    def to_json(self):
        return {"field": self.field, "dim": self.dim,
                "kind": {"p": "inf" if np.isinf(self.p) else self.p}}


class WeightedPNormSpace(NormedSpace):
    """(sum w_i |x_i|^p)^(1/p); for p = inf the norm is max w_i |x_i|.

    Handled by the diagonal isometry x -> s*x onto l_p with
    s = w^(1/p) (s = w for p = inf).
    """

    kind = "weighted_p"

    def __init__(self, field, dim, p, w):
        super().__init__(field, dim)
        self.p = _parse_p(p)
        self.w = np.asarray(w, dtype=float)
        if self.w.shape != (self.dim,) or not np.all(self.w > 0):
            raise DomainError("weights must be strictly positive, one per coordinate")
        self.s = self.w if np.isinf(self.p) else self.w ** (1.0 / self.p)
        self.base = PNormSpace(field, dim, self.p)

    @property
    def smooth_everywhere(self):
        return self.base.smooth_everywhere

    def norm_batch(self, xs):
        return self.base.norm_batch(np.asarray(xs) * self.s)

    def dual_norm(self, phi):
        return self.base.dual_norm(self.vec(phi) / self.s)

    def support(self, x, grid=DEFAULT_CIRCLE_GRID, budget=None):
        smp = self.base.support(self.vec(x) * self.s, grid)
        return SupportSample(smp.functionals * self.s, smp.exhaustive, smp.gridded)

    def dual_extremes(self, grid=DEFAULT_CIRCLE_GRID):
        return self.base.dual_extremes(grid) * self.s

    def strongly_exposed(self, x):
        return self.base.strongly_exposed(self.vec(x) * self.s)

    def ball_vertices(self):
        return self.base.ball_vertices() / self.s

    def to_json(self):
        return {"field": self.field, "dim": self.dim,
                "kind": {"weighted": {"p": "inf" if np.isinf(self.p) else self.p,
                                      "w": self.w.tolist()}}}


def _generator_support(gens, x, nx, complex_field, rel=1e-9):
    """Face of the dual ball at x for a norm max_k |g_k(x)|."""
    vals = gens @ x
    act = np.flatnonzero(np.abs(vals) >= nx * (1.0 - rel))
    if complex_field:
        rows = np.conj(_phase(vals[act]))[:, None] * gens[act]
    else:
        rows = np.sign(vals[act])[:, None] * gens[act]
    # drop duplicates (e.g. g and -g both listed)
    uniq = []
    for r in rows:
        if not any(np.max(np.abs(r - u)) <= 1e-12 for u in uniq):
            uniq.append(r)
    return np.array(uniq)


class GeneratorNorm(NormedSpace):
    """Seminorm max_k |g_k(x)| for a finite list of functionals g_k."""

    kind = "generators"

    def __init__(self, field, dim, generators):
        super().__init__(field, dim)
        g = np.atleast_2d(np.asarray(generators, dtype=complex))
        if g.shape[1] != self.dim or g.shape[0] == 0:
            raise DomainError("generator list must be non-empty with matching dimension")
        if not self.complex:
            if np.any(np.abs(g.imag) > 1e-12):
                raise DomainError("real space given complex generators")
            g = g.real.copy()
        self.generators = g

    @cached_property
    def rank(self):
        return int(np.linalg.matrix_rank(self.generators, tol=1e-10))

    def norm_batch(self, xs):
        return np.abs(np.asarray(xs) @ self.generators.T).max(axis=1)

    def support(self, x, grid=DEFAULT_CIRCLE_GRID, budget=None):
        x = self.vec(x)
        nx = self.norm(x)
        if nx == 0.0:
            raise DomainError("support functionals at a kernel vector are undefined")
        return SupportSample(_generator_support(self.generators, x, nx, self.complex), True)

    def dual_extremes(self, grid=DEFAULT_CIRCLE_GRID):
        g = self._extreme_generators
        if self.complex:
            return np.vstack([t * g for t in unit_circle(grid)])
        return np.vstack([g, -g])

    @cached_property
    def _extreme_generators(self):
        # a generator strictly inside the unit dual ball is redundant
        g = self.generators
        if self.complex or self.rank < self.dim:
            return g
        keep = [r for r in g if GeneratorNorm.dual_norm(self, r) >= 1.0 - 1e-9]
        return np.array(keep)

    @cached_property
    def _vertices(self):
        if self.complex:
            raise CapabilityError("complex polytope balls have no finite vertex set")
        if self.rank < self.dim:
            raise CapabilityError("seminorm ball is unbounded")
        g = self.generators
        n = self.dim
        out = []
        for rows in itertools.combinations(range(len(g)), n):
            m = g[list(rows)]
            if abs(np.linalg.det(m)) < 1e-12:
                continue
            inv = np.linalg.inv(m)
            for signs in itertools.product([1.0, -1.0], repeat=n):
                v = inv @ np.array(signs)
                if np.max(np.abs(g @ v)) <= 1.0 + 1e-9:
                    if not any(np.max(np.abs(v - u)) <= 1e-9 for u in out):
                        out.append(v)
        return np.array(out)

    def ball_vertices(self):
        return self._vertices

    def dual_norm(self, phi):
        phi = self.vec(phi)
        return float(np.max(np.abs(self._vertices @ phi)))

    def strongly_exposed(self, x):
        x = self.vec(x)
        if self.rank < self.dim:
            raise CapabilityError("seminorm ball is unbounded")
        act = np.abs(self.generators @ x) >= 1.0 - 1e-9
        if not act.any():
            return False
        return int(np.linalg.matrix_rank(self.generators[act], tol=1e-10)) == self.dim


class PolytopeSpace(GeneratorNorm):
    """Norm given by a spanning list of dual extreme points."""

    kind = "polytope"

    def __init__(self, field, dim, generators):
        super().__init__(field, dim, generators)
        if self.rank < self.dim:
            raise DomainError("polytope dual extreme points must span the dual")

    def dual_norm(self, phi):
        if self.complex:
            raise CapabilityError("dual norm of complex polytope norms is not implemented")
        return super().dual_norm(phi)

    def to_json(self):
        g = self.generators
        rows = [[[v.real, v.imag] for v in r] for r in g] if self.complex else g.tolist()
        return {"field": self.field, "dim": self.dim, "kind": {"polytope": rows}}


class VuSpace(GeneratorNorm):
    """The seminorm v_u(z) = v(Z, u, z) induced by a unit vector u.

    The face of the dual ball at u is enumerated once; evaluation is routed
    through the numerical-range module's face radius.
    """

    kind = "vu_seminorm"
    is_seminorm = True

    def __init__(self, base, u, grid=DEFAULT_CIRCLE_GRID):
        u = base.vec(u)
        if abs(base.norm(u) - 1.0) > 1e-9:
            raise DomainError("v_u needs a unit vector u")
        smp = base.support(u, grid)
        super().__init__(base.field, base.dim, smp.functionals)
        self.base = base
        self.u = u
        self.face_exhaustive = smp.exhaustive

    def norm_batch(self, xs):
        from .numrange import face_radius_batch

        return face_radius_batch(self.generators, np.asarray(xs))

    def dual_norm(self, phi):
        raise CapabilityError("dual norm of a v_u seminorm is not implemented")

    def to_json(self):
        return {"field": self.field, "dim": self.dim,
                "kind": {"vu": {"base": self.base.to_json(),
                                "u": _encode_vec(self.u, self.complex)}}}


def _encode_vec(v, complex_field):
    if complex_field:
        return [[float(c.real), float(c.imag)] for c in v]
    return [float(c) for c in np.real(v)]


# -- functional interface --------------------------------------------------

def norm(space, x):
    return space.norm(x)


def dual_norm(space, phi):
    return space.dual_norm(phi)


def support_functionals(space, u, budget=None, grid=DEFAULT_CIRCLE_GRID):
    return space.support(u, grid=grid, budget=budget)


def dual_extreme_points(space, grid=DEFAULT_CIRCLE_GRID):
    return space.dual_extremes(grid)


def face_diameter(space, face):
    """Largest pairwise distance of face functionals (dual norm if known)."""
    face = np.asarray(face)
    if len(face) < 2:
        return 0.0
    best = 0.0
    for i in range(len(face)):
        for j in range(i + 1, len(face)):
            d = face[i] - face[j]
            try:
                dn = space.dual_norm(d)
            except CapabilityError:
                dn = float(np.max(np.abs(d)))
            best = max(best, dn)
    return float(best)


def is_smooth_point(space, x, tol=SMOOTH_TOL, grid=DEFAULT_CIRCLE_GRID):
    """Smoothness verdict; the margin is the diameter of the support face."""
    x = space.vec(x)
    if space.norm(x) == 0.0:
        raise DomainError("smoothness at zero is undefined")
    smp = space.support(x, grid=grid)
    diam = face_diameter(space, smp.functionals)
    return OrthoVerdict(diam <= tol, diam, smp.functionals, smp.exhaustive,
                        {"face_size": len(smp)})


def is_strongly_exposed(space, x):
    x = space.vec(x)
    if abs(space.norm(x) - 1.0) > 1e-9:
        raise DomainError("strong exposure is tested on unit vectors")
    return bool(space.strongly_exposed(x))


def identity_functional_check(space, phi, x, tol=1e-9):
    """dual_norm(phi) == 1 and phi(x) == ||x|| within tol."""
    return (abs(space.dual_norm(phi) - 1.0) <= tol
            and abs(np.dot(phi, x) - space.norm(x)) <= tol * (1.0 + space.norm(x)))


# -- JSON ------------------------------------------------------------------

def parse_vector(data, field, dim=None):
    """Flat scalars, [re, im] pairs, or an interleaved re/im list."""
    if isinstance(data, np.ndarray):
        return data
    if len(data) and isinstance(data[0], (list, tuple)):
        arr = np.array([complex(a, b) for a, b in data])
    else:
        arr = np.asarray(data, dtype=float)
        if field == "complex" and dim is not None and arr.size == 2 * dim:
            arr = arr[0::2] + 1j * arr[1::2]
    return arr.astype(complex) if field == "complex" else arr


def parse_matrix(rows, field):
    return np.array([parse_vector(r, field) for r in rows])


def space_from_json(d):
    if not isinstance(d, dict):
        raise DomainError("space descriptor must be an object")
    try:
        field = d["field"]
        dim = int(d["dim"])
        kind = d["kind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed space descriptor: {exc}") from exc
    if not isinstance(kind, dict) or len(kind) != 1:
        raise DomainError("space kind must be a single-key object")
    (name, val), = kind.items()
    if name == "p":
        return PNormSpace(field, dim, val)
    if name == "polytope":
        return PolytopeSpace(field, dim, parse_matrix(val, field))
    if name == "weighted":
        return WeightedPNormSpace(field, dim, val["p"], val["w"])
    if name == "vu":
        base = space_from_json(val["base"])
        return VuSpace(base, parse_vector(val["u"], base.field, base.dim))
    raise DomainError(f"unknown space kind {name!r}")
