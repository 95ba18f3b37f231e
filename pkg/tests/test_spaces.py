import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize

from banach_ortho.errors import CapabilityError, DomainError
from banach_ortho.spaces import (PNormSpace, PolytopeSpace, WeightedPNormSpace, is_smooth_point,
                                 is_strongly_exposed, parse_vector, space_from_json,
                                 support_functionals)


def test_norm_examples():
    assert PNormSpace("real", 2, 2).norm([3, 4]) == pytest.approx(5)
    assert PNormSpace("real", 2, np.inf).norm([1, -1]) == 1


def test_polytope_matches_linf(rng):
    poly = PolytopeSpace("real", 2, [[1, 0], [0, 1]])
    linf = PNormSpace("real", 2, np.inf)
    xs = rng.standard_normal((1000, 2))
    assert np.allclose(poly.norm_batch(xs), linf.norm_batch(xs))


def test_dual_norm_examples():
    assert PNormSpace("real", 2, 1).dual_norm([1, -1]) == 1
    assert PNormSpace("real", 2, 2).dual_norm([3, 4]) == pytest.approx(5)


def test_dual_norm_l3_by_sphere_sampling(rng):
    space = PNormSpace("real", 3, 3)
    phi = rng.standard_normal(3)

    def ratio(x):
        return -abs(phi @ x) / space.norm(x)

    xs = rng.standard_normal((20000, 3))
    start = xs[np.argmin([ratio(x) for x in xs])]
    best = -minimize(ratio, start, method="Nelder-Mead",
                     options={"xatol": 1e-12, "fatol": 1e-14}).fun
    assert space.dual_norm(phi) == pytest.approx(best, abs=1e-6)


def test_support_examples():
    f = support_functionals(PNormSpace("real", 2, 2), [1, 0]).functionals
    assert np.allclose(f, [[1, 0]])
    f = support_functionals(PNormSpace("real", 2, np.inf), [1, 1]).functionals
    assert {tuple(r) for r in f} == {(1.0, 0.0), (0.0, 1.0)}
    s3 = PNormSpace("real", 2, 3)
    f = support_functionals(s3, [1, 1]).functionals
    assert len(f) == 1 and f[0][0] == pytest.approx(f[0][1])
    assert s3.dual_norm(f[0]) == pytest.approx(1)
    assert f[0] @ [1, 1] == pytest.approx(s3.norm([1, 1]))


def test_smoothness_examples(rng):
    h = PNormSpace("complex", 3, 2)
    x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    assert is_smooth_point(h, x / h.norm(x)).decision
    assert not is_smooth_point(PNormSpace("real", 2, np.inf), [1, 1]).decision
    # the face of the l1 sphere at e1 is the segment {(1, t) : |t| <= 1}
    v = is_smooth_point(PNormSpace("real", 2, 1), [1, 0])
    assert not v.decision
    assert v.margin == pytest.approx(2)


def test_strong_exposure_examples(rng):
    assert is_strongly_exposed(PNormSpace("real", 3, 2), [0, 0, 1])
    assert not is_strongly_exposed(PNormSpace("real", 2, np.inf), [1, 0])
    l1 = PNormSpace("real", 2, 1)
    assert is_strongly_exposed(l1, [1, 0])
    # sequences with e1*(x_n) -> 1 in the unit ball converge to e1
    for _ in range(1000):
        eps = 10.0 ** rng.uniform(-8, -1)
        t = rng.uniform(-1, 1)
        x = np.array([1 - eps, t * eps])
        assert l1.norm(x) <= 1 + 1e-12
        assert l1.norm(x - [1, 0]) <= 2 * eps


def test_dual_extreme_points():
    e = PNormSpace("real", 2, 1).dual_extremes()
    assert {tuple(r) for r in e} == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    e = PNormSpace("real", 2, np.inf).dual_extremes()
    assert len(e) == 4
    e = PNormSpace("complex", 2, np.inf).dual_extremes(64)
    assert e.shape == (128, 2)
    assert np.allclose(np.abs(e).sum(axis=1), 1)


def test_capability_and_domain_errors():
    with pytest.raises(CapabilityError):
        PNormSpace("real", 2, 3).dual_extremes()
    with pytest.raises(DomainError):
        PNormSpace("real", 2, 0.5)
    with pytest.raises(DomainError):
        support_functionals(PNormSpace("real", 2, 2), [0, 0])
    with pytest.raises(DomainError):
        PolytopeSpace("real", 2, [[1, 0]])


def test_json_round_trip():
    for s in [PNormSpace("complex", 3, 1.5), PNormSpace("real", 2, np.inf),
              PolytopeSpace("real", 2, [[1, 2], [0, 1]]),
              WeightedPNormSpace("real", 2, 2, [1, 3])]:
        t = space_from_json(s.to_json())
        assert t.to_json() == s.to_json()


def test_vector_forms():
    a = parse_vector([[1, 2], [3, 4]], "complex")
    b = parse_vector([1, 2, 3, 4], "complex", 2)
    assert np.allclose(a, [1 + 2j, 3 + 4j]) and np.allclose(a, b)


@given(st.sampled_from([1.0, 1.5, 2.0, 3.0, np.inf]),
       st.lists(st.floats(-5, 5), min_size=3, max_size=3),
       st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_triangle_and_duality(p, x, y):
    s = PNormSpace("real", 3, p)
    x, y = np.array(x), np.array(y)
    assert s.norm(x + y) <= s.norm(x) + s.norm(y) + 1e-9
    if s.norm(x) > 1e-6:
        for f in s.support(x).functionals:
            assert s.dual_norm(f) == pytest.approx(1, abs=1e-9)
            assert f @ x == pytest.approx(s.norm(x), rel=1e-9)
