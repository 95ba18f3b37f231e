import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize

from banach_ortho.errors import DomainError
from banach_ortho.orthogonality import (best_approximation, bj_margins, bj_orthogonal,
                                        directional_orthogonal, directional_witness,
                                        golden_section, james_witness)
from banach_ortho.scalar_geometry import unit_circle
from banach_ortho.spaces import PNormSpace, PolytopeSpace

L2 = PNormSpace("real", 2, 2)
LINF = PNormSpace("real", 2, np.inf)
SCALARS = PNormSpace("complex", 1, 2)


def _cvec(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def test_hilbert_examples():
    v = bj_orthogonal(L2, [1, 0], [0, 1])
    assert v.decision and v.witness == pytest.approx(0)
    v = bj_orthogonal(L2, [1, 0], [1, 0])
    assert not v.decision
    assert v.witness == pytest.approx(-1, abs=1e-9)
    assert v.margin == pytest.approx(-1, abs=1e-9)


def test_linf_diagonal_pair():
    # ||(1, 1) + lam (1, -1)|| = max(|1 + lam|, |1 - lam|) >= 1
    assert bj_orthogonal(LINF, [1, 1], [1, -1]).decision


def test_complex_margin_closed_form(rng):
    s = PNormSpace("complex", 3, 2)
    xs, ys = _cvec(rng, (200, 3)), _cvec(rng, (200, 3))
    m, lams = bj_margins(s, xs, ys)
    nx = np.linalg.norm(xs, axis=1)
    ip = np.einsum("ij,ij->i", np.conj(ys), xs)
    exact = np.sqrt(nx ** 2 - np.abs(ip) ** 2 / np.linalg.norm(ys, axis=1) ** 2) - nx
    assert np.max(np.abs(m - exact)) < 1e-9


def test_complex_l1_margin_against_nelder_mead(rng):
    s = PNormSpace("complex", 3, 1)
    for _ in range(10):
        x, y = _cvec(rng, 3), _cvec(rng, 3)
        m, _ = bj_margins(s, x[None], y[None])
        f = lambda p: s.norm(x + (p[0] + 1j * p[1]) * y)
        best = min(minimize(f, p0, method="Nelder-Mead",
                            options={"xatol": 1e-12, "fatol": 1e-14}).fun
                   for p0 in rng.standard_normal((6, 2)))
        assert m[0] == pytest.approx(best - s.norm(x), abs=1e-8)


def test_real_field_directional_equals_bj(rng):
    s = PNormSpace("real", 3, 3)
    for _ in range(200):
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        if rng.random() < 0.5:
            lam, x = best_approximation(s, x, y)
        assert (directional_orthogonal(s, x, y, 1.0).decision
                == bj_orthogonal(s, x, y).decision)


def test_scalar_directional_versus_bj():
    # ||1 + t i|| = sqrt(1 + t^2) >= 1, but 1 + i * i = 0
    assert directional_orthogonal(SCALARS, [1], [1j], 1.0).decision
    v = bj_orthogonal(SCALARS, [1], [1j])
    assert not v.decision
    assert complex(v.witness) == pytest.approx(1j, abs=1e-6)


def test_directional_grid_characterizes_bj(rng):
    s = PNormSpace("complex", 2, 2)
    for _ in range(12):
        x, y = _cvec(rng, 2), _cvec(rng, 2)
        if rng.random() < 0.5:
            x = best_approximation(s, x, y)[1]
        bj = bj_orthogonal(s, x, y).decision
        every = all(directional_orthogonal(s, x, y, g).decision for g in unit_circle(360))
        assert bj == every


def test_james_examples():
    assert np.allclose(james_witness(L2, [1, 0], [0, 1]), [1, 0])
    phi = james_witness(LINF, [1, 1], [1, -1])
    assert np.allclose(phi, [0.5, 0.5])
    assert james_witness(L2, [1, 0], [1, 1]) is None
    assert bj_orthogonal(L2, [1, 0], [1, 1]).margin < -1e-7


def test_directional_witness_examples(rng):
    phi = directional_witness(SCALARS, [1], [1j], 1.0)
    assert np.allclose(phi, [1])
    s = PNormSpace("real", 2, 1)
    for _ in range(50):
        x, y = rng.standard_normal(2), rng.standard_normal(2)
        x = best_approximation(s, x, y)[1]
        a, b = directional_witness(s, x, y, 1), james_witness(s, x, y)
        assert (a is None) == (b is None)


def test_directional_witness_none_iff_not_orthogonal(rng):
    s = PNormSpace("complex", 2, np.inf)
    for _ in range(30):
        x, y = _cvec(rng, 2), _cvec(rng, 2)
        g = np.exp(2j * np.pi * rng.random())
        if rng.random() < 0.5:
            x = best_approximation(s, x, y)[1]
        w = directional_witness(s, x, y, g, grid=256)
        d = directional_orthogonal(s, x, y, g)
        if abs(d.margin) > 1e-4 or d.decision:
            assert (w is not None) == d.decision


def test_best_approximation_examples(rng):
    for _ in range(20):
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        lam, res = best_approximation(PNormSpace("real", 3, 2), x, y)
        assert lam == pytest.approx(x @ y / (y @ y), abs=1e-9)
    lam, res = best_approximation(L2, [2, 4], [1, 2])
    assert np.allclose(res, 0, atol=1e-9)
    lam, res = best_approximation(PNormSpace("real", 2, 1), [1, 1], [1, 0])
    assert lam == pytest.approx(1, abs=1e-7)
    assert np.allclose(res, [0, 1], atol=1e-7)


def test_errors():
    with pytest.raises(DomainError):
        james_witness(L2, [0, 0], [1, 0])
    with pytest.raises(DomainError):
        best_approximation(L2, [1, 0], [0, 0])
    with pytest.raises(DomainError):
        directional_witness(L2, [1, 0], [0, 1], 2.0)


def test_golden_section_quadratic():
    t, v = golden_section(lambda t: (t - 0.3) ** 2 + 1, -2, 2)
    # value comparisons resolve the argmin only to about sqrt(eps)
    assert t == pytest.approx(0.3, abs=1e-7) and v == pytest.approx(1)


@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6),
       st.sampled_from([1.0, 1.5, 2.0, 4.0, np.inf]))
def test_best_approximation_residual_is_orthogonal(v, p):
    s = PNormSpace("real", 3, p)
    x, y = np.array(v[:3]), np.array(v[3:])
    if s.norm(y) < 1e-3:
        return
    lam, res = best_approximation(s, x, y)
    if s.norm(res) < 1e-6:
        return
    assert bj_orthogonal(s, res, y).decision


@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6), st.floats(0.1, 5))
def test_homogeneity(v, c):
    s = PNormSpace("real", 3, 3)
    x, y = np.array(v[:3]), np.array(v[3:])
    if s.norm(x) < 1e-3 or s.norm(y) < 1e-3:
        return
    a = bj_orthogonal(s, x, y)
    b = bj_orthogonal(s, c * x, -y)
    if abs(a.margin) > 1e-5:
        assert a.decision == b.decision


def test_polytope_james_agrees(rng):
    s = PolytopeSpace("real", 3, rng.standard_normal((8, 3)))
    for _ in range(100):
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        if rng.random() < 0.5:
            x = best_approximation(s, x, y)[1]
        m = bj_orthogonal(s, x, y)
        if abs(m.margin) > 2e-7 or m.decision:
            assert (james_witness(s, x, y) is not None) == m.decision


def test_right_additivity_at_smooth_points(rng):
    s = PNormSpace("real", 3, 3)
    # on a smooth space the directions orthogonal to x form the kernel of
    # its support functional, a linear subspace
    x = rng.standard_normal(3)
    phi = s.support(x).functionals[0]
    basis = np.linalg.svd(phi[None])[2][1:]
    for _ in range(10):
        y, z = rng.standard_normal((2, 2)) @ basis
        assert bj_orthogonal(s, x, y).decision and bj_orthogonal(s, x, z).decision
        assert bj_orthogonal(s, x, y + z).decision
    # at the non-smooth point e1 of l1 additivity fails
    l1 = PNormSpace("real", 2, 1)
    assert bj_orthogonal(l1, [1, 0], [1, -1]).decision
    assert bj_orthogonal(l1, [1, 0], [1, 1]).decision
    assert not bj_orthogonal(l1, [1, 0], [2, 0]).decision
