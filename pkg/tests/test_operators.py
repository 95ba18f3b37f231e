import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from banach_ortho.errors import DomainError
from banach_ortho.operators import (OperatorDescriptor, OperatorSpace, VRadiusSpace,
                                    attainment_set, operator_norm, power_iteration,
                                    states_sample, v_radius)
from banach_ortho.spaces import PNormSpace

L1 = PNormSpace("real", 2, 1)
L2 = PNormSpace("real", 2, 2)
LINF = PNormSpace("real", 2, np.inf)
C2 = PNormSpace("complex", 2, 2)


def _sampled_norm(T, count=20000, seed=0):
    """Independent lower estimate: max ||Tx|| over random unit vectors."""
    rng = np.random.default_rng(seed)
    d = T.domain
    xs = rng.standard_normal((count, d.dim))
    if d.complex:
        xs = xs + 1j * rng.standard_normal((count, d.dim))
    xs /= d.norm_batch(xs)[:, None]
    return float(np.max(T.codomain.norm_batch(xs @ T.matrix.T)))


def test_identity_norm():
    s = PNormSpace("real", 3, 2)
    assert operator_norm(OperatorDescriptor(np.eye(3), s)).value == pytest.approx(1, abs=1e-12)


def test_diagonal_norm_witness():
    r = operator_norm(OperatorDescriptor(np.diag([1.0, 2.0]), L2))
    assert r.value == pytest.approx(2, abs=1e-10)
    assert abs(abs(r.witness[1]) - 1) < 1e-8


def test_l1_to_linf_columns():
    T = OperatorDescriptor([[1, 1], [1, -1]], L1, LINF)
    r = operator_norm(T)
    assert r.value == 1 and r.exact and r.route == "l1_columns"
    assert _sampled_norm(T) <= 1 + 1e-12


def test_power_iteration_against_svd(rng):
    for _ in range(20):
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        sigma, v = power_iteration(m)
        assert sigma == pytest.approx(np.linalg.svd(m, compute_uv=False)[0], rel=1e-10)
        assert np.linalg.norm(m @ v) == pytest.approx(sigma, rel=1e-10)


@pytest.mark.parametrize("dom,cod", [(1, 2), (np.inf, 1), (np.inf, np.inf), (3, 1.5), (2, np.inf)])
def test_norm_dominates_sampling(rng, dom, cod):
    a, b = PNormSpace("real", 2, dom), PNormSpace("real", 2, cod)
    for _ in range(5):
        T = OperatorDescriptor(rng.standard_normal((2, 2)), a, b)
        r = operator_norm(T)
        est = _sampled_norm(T, 4000)
        assert r.value >= est - 1e-9
        if r.exact:
            assert r.value <= est * (1 + 5e-3)
        assert b.norm(T.matrix @ r.witness) == pytest.approx(r.value, rel=1e-9)


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        OperatorDescriptor(np.eye(3), L2)
    with pytest.raises(DomainError):
        OperatorDescriptor([[1j, 0], [0, 1]], L2)


def test_json_round_trip():
    T = OperatorDescriptor([[1, 2j], [0, 1]], C2)
    back = OperatorDescriptor.from_json(T.to_json())
    assert np.array_equal(back.matrix, T.matrix)


def test_attainment_examples():
    a = attainment_set(OperatorDescriptor(np.diag([2.0, 1.0]), L2))
    assert a.exhaustive and a.subspace.shape[1] == 1
    assert np.allclose(np.abs(a.points), [[1, 0], [1, 0]])
    a = attainment_set(OperatorDescriptor(np.eye(2), L2))
    assert a.exhaustive and a.subspace.shape[1] == 2
    a = attainment_set(OperatorDescriptor([[1, 1], [1, -1]], L1, LINF))
    assert a.exhaustive and len(a.points) == 4
    with pytest.raises(DomainError):
        attainment_set(OperatorDescriptor(np.zeros((2, 2)), L2))


def test_attainment_band_members(rng):
    s = PNormSpace("real", 2, 3)
    T = OperatorDescriptor(rng.standard_normal((2, 2)), s)
    a = attainment_set(T, eta=1e-3)
    vals = s.norm_batch(a.points @ T.matrix.T)
    assert np.all(vals >= a.norm - 1e-3 - 1e-9)


def test_v_radius_examples():
    skew = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert v_radius(OperatorDescriptor(np.eye(2), L2)) == pytest.approx(1)
    assert abs(v_radius(OperatorDescriptor(skew, L2))) < 1e-12
    assert v_radius(OperatorDescriptor(skew, C2)) == pytest.approx(1, abs=1e-10)
    with pytest.raises(DomainError):
        v_radius(OperatorDescriptor(np.ones((2, 2)), L2, PNormSpace("real", 2, 3)))


def test_v_radius_hilbert_against_field_of_values(rng):
    # oracle: max |<Tx, x>| over a dense sample of the complex sphere
    for _ in range(5):
        m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        xs = rng.standard_normal((40000, 2)) + 1j * rng.standard_normal((40000, 2))
        xs /= np.linalg.norm(xs, axis=1)[:, None]
        fov = np.max(np.abs(np.einsum("ij,nj,ni->n", m, xs, np.conj(xs))))
        v = v_radius(OperatorDescriptor(m, C2))
        assert fov - 1e-12 <= v <= fov * (1 + 1e-3)


@pytest.mark.parametrize("p", [1, np.inf])
def test_spear_equality_polytopes(p):
    s = PNormSpace("real", 2, p)
    rng = np.random.default_rng(11)
    for _ in range(10):
        # v <= ||T|| always; identity is a spear, so v(Id) = ||Id||
        T = OperatorDescriptor(rng.standard_normal((2, 2)), s)
        assert v_radius(T) <= operator_norm(T).value + 1e-9
    I = OperatorDescriptor(np.eye(2), s)
    assert v_radius(I) == pytest.approx(operator_norm(I).value, abs=1e-9)


def test_operator_space_norm_and_support():
    Z = OperatorSpace(L2)
    assert Z.norm(np.eye(2).reshape(-1)) == pytest.approx(1)
    sup = Z.support(np.diag([2.0, 1.0]).reshape(-1))
    # the functional A -> <A e1, e1> norms diag(2, 1)
    assert any(np.allclose(np.abs(f), [1, 0, 0, 0]) for f in sup.functionals)
    assert Z.dual_norm(np.eye(2).reshape(-1)) == pytest.approx(2)


def test_states_are_normalized(rng):
    s = PNormSpace("complex", 2, 3)
    xs, fs, exhaustive = states_sample(s, count=64, seed=1)
    assert not exhaustive
    assert np.allclose(s.norm_batch(xs), 1, atol=1e-9)
    assert np.allclose(np.einsum("ni,ni->n", fs, xs), 1, atol=1e-7)


def test_v_seminorm_kernel():
    V = VRadiusSpace(L2)
    assert V.is_seminorm
    assert V.norm(np.array([[0, 1], [-1, 0]], float).reshape(-1)) < 1e-12


@settings(max_examples=30)
@given(st.lists(st.floats(-2, 2), min_size=4, max_size=4),
       st.sampled_from([1.0, 2.0, 3.0, np.inf]))
def test_radius_below_norm(entries, p):
    s = PNormSpace("real", 2, p)
    T = OperatorDescriptor(np.array(entries).reshape(2, 2), s)
    assert v_radius(T) <= operator_norm(T).value * (1 + 1e-9) + 1e-12
