import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from banach_ortho.errors import DomainError
from banach_ortho.functions import (BlaschkeParams, FiniteMetricSpace, LipschitzSpace,
                                    SampledFunction, attainment_set_f, blaschke_definition,
                                    blaschke_eval, blaschke_orthogonal, c_orthogonal,
                                    c_orthogonal_definition, circle_function,
                                    disk_algebra_orthogonal, lip_orthogonal,
                                    lip_orthogonal_definition, lipschitz_norm, sup_norm,
                                    pointwise_witness_check)
from banach_ortho.orthogonality import bj_orthogonal
from banach_ortho.scalar_geometry import unit_circle
from banach_ortho.spaces import PNormSpace

R1 = PNormSpace("real", 1, 2)
R2 = PNormSpace("real", 2, 2)
C2 = PNormSpace("complex", 2, 2)


def rotating(codomain=R2, n=720):
    f = circle_function(lambda t: [np.cos(t), np.sin(t)], codomain, n)
    g = circle_function(lambda t: [-np.sin(t), np.cos(t)], codomain, n)
    return f, g


def test_sup_norm_examples(rng):
    assert sup_norm(SampledFunction(np.ones((5, 1)), R1)) == 1
    f, _ = rotating()
    assert sup_norm(f) == pytest.approx(1, abs=1e-15)
    v = rng.standard_normal((50, 2))
    assert sup_norm(SampledFunction(v, R2)) == np.max(np.hypot(v[:, 0], v[:, 1]))


def test_sampled_function_errors():
    with pytest.raises(DomainError):
        SampledFunction(np.ones((3, 3)), R2)
    with pytest.raises(DomainError):
        SampledFunction(np.ones((3, 2)), R2, adjacency="torus")
    with pytest.raises(DomainError):
        SampledFunction(np.zeros((0, 2)), R2)


def test_sampled_json_round_trip():
    f = SampledFunction([[1, 2j], [0, 1]], C2, adjacency="path")
    g = SampledFunction.from_json(f.to_json())
    assert np.array_equal(g.values, f.values) and g.adjacency == "path"


def test_attainment_examples():
    t = np.linspace(0, 1, 101)
    f = SampledFunction(np.sin(np.pi * t)[:, None], R1, list(t), "path")
    a = attainment_set_f(f)
    assert a.indices == [50] and a.connected
    f, _ = rotating()
    a = attainment_set_f(f)
    assert len(a.indices) == 720 and a.connected
    two = circle_function(lambda t: [abs(np.cos(t)), 0.1], R2)
    a = attainment_set_f(two)
    assert len(a.components) == 2 and not a.connected


def test_circle_wraparound():
    vals = np.zeros((10, 1))
    vals[[0, 9]] = 1
    a = attainment_set_f(SampledFunction(vals, R1, adjacency="circle"))
    assert a.components == [[9, 0]]


def test_c_orthogonal_examples():
    f, g = rotating()
    assert c_orthogonal(f, g).decision
    assert not c_orthogonal(f, f).decision


def test_two_point_matches_linf(rng):
    linf = PNormSpace("real", 2, np.inf)
    for _ in range(200):
        x, y = rng.standard_normal(2), rng.standard_normal(2)
        if rng.random() < 0.3:
            x[1] = np.sign(x[1]) * abs(x[0])
        ref = bj_orthogonal(linf, x, y)
        got = c_orthogonal(SampledFunction(x[:, None], R1), SampledFunction(y[:, None], R1))
        if abs(ref.margin) > 1e-6:
            assert got.decision == ref.decision


def test_c_orthogonal_matches_definition(rng):
    for _ in range(15):
        v = rng.standard_normal((12, 2))
        w = rng.standard_normal((12, 2))
        f, g = SampledFunction(v, R2), SampledFunction(w, R2)
        ref = c_orthogonal_definition(f, g)
        if abs(ref.margin) > 1e-6:
            assert c_orthogonal(f, g).decision == ref.decision


def test_pointwise_witness_rotating_frame():
    f, g = rotating(C2, 360)
    rep = pointwise_witness_check(f, g)
    assert rep["applicable"] and rep["orthogonal"]
    assert rep["checked"] == 360 and rep["violations"] == 0
    assert rep["confirmed"] == rep["confirm_checked"] > 0


def test_pointwise_witness_real_path():
    t = np.linspace(0, 1, 101)
    f = SampledFunction(np.column_stack([np.ones(101), np.zeros(101)]), R2, list(t), "path")
    g = SampledFunction(np.column_stack([t - 0.5, np.ones(101)]), R2, list(t), "path")
    rep = pointwise_witness_check(f, g)
    assert rep["orthogonal"] and rep["violations"] == 0 and rep["grid_witness"] == 1
    # the pointwise witness is t = 1/2
    assert bj_orthogonal(R2, f.values[50], g.values[50]).decision


def test_pointwise_witness_vacuous_and_disconnected():
    f, _ = rotating()
    rep = pointwise_witness_check(f, f)
    assert rep["orthogonal"] is False and "vacuous" in rep["note"]
    two = circle_function(lambda t: [abs(np.cos(t)), 0.1], R2)
    rep = pointwise_witness_check(two, two)
    assert not rep["applicable"] and rep["components"] == 2


def test_blaschke_examples():
    z1 = BlaschkeParams(1)
    assert blaschke_eval(z1, 1j) == 1j
    assert abs(blaschke_eval(BlaschkeParams(0, [0.5]), 0.5)) == 0
    with pytest.raises(DomainError):
        BlaschkeParams(0, [1.0])
    with pytest.raises(DomainError):
        blaschke_eval(z1, 2.0)


@settings(max_examples=40)
@given(st.integers(0, 3), st.lists(st.tuples(st.floats(0.05, 0.95), st.floats(0, 6.28)),
                                   max_size=3))
def test_blaschke_is_inner(k, zs):
    p = BlaschkeParams(k, [r * np.exp(1j * a) for r, a in zs])
    assert np.max(np.abs(np.abs(blaschke_eval(p, unit_circle(256))) - 1)) <= 1e-12
    if p.degree > 0:
        assert np.all(np.abs(blaschke_eval(p, 0.9 * unit_circle(64))) < 1)


def test_blaschke_orthogonality_examples():
    z, z2 = BlaschkeParams(1), BlaschkeParams(2)
    v = blaschke_orthogonal(z, z2)
    assert v.decision and v.details["agree"]
    assert not blaschke_orthogonal(z, z).decision


def test_blaschke_matches_definition():
    rng = np.random.default_rng(12)
    for _ in range(6):
        def rand():
            zs = [rng.uniform(0.1, 0.9) * np.exp(2j * np.pi * rng.random())
                  for _ in range(rng.integers(0, 3))]
            return BlaschkeParams(int(rng.integers(0, 2)), zs)
        a, b = rand(), rand()
        if a.degree == 0 and b.degree == 0:
            continue
        ref = blaschke_definition(a, b)
        if abs(ref.margin) > 1e-6:
            assert blaschke_orthogonal(a, b).decision == ref.decision


def test_disk_algebra_examples():
    z = unit_circle(720)
    assert disk_algebra_orthogonal(np.ones(720), z).decision
    assert not disk_algebra_orthogonal(z, z).decision
    bn, bm = BlaschkeParams(1), BlaschkeParams(0, [0.3 + 0.2j])
    da = disk_algebra_orthogonal(blaschke_eval(bn, z), blaschke_eval(bm, z))
    assert da.decision == blaschke_orthogonal(bn, bm).decision


def test_lipschitz_examples(rng):
    m = FiniteMetricSpace([[0, 1], [1, 0]])
    assert lipschitz_norm(m, [0.0, 1.0], R1) == 1
    d = rng.random((5, 2))
    dist = np.hypot(*(d[:, None, :] - d[None, :, :]).transpose(2, 0, 1))
    m5 = FiniteMetricSpace(dist)
    F = rng.standard_normal((5, 2))
    F[0] = 0
    brute = max(np.linalg.norm(F[i] - F[j]) / dist[i, j]
                for i in range(5) for j in range(5) if i != j)
    assert lipschitz_norm(m5, F, R2) == pytest.approx(brute, rel=1e-14)
    assert lipschitz_norm(m5, -3 * F, R2) == pytest.approx(3 * brute, rel=1e-14)


def test_metric_errors():
    with pytest.raises(DomainError):
        FiniteMetricSpace([[0, 1], [2, 0]])
    with pytest.raises(DomainError):
        FiniteMetricSpace([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(DomainError):
        lipschitz_norm(FiniteMetricSpace([[0, 1], [1, 0]]), [1.0, 1.0], R1)


def test_lip_two_point_closed_form():
    m = FiniteMetricSpace([[0, 2], [2, 0]])
    # one quotient: F orthogonal to G iff G's quotient vanishes
    assert lip_orthogonal(m, [0.0, 1.0], [0.0, 0.0], R1).decision
    assert not lip_orthogonal(m, [0.0, 1.0], [0.0, -0.3], R1).decision
    assert not lip_orthogonal(m, [0.0, 1.0], [0.0, 1.0], R1).decision


def test_lip_matches_definition(rng):
    d = rng.random((4, 2))
    dist = np.hypot(*(d[:, None, :] - d[None, :, :]).transpose(2, 0, 1))
    m = FiniteMetricSpace(dist)
    lip = LipschitzSpace(m, R1)
    for _ in range(30):
        F, G = rng.standard_normal(4), rng.standard_normal(4)
        F[0] = G[0] = 0
        ref = lip_orthogonal_definition(m, F, G, R1)
        assert lip.norm(lip.embed(F[:, None])) == pytest.approx(lipschitz_norm(m, F, R1))
        if abs(ref.margin) > 1e-6:
            assert lip_orthogonal(m, F, G, R1).decision == ref.decision
