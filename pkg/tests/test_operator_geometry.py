import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from banach_ortho.errors import CapabilityError
from banach_ortho.operator_geometry import (bhatia_semrl, bs_sequential, eta_ladder,
                                            index_certificate, index_lower_bound_lp,
                                            numerical_index, op_bj_extreme, op_bj_general,
                                            rank_one_orthogonal_smooth,
                                            smooth_operator_sufficient,
                                            spear_obstruction_check, v_g, v_orthogonal)
from banach_ortho.operators import OperatorDescriptor, OperatorSpace, operator_norm
from banach_ortho.orthogonality import bj_orthogonal
from banach_ortho.spaces import PNormSpace

L1 = PNormSpace("real", 2, 1)
L2 = PNormSpace("real", 2, 2)
LINF = PNormSpace("real", 2, np.inf)
C2 = PNormSpace("complex", 2, 2)


def op(m, dom=L2, cod=None):
    return OperatorDescriptor(np.asarray(m), dom, cod)


def test_eta_ladder():
    lad = eta_ladder()
    assert lad[0] == 2.0 ** -4 and lad[-1] == 2.0 ** -14 and len(lad) == 11


def test_general_examples():
    T, A = op(np.diag([1.0, 0.0])), op(np.diag([0.0, 1.0]))
    v = op_bj_general(T, A)
    assert v.decision
    dists = [r["distance"] for r in v.details["rungs"]]
    assert all(a <= b + 1e-15 for a, b in zip(dists, dists[1:]))
    assert not op_bj_general(T, T).decision


@pytest.mark.parametrize("dom,cod", [(L2, L2), (L1, LINF)])
def test_general_matches_definition(dom, cod):
    rng = np.random.default_rng(5)
    Z = OperatorSpace(dom, cod)
    agree = total = 0
    for k in range(20):
        t = rng.standard_normal((2, 2))
        a = rng.standard_normal((2, 2))
        if k % 2:
            # push the pair onto the orthogonal side: subtract the best multiple
            from banach_ortho.orthogonality import best_approximation
            lam, _ = best_approximation(Z, t.ravel(), a.ravel())
            t = t - lam * a
        gen = op_bj_general(op(t, dom, cod), op(a, dom, cod))
        ref = bj_orthogonal(Z, t.ravel(), a.ravel())
        if abs(ref.margin) <= 2e-7:
            continue
        total += 1
        agree += gen.decision == ref.decision
    assert total >= 10 and agree == total


def test_extreme_enumeration_example():
    T = op(np.eye(2), L1, LINF)
    A = op([[0, 1], [1, 0]], L1, LINF)
    v = op_bj_extreme(T, A)
    # attaining pairs (e_j, e_j*): values e_j*(A e_j) = 0
    assert v.decision and v.exhaustive
    assert bj_orthogonal(OperatorSpace(L1, LINF), T.matrix.ravel(), A.matrix.ravel()).decision
    assert not op_bj_extreme(T, T).decision


def test_extreme_matches_general():
    rng = np.random.default_rng(9)
    for _ in range(15):
        T = op(rng.standard_normal((2, 2)), LINF, L1)
        A = op(rng.standard_normal((2, 2)), LINF, L1)
        e, g = op_bj_extreme(T, A), op_bj_general(T, A)
        if abs(e.margin) > 1e-6:
            assert e.decision == g.decision


def test_extreme_capability():
    with pytest.raises(CapabilityError):
        op_bj_extreme(op(np.eye(2), PNormSpace("real", 2, 3)), op(np.eye(2), PNormSpace("real", 2, 3)))


def test_bhatia_semrl_examples():
    v = bhatia_semrl(op(np.eye(2)), op(np.diag([1.0, -1.0])))
    assert v.decision
    x = v.witness
    assert abs(np.vdot(x, np.diag([1.0, -1.0]) @ x)) < 1e-9
    assert not bhatia_semrl(op(np.eye(2)), op(np.eye(2))).decision
    with pytest.raises(CapabilityError):
        bhatia_semrl(op(np.eye(2), L1), op(np.eye(2), L1))


def test_bhatia_semrl_matches_definition_complex():
    rng = np.random.default_rng(21)
    s = PNormSpace("complex", 2, 2)
    Z = OperatorSpace(s)
    for _ in range(10):
        t = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        bs = bhatia_semrl(op(t, s), op(a, s))
        ref = bj_orthogonal(Z, t.ravel(), a.ravel())
        if abs(ref.margin) > 1e-6:
            assert bs.decision == ref.decision


def test_band_versus_attainment():
    eps = 0.01
    T, A = op(np.diag([1.0, 1.0 - eps])), op(np.diag([0.0, 1.0]))
    seq = bs_sequential(T, A)
    # closed form: x = e1 lies in every band and <Ax, Tx> = 0 there
    assert seq.decision and bhatia_semrl(T, A).decision
    A2 = op(np.diag([1.3, -0.7]))
    # closed form: with s = |x2|^2 the band is s <= (1 - (1 - eta)^2) / (1 - 0.99^2)
    # and |<A2 x, T x>| = |1.3 (1 - s) - 0.693 s|
    seq = bs_sequential(T, A2)
    for r in seq.details["rungs"]:
        smax = min(1.0, (1 - (1 - r["eta"]) ** 2) / (1 - (1 - eps) ** 2))
        closed = max(0.0, 1.3 - 1.993 * smax)
        assert closed - 1e-9 <= r["min_value"] <= closed + 1e-3
    assert not seq.decision and not bhatia_semrl(T, A2).decision

def test_sequential_agrees_with_bhatia_semrl():
    rng = np.random.default_rng(2)
    s = PNormSpace("complex", 3, 2)
    for _ in range(6):
        t = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        b = bhatia_semrl(op(t, s), op(a, s))
        if abs(b.margin) < 1e-4:
            continue
        assert bs_sequential(op(t, s), op(a, s)).decision == b.decision


def test_v_orthogonal_examples():
    assert not v_orthogonal(op(np.eye(2), C2), op(np.eye(2), C2)).decision
    v = v_orthogonal(op(np.eye(2, dtype=complex), C2), op(np.diag([1.0, -1.0]), C2))
    assert v.decision
    d = v_orthogonal(op([[0.0, 1.0], [-1.0, 0.0]]), op(np.eye(2)))
    assert d.decision is None and d.details["degenerate"]


def test_v_orthogonal_polytope_exhaustive():
    T = op(np.eye(2), L1)
    A = op([[0.0, 1.0], [1.0, 0.0]], L1)
    v = v_orthogonal(T, A)
    assert v.exhaustive and v.decision


def test_index_real_l2_and_l1():
    r = numerical_index(L2, restarts=8, sweeps=4)
    assert r.upper <= 1e-6
    w = r.witness
    assert np.allclose(w + w.T, 0, atol=1e-3 * np.abs(w).max())
    r = numerical_index(L1, restarts=8, sweeps=4)
    assert r.upper == pytest.approx(1, abs=1e-3) and r.lower == pytest.approx(1, abs=1e-3)
    assert r.lower <= r.upper


def test_index_lp_linf():
    assert index_lower_bound_lp(LINF) == pytest.approx(1, abs=1e-9)
    assert index_lower_bound_lp(L1) == pytest.approx(1, abs=1e-9)
    assert index_lower_bound_lp(PNormSpace("real", 3, 1)) == pytest.approx(1, abs=1e-9)


def _lp_index_oracle(p):
    """Known closed form for real two-dimensional l_p."""
    f = lambda t: -abs(t ** (p - 1) - t) / (1 + t ** p)
    return -min(minimize_scalar(f, bounds=b, method="bounded", options={"xatol": 1e-12}).fun
                for b in [(0, 1), (1, 50)])


def test_index_lp_literature_value():
    s = PNormSpace("real", 2, 3)
    r = numerical_index(s, restarts=8, sweeps=4)
    oracle = _lp_index_oracle(3.0)
    assert oracle == pytest.approx(0.2270, abs=1e-4)
    assert r.upper == pytest.approx(oracle, abs=1e-3)
    cert = index_certificate(s, r.witness)
    assert cert["ratio_states"] <= cert["ratio"] + 1e-9


def test_smooth_operator_examples():
    out = smooth_operator_sufficient(op(np.diag([2.0, 1.0])))
    assert out["applies"] and out["operator_smooth"]
    assert np.allclose(np.abs(out["x0"]), [1, 0])
    assert not smooth_operator_sufficient(op(np.eye(2)))["applies"]


def test_rank_one_example():
    out = rank_one_orthogonal_smooth(op(np.eye(2)), [1, 0], [1, 0], [0, 1])
    assert out["violations"] == []
    assert np.allclose(out["T"].matrix, [[0, 0], [1, 0]])
    assert out["general"].decision and out["definition"].decision
    assert out["smooth"]["applies"]
    bad = rank_one_orthogonal_smooth(op(np.eye(2)), [1, 0], [1, 0], [0.6, 0.8])
    assert "u0 is not orthogonal to A x0" in bad["violations"]


def test_rank_one_lp3():
    s = PNormSpace("real", 2, 3)
    rng = np.random.default_rng(4)
    from banach_ortho.operator_geometry import exposing_functional, find_orthogonal_smooth
    A = op(rng.standard_normal((2, 2)), s)
    x0 = rng.standard_normal(2)
    x0 /= s.norm(x0)
    u0 = find_orthogonal_smooth(s, A.matrix @ x0)
    out = rank_one_orthogonal_smooth(A, x0, exposing_functional(s, x0), u0)
    assert out["violations"] == []
    assert out["general"].decision and out["smooth"]["applies"]


def test_spear_obstruction_l2():
    out = spear_obstruction_check(op(np.eye(2)))
    assert out["obstruction"] and out["spear"] is False
    assert bj_orthogonal(L2, out["u0"], out["x0"]).decision
    # the rank-one probe has v(T) = |<u0, x0>| * ... = 0 on real Hilbert space
    assert out["v_G"] <= out["probe_norm"] - 1e-3


def test_spear_obstruction_linf():
    out = spear_obstruction_check(op(np.eye(2), LINF))
    assert not out["obstruction"] and out["spear"] is None


def test_spear_obstruction_smooth_codomain():
    rng = np.random.default_rng(8)
    s = PNormSpace("real", 2, 1.5)
    for _ in range(3):
        m = rng.standard_normal((2, 2))
        G = op(m / operator_norm(op(m, L1, s)).value, L1, s)
        assert spear_obstruction_check(G, certify=False)["obstruction"]


def test_v_g_identity_matches_radius():
    from banach_ortho.operators import v_radius
    T = op([[0.3, 1.0], [-0.2, 0.5]], PNormSpace("real", 2, 3))
    r = v_g(op(np.eye(2), PNormSpace("real", 2, 3)), T)
    assert r["value"] == pytest.approx(v_radius(T), rel=2e-2)

