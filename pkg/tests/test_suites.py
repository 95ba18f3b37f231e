import numpy as np
import pytest

from banach_ortho import cli, suites
from banach_ortho.errors import DomainError
from banach_ortho.orthogonality import bj_orthogonal
from banach_ortho.spaces import PNormSpace
from banach_ortho.verdicts import encode


def _gen(rng, n):
    out = []
    for k in range(n):
        x = rng.standard_normal(2)
        y = rng.standard_normal(2)
        if k % 2:
            y = np.array([-x[1], x[0]]) * rng.uniform(0.5, 2)
        out.append({"x": x.tolist(), "y": y.tolist()})
    return out


def _buggy_check(instances, tol):
    s = PNormSpace("real", 2, 2)
    res = []
    for inst in instances:
        x, y = np.array(inst["x"]), np.array(inst["y"])
        truth = abs(x @ y) <= 1e-12 * np.linalg.norm(x) * np.linalg.norm(y)
        # injected bug: tolerance inflated a millionfold
        got = bj_orthogonal(s, x, y, tol * 1e6).decision
        res.append({"truth": bool(truth), "got": bool(got), "ok": bool(truth == got)})
    return res


def _summ(results, tol):
    bad = sum(not r["ok"] for r in results)
    return bad == 0, {"instances": len(results), "failures": bad}


@pytest.fixture
def buggy():
    suites.add_property(suites.Property("buggy_tolerance", _gen, _buggy_check, _summ, 40))
    yield "buggy_tolerance"
    suites.REGISTRY.pop("buggy_tolerance")


def test_harness_catches_and_replays(buggy):
    rep = suites.run_property(buggy, seed=3, tol=0.05)
    assert not rep["passed"] and rep["failed_instances"] > 0
    problem = rep["first_failure"]
    assert problem["kind"] == "check" and problem["seed"] == 3
    replay = cli.run_problem(problem)
    assert replay["result"] == rep["first_failure_result"]
    assert replay["result"]["ok"] is False


def test_harness_passes_with_correct_tolerance(buggy):
    rep = suites.run_property(buggy, seed=3, tol=1e-13)
    assert rep["passed"] and rep["first_failure"] is None


def test_unknown_suite_and_property():
    with pytest.raises(DomainError):
        suites.run_suite("nonsense", 1)
    with pytest.raises(DomainError):
        suites.run_property("nonsense", 1)


def test_suite_membership():
    assert set(suites.SUITES) == {"paper-equivalences", "invariants"}
    for names in suites.SUITES.values():
        assert all(n in suites.REGISTRY for n in names)


def test_instances_depend_only_on_seed_and_name():
    prop = suites.REGISTRY["james_equivalence"]
    a = prop.generate(suites._rng(5, "james_equivalence"), 6)
    b = prop.generate(suites._rng(5, "james_equivalence"), 6)
    c = prop.generate(suites._rng(6, "james_equivalence"), 6)
    assert cli.dumps(a) == cli.dumps(b) != cli.dumps(c)


def test_invariants_suite_small_budget_deterministic():
    a = cli.dumps(cli.run_suite_report("invariants", 2, budget=3))
    b = cli.dumps(cli.run_suite_report("invariants", 2, budget=3))
    assert a == b
    assert '"failed": 0' in a


def test_each_property_replays_an_instance():
    for name in suites.SUITES["paper-equivalences"]:
        if name in ("numerical_index_constants", "obstruction_chain"):
            continue
        inst = suites.REGISTRY[name].generate(suites._rng(1, name), 1)[0]
        direct = suites.check_instance(name, inst)
        replay = cli.run_problem(suites.problem_for(name, inst, 1, suites.DEFAULT_TOL))
        assert replay["result"] == encode(direct)
