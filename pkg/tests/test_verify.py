import pytest

from grassnp.reductions import FeatureDisabled
from grassnp.verify import SUITES, SuiteResult, run_suite, small_graphs

QUICK = {
    "roundtrips": {"n_points": 10},
    "motzkin-straus": {"nmax": 4, "n_random": 6, "starts": 6, "iters": 200, "reach_nmax": 3},
    "clique-decision": {"nmax": 4, "n_random": 6, "starts": 6, "iters": 200},
    "schur-horn": {"nmax": 5, "per_case": 10},
    "lp-closed-form": {"n_matrices": 5, "n_samples": 100},
    "copositivity": {"n_points": 1000},
    "pullbacks": {"n_polys": 3, "n_points": 10},
}


@pytest.mark.parametrize("name", sorted(QUICK))
def test_suites_pass_at_small_scale(name):
    res = run_suite(name, seed=3, **QUICK[name])
    assert res.passed, res.failures[:3]
    assert res.cases > 0
    d = res.to_json_dict()
    assert d["suite"] == name and d["passed"] is True and d["anchor"]


def test_nesterov_suite_is_gated():
    with pytest.raises(FeatureDisabled):
        run_suite("nesterov", seed=1)
    res = run_suite("nesterov", seed=1, nesterov=True, nmax=3)
    assert res.passed, res.failures


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("everything")
    assert set(QUICK) | {"nesterov"} == set(SUITES)


def test_suite_result_records_failures():
    res = SuiteResult("demo", "none")
    res.check(True, 1e-12, "fine")
    res.check(False, 0.5, "broken case")
    assert not res.passed and res.cases == 2
    assert res.failures == ["broken case"] and res.max_residual == 0.5


def test_small_graph_family_is_deduplicated():
    gs = small_graphs(6, 50)
    assert len({(g.n, g.edges) for g in gs}) == len(gs) == 52
    assert max(g.n for g in gs) == 6
