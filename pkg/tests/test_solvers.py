import csv
import io
import math
from fractions import Fraction

import numpy as np
import pytest

from grassnp.graphs import clique_number, generate
from grassnp.manifolds import random_point, validate
from grassnp.poly import SparsePoly
from grassnp.reductions import (
    ReductionInstance, clique_number_form, copositivity_form, density_qp_form, orthogonal_pullback,
    sphere_instance,
)
from grassnp.solvers import (
    MAX_GRID_M, MAX_GRID_N, SolverError, SpdSup, copositive_brute, exact_ms_value,
    linear_coefficients, lp_grassmann, lp_spd_sup, lp_stiefel, multistart_rgd,
    qp_sphere_homogeneous, solve_closed_form,
)
from grassnp.verify import HORN_MATRIX

K3 = generate("complete", 3)


# -- closed-form linear problems -------------------------------------------------

def test_lp_stiefel_examples():
    A = np.eye(4)[:, :2]
    v, X = lp_stiefel(A)
    assert v == pytest.approx(2.0, abs=1e-12) and np.allclose(X.Y, A, atol=1e-12)
    v, X = lp_stiefel(np.zeros((3, 2)))
    assert v == 0.0 and validate(X) == []
    with pytest.raises(SolverError):
        lp_stiefel(np.ones((2, 3)))


def test_lp_grassmann_examples():
    v, P = lp_grassmann(np.diag([3.0, 2.0, 1.0]), 2)
    assert v == pytest.approx(5.0, abs=1e-12)
    assert np.allclose(P.P, np.diag([1.0, 1.0, 0.0]), atol=1e-12)
    S = np.array([[0.0, 2.0], [-2.0, 0.0]])
    assert lp_grassmann(S, 1)[0] == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(SolverError):
        lp_grassmann(np.eye(3), 4)


@pytest.mark.parametrize("seed", range(10))
def test_lp_dominates_random_feasible_points(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    k = int(rng.integers(1, n + 1))
    A = rng.standard_normal((n, k))
    v, X = lp_stiefel(A)
    assert validate(X, tau_mem=1e-10) == []
    assert abs(np.trace(A.T @ X.Y) - v) <= 1e-9 * (1 + np.linalg.norm(A))
    Ys = np.stack([random_point("stiefel", n, k, seed=1000 * seed + s).Y for s in range(300)])
    assert np.einsum("ij,sij->s", A, Ys).max() <= v + 1e-9
    B = rng.standard_normal((n, n))
    v, P = lp_grassmann(B, k)
    assert validate(P, tau_mem=1e-10) == []
    assert abs(np.trace(B.T @ P.P) - v) <= 1e-9 * (1 + np.linalg.norm(B))
    Ps = np.stack([random_point("projection", n, k, seed=1000 * seed + s).P for s in range(300)])
    assert np.einsum("ij,sij->s", B, Ps).max() <= v + 1e-9


def test_lp_spd_sup_examples():
    assert lp_spd_sup(-np.eye(3)) is SpdSup.ZERO
    assert lp_spd_sup(np.eye(3)) is SpdSup.PLUS_INFINITY
    assert lp_spd_sup(np.array([[0.0, 1.0], [-1.0, 0.0]])) is SpdSup.ZERO
    with pytest.raises(SolverError):
        lp_spd_sup(np.ones((2, 3)))


def test_qp_sphere_examples():
    v, x = qp_sphere_homogeneous(np.diag([2.0, 1.0]))
    assert v == 2.0 and np.array_equal(x, [1.0, 0.0])
    v, x = qp_sphere_homogeneous(np.eye(3))
    assert v == pytest.approx(1.0) and abs(np.linalg.norm(x) - 1) < 1e-15
    with pytest.raises(SolverError, match="symmetric"):
        qp_sphere_homogeneous(np.array([[0.0, 1.0], [0.0, 0.0]]))
    rng = np.random.default_rng(3)
    A = rng.standard_normal((5, 5))
    A = A + A.T
    v, _ = qp_sphere_homogeneous(A)
    xs = rng.standard_normal((1000, 5))
    xs /= np.linalg.norm(xs, axis=1, keepdims=True)
    assert np.einsum("si,ij,sj->s", xs, A, xs).max() <= v + 1e-12


def test_exact_ms_values():
    assert exact_ms_value(generate("complete", 4), 2) == 3
    assert exact_ms_value(generate("complete", 2), 1) == Fraction(1, 2)
    assert exact_ms_value(generate("cycle", 5), 2) == 2
    with pytest.raises(SolverError, match="omega < k"):
        exact_ms_value(generate("cycle", 5), 3)


def test_closed_form_reports():
    n, k = 3, 2
    f = SparsePoly((n, n), {(((1, 1), 1),): 3, (((2, 2), 1),): 2, (((3, 3), 1),): 1,
                            (((1, 2), 1),): 4}, symmetric=True)
    inst = ReductionInstance("grassmann", n, k, f)
    A = linear_coefficients(inst)
    assert np.array_equal(A, [[3, 2, 0], [2, 2, 0], [0, 0, 1]])
    rep = solve_closed_form(inst)
    assert rep.best_value == pytest.approx(lp_grassmann(A, k)[0])
    sph = sphere_instance(SparsePoly.var(1, 1, (2, 1)) ** 2 * 2 + SparsePoly.var(2, 1, (2, 1)) ** 2)
    rep = solve_closed_form(sph)
    assert rep.best_value == pytest.approx(2.0) and rep.best_point.Y[0, 0] == pytest.approx(1.0)
    spd = ReductionInstance("spd", 2, 2, SparsePoly.var(1, 1, (2, 2), True) * -1)
    assert solve_closed_form(spd).best_value is SpdSup.ZERO
    assert solve_closed_form(spd).to_json_dict()["best_value"] == {"tag": "0"}
    with pytest.raises(SolverError):
        solve_closed_form(density_qp_form(K3))
    with pytest.raises(SolverError, match="linear"):
        solve_closed_form(clique_number_form(K3, 2))


# -- copositivity grid -------------------------------------------------------------

def test_grid_identity_minimum():
    for n, m in ((2, 4), (3, 6), (4, 8)):
        r = copositive_brute(np.eye(n, dtype=int).tolist(), m)
        assert r.copositive_on_grid and r.minimum == Fraction(1, n)
        assert r.argmin == (Fraction(1, n),) * n
        assert r.points_checked == math.comb(m + n - 1, n - 1)


def test_grid_finds_negative_witness():
    r = copositive_brute([[0, -1], [-1, 0]], 10)
    assert not r.copositive_on_grid
    assert r.counterexample == (Fraction(1, 2), Fraction(1, 2))
    assert r.minimum == Fraction(-1, 2)


def test_horn_matrix_is_clean_on_the_grid():
    r = copositive_brute(HORN_MATRIX, 20)
    assert r.copositive_on_grid and r.minimum == 0 and r.counterexample is None


def test_grid_exact_rational_entries():
    r = copositive_brute([[Fraction(1, 3), Fraction(-1, 3)], [Fraction(-1, 3), Fraction(1, 3)]], 4)
    assert r.minimum == 0 and r.copositive_on_grid


def test_grid_limits_and_shape():
    with pytest.raises(SolverError, match="limits"):
        copositive_brute(np.eye(MAX_GRID_N + 1, dtype=int).tolist(), 2)
    with pytest.raises(SolverError, match="limits"):
        copositive_brute([[1]], MAX_GRID_M + 1)
    with pytest.raises(SolverError, match="symmetric"):
        copositive_brute([[1, 2], [0, 1]], 2)


def test_sampled_nonnegativity_implies_grid_copositivity():
    rng = np.random.default_rng(7)
    agreed = 0
    for trial in range(60):
        n = int(rng.integers(2, 4))
        B = rng.integers(-2, 4, size=(n, n))
        A = (B + B.T)
        f = copositivity_form(A.tolist()).objective.compile()
        Xs = np.stack([random_point("spd", n, seed=10_000 * trial + s).A for s in range(2000)])
        if f.value(Xs).min() >= -1e-9:
            assert copositive_brute(A.tolist(), 20).copositive_on_grid
            agreed += 1
    assert agreed > 0


# -- multistart ascent -----------------------------------------------------------

def test_rgd_reaches_clique_value():
    rep = multistart_rgd(clique_number_form(K3, 2), starts=20, iters=500, seed=0)
    assert abs(rep.best_value - 8 / 3) <= 1e-6
    assert rep.best_value <= 8 / 3 + 1e-6
    assert validate(rep.best_point, tau_mem=1e-8) == []
    assert validate(rep.best_projection, tau_mem=1e-8) == []
    assert rep.best_value == max(r.final_value for r in rep.per_start)
    assert rep.gap == pytest.approx(8 / 3 - rep.best_value)


def test_rgd_constant_objective_converges_at_start():
    n, k = 4, 2
    tr = sum((SparsePoly.var(i, i, (n, n), True) for i in range(1, n + 1)),
             SparsePoly.zero((n, n), True))
    rep = multistart_rgd(ReductionInstance("grassmann", n, k, tr), starts=3, iters=10)
    assert rep.best_value == pytest.approx(k, abs=1e-12)
    assert all(r.iterations == 0 and r.status == "converged" for r in rep.per_start)


def test_rgd_sphere_square():
    rep = multistart_rgd(sphere_instance(SparsePoly.var(1, 1, (3, 1)) ** 2), starts=4, iters=200)
    assert rep.best_value == pytest.approx(1.0, abs=1e-12)
    assert abs(abs(rep.best_point.Y[0, 0]) - 1) <= 1e-8


def test_rgd_traces_are_monotone():
    g = generate("gnp", 6, Fraction(1, 2), seed=5)
    rep = multistart_rgd(clique_number_form(g, 2), starts=6, iters=100, seed=3, record_trace=True)
    for tr in rep.traces:
        assert all(b >= a for a, b in zip(tr, tr[1:]))


def test_rgd_minimization_descends():
    f = SparsePoly.var(1, 1, (3, 1)) ** 2
    inst = ReductionInstance("sphere", 3, 1, f, "minimize")
    rep = multistart_rgd(inst, starts=4, iters=200, record_trace=True)
    assert rep.best_value == pytest.approx(0.0, abs=1e-10)
    for tr in rep.traces:
        assert all(b <= a for a, b in zip(tr, tr[1:]))


def test_rgd_is_deterministic_and_seeds_starts():
    inst = clique_number_form(generate("cycle", 5), 2)
    a = multistart_rgd(inst, starts=5, iters=50, seed=42)
    b = multistart_rgd(inst, starts=5, iters=50, seed=42)
    assert a.to_json_dict() == b.to_json_dict()
    assert [r.seed for r in a.per_start] == [42 ^ s for s in range(5)]
    assert a.to_csv() == b.to_csv()
    rows = list(csv.DictReader(io.StringIO(a.to_csv())))
    assert len(rows) == 5 and float(rows[0]["final_value"]) == a.per_start[0].final_value


def test_rgd_orthogonal_model():
    rep = multistart_rgd(orthogonal_pullback(clique_number_form(K3, 2)), starts=10, iters=300)
    assert abs(rep.best_value - 8 / 3) <= 1e-6
    assert validate(rep.best_point, tau_mem=1e-8) == []


def test_rgd_rejects_unsupported_models():
    with pytest.raises(SolverError, match="does not support"):
        multistart_rgd(density_qp_form(K3))
    with pytest.raises(SolverError):
        multistart_rgd(clique_number_form(K3, 2), starts=0)


@pytest.mark.parametrize("seed", range(4))
def test_rgd_never_beats_the_optimum(seed):
    g = generate("gnp", 6, Fraction(1, 2), seed=seed)
    for k in range(1, clique_number(g) + 1):
        inst = clique_number_form(g, k)
        rep = multistart_rgd(inst, starts=8, iters=200, seed=seed)
        assert rep.best_value <= float(inst.theoretical_value) + 1e-6
