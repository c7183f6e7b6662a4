from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from grassnp.manifolds import random_point
from grassnp.poly import (
    PolyError, SparsePoly, check_invariance, compose_affine_matrix, substitute_corner,
    substitute_gram, symmetric_matrix_poly,
)


def V(i, j, shape, sym=False):
    return SparsePoly.var(i, j, shape, sym)


@st.composite
def polys(draw, n=3, cols=None, symmetric=False, max_deg=4, max_terms=6):
    cols = n if cols is None else cols
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        deg = draw(st.integers(0, max_deg))
        mono = []
        for _ in range(deg):
            i = draw(st.integers(1, n))
            j = draw(st.integers(1, cols))
            if symmetric and i > j:
                i, j = j, i
            mono.append(((i, j), 1))
        num = draw(st.integers(-20, 20))
        den = draw(st.integers(1, 7))
        terms[tuple(mono)] = terms.get(tuple(mono), 0) + Fraction(num, den)
    return SparsePoly((n, cols), terms, symmetric)


# -- evaluation ----------------------------------------------------------------

def test_eval_float_examples():
    x1, x2 = V(1, 1, (2, 1)), V(2, 1, (2, 1))
    assert (x1**2 + x2**2).eval_float([3.0, 4.0]) == 25.0
    assert SparsePoly.constant(Fraction(7, 2), (2, 2)).eval_float(np.zeros((2, 2))) == 3.5
    f = V(1, 1, (2, 2)) * V(2, 2, (2, 2))
    assert f.eval_float(np.eye(2)) == 1.0


def test_eval_exact_examples():
    s = (2, 2)
    f = V(1, 1, s) * V(2, 2, s) + V(1, 2, s) * V(2, 1, s)
    assert f.eval_exact(np.ones((2, 2), dtype=int).astype(object)) == 2
    x = V(1, 1, (1, 1))
    assert (x**3).eval_exact([[Fraction(2, 3)]]) == Fraction(8, 27)
    big = x * 10**6 + 10**12
    assert big.eval_exact([[10**30]]) == 10**36 + 10**12


def test_shape_mismatch_is_an_error():
    f = V(1, 1, (2, 2))
    with pytest.raises(PolyError):
        f.eval_float(np.eye(3))
    with pytest.raises(PolyError):
        SparsePoly((2, 2), {(((3, 1), 1),): 1})
    with pytest.raises(PolyError):
        f + V(1, 1, (3, 3))


def test_symmetric_variables_fold():
    s = (2, 2)
    f = V(1, 2, s, True) + V(2, 1, s, True)
    assert f == V(1, 2, s, True) * 2
    assert f.eval_float(np.array([[0, 3.0], [3.0, 0]])) == 6.0


def test_degree_and_homogeneity():
    x = V(1, 1, (2, 1))
    assert SparsePoly.zero((2, 1)).degree() == -1
    assert (x**3 + x).degree() == 3
    assert (x**3).is_homogeneous(3)
    assert not (x**3 + x).is_homogeneous()


def test_json_round_trip_keeps_strings():
    s = (3, 3)
    f = V(1, 2, s, True) * Fraction(10**20, 3) - V(3, 3, s, True) ** 2
    d = f.to_json_dict()
    assert all(isinstance(t["num"], str) and isinstance(t["den"], str) for t in d["terms"])
    assert SparsePoly.from_json_dict(d) == f
    with pytest.raises(PolyError):
        SparsePoly.from_json_dict({"shape": [2, 2], "terms": [{"m": [[1]], "num": "1"}]})


@settings(max_examples=80, deadline=None)
@given(polys(), polys())
def test_add_then_subtract_restores_terms(f, g):
    assert dict((f + g - g).terms) == dict(f.terms)


@settings(max_examples=60, deadline=None)
@given(polys(max_deg=3), st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5),
                                  min_size=9, max_size=9))
def test_exact_and_float_evaluation_agree(f, entries):
    X = np.array(entries, dtype=object).reshape(3, 3)
    exact = f.eval_exact(X)
    assert abs(float(exact) - f.eval_float(X.astype(float))) <= 1e-9 * (1 + abs(float(exact)))


@settings(max_examples=60, deadline=None)
@given(polys(max_deg=3), polys(max_deg=2))
def test_product_evaluates_to_product(f, g):
    X = np.random.default_rng(0).standard_normal((3, 3))
    lhs = (f * g).eval_float(X)
    rhs = f.eval_float(X) * g.eval_float(X)
    assert abs(lhs - rhs) <= 1e-8 * (1 + abs(rhs))


# -- compiled evaluation and gradients ---------------------------------------------

@settings(max_examples=60, deadline=None)
@given(polys(n=3, cols=2, max_deg=4))
def test_compiled_values_match_direct(f):
    rng = np.random.default_rng(1)
    X = rng.standard_normal((4, 3, 2))
    vals, grads = f.compile().value_and_grad(X)
    direct = [f.eval_float(x) for x in X]
    assert np.allclose(vals, direct, rtol=1e-12, atol=1e-12)
    assert np.allclose(f.compile().value(X), direct, rtol=1e-12, atol=1e-12)
    assert grads.shape == X.shape


@settings(max_examples=60, deadline=None)
@given(polys(n=3, cols=2, max_deg=4))
def test_compiled_gradient_matches_exact_derivative(f):
    X = np.random.default_rng(2).standard_normal((3, 2))
    _, g = f.compile().value_and_grad(X[None])
    for i in range(3):
        for j in range(2):
            want = f.diff((i + 1, j + 1)).eval_float(X)
            assert abs(g[0, i, j] - want) <= 1e-9 * (1 + abs(want))


def test_compiled_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    s = (3, 3)
    f = V(1, 1, s) ** 3 * V(2, 3, s) - V(3, 2, s) * V(1, 2, s) ** 2 + 5
    X = rng.standard_normal(s)
    _, g = f.compile().value_and_grad(X[None])
    h = 1e-6
    for i in range(3):
        for j in range(3):
            E = np.zeros(s)
            E[i, j] = h
            fd = (f.eval_float(X + E) - f.eval_float(X - E)) / (2 * h)
            assert abs(fd - g[0, i, j]) <= 1e-6 * (1 + abs(fd))


def test_compiled_zero_polynomial():
    vals, grads = SparsePoly.zero((2, 2)).compile().value_and_grad(np.ones((3, 2, 2)))
    assert not vals.any() and not grads.any()


# -- substitutions --------------------------------------------------------------

def test_substitute_gram_examples():
    f = V(1, 1, (4, 4), True)
    assert substitute_gram(f, 2) == V(1, 1, (4, 2)) ** 2 + V(1, 2, (4, 2)) ** 2
    assert substitute_gram(V(1, 2, (2, 2), True), 1) == V(1, 1, (2, 1)) * V(2, 1, (2, 1))


def test_substitute_corner_examples():
    n, k = 4, 2
    tr = sum((V(i, i, (n, n), True) for i in range(1, n + 1)), SparsePoly.zero((n, n), True))
    g = substitute_corner(tr, k)
    want = sum((V(i, j, (n, n)) ** 2 for i in range(1, n + 1) for j in range(1, k + 1)),
               SparsePoly.zero((n, n)))
    assert g == want
    Q = random_point("orthogonal", n, seed=4).Q
    assert abs(g.eval_float(Q) - k) < 1e-12
    assert substitute_corner(V(1, 1, (2, 2)), 1) == V(1, 1, (2, 2)) ** 2


@pytest.mark.parametrize("symmetric", [True, False])
def test_pullbacks_commute_with_evaluation(symmetric):
    rng = np.random.default_rng(5)
    for trial in range(10):
        n, k = int(rng.integers(2, 6)), int(rng.integers(1, 4))
        k = min(k, n)
        terms = {}
        for _ in range(6):
            deg = int(rng.integers(1, 5))
            mono = []
            for _ in range(deg):
                i, j = (int(v) for v in rng.integers(1, n + 1, size=2))
                if symmetric:
                    i, j = min(i, j), max(i, j)
                mono.append(((i, j), 1))
            terms[tuple(mono)] = int(rng.integers(-4, 5))
        f = SparsePoly((n, n), terms, symmetric)
        g, h = substitute_gram(f, k), substitute_corner(f, k)
        for s in range(10):
            Y = random_point("stiefel", n, k, seed=100 * trial + s).Y
            Q = random_point("orthogonal", n, seed=100 * trial + s).Q
            assert abs(g.eval_float(Y) - f.eval_float(Y @ Y.T)) <= 1e-10
            Qk = Q[:, :k]
            assert abs(h.eval_float(Q) - f.eval_float(Qk @ Qk.T)) <= 1e-10


def test_gram_degree_doubles_and_terms_repeat():
    n, k = 3, 2
    f = V(1, 2, (n, n), True) * V(2, 3, (n, n), True)
    g = substitute_gram(f, k)
    assert g.degree() == 4
    # one degree-2 monomial expands into k^2 monomials with no cancellation here
    assert len(g.terms) == k**2


def test_compose_affine_examples():
    s = (2, 2)
    f = V(1, 1, s)
    g = compose_affine_matrix(f, Fraction(1, 2), Fraction(1, 2))
    assert g == V(1, 1, s) * Fraction(1, 2) + Fraction(1, 2)
    q = V(1, 2, s) * V(2, 1, s) + V(1, 1, s) ** 2
    assert compose_affine_matrix(q, 1, 0) == q
    with pytest.raises(PolyError):
        compose_affine_matrix(f, 0, 1)


@settings(max_examples=40, deadline=None)
@given(polys(n=2, max_deg=3),
       st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(lambda x: x != 0),
       st.fractions(min_value=-3, max_value=3, max_denominator=4))
def test_compose_affine_inverts_exactly(f, s, t):
    g = compose_affine_matrix(f, s, t)
    assert compose_affine_matrix(g, 1 / s, -t / s) == f


def test_symmetric_matrix_poly_agrees_on_symmetric_points():
    s = (3, 3)
    f = V(1, 2, s) * V(2, 1, s) + V(3, 1, s)
    g = symmetric_matrix_poly(f)
    A = np.random.default_rng(6).standard_normal(s)
    A = A + A.T
    assert abs(f.eval_float(A) - g.eval_float(A)) < 1e-12


# -- invariance sampler ------------------------------------------------------------

def test_gram_pullback_is_orthogonally_invariant():
    g = substitute_gram(V(1, 1, (4, 4), True), 2)
    res = check_invariance(g, "right-O(k)", seed=1)
    assert res.invariant and res.max_deviation < 1e-12


def test_single_entry_is_not_invariant():
    res = check_invariance(V(1, 1, (4, 2)), "right-O(k)", seed=1)
    assert not res.invariant


def test_leading_block_determinant_is_p1_invariant():
    n, k = 4, 2
    s = (n, n)
    det = V(1, 1, s) * V(2, 2, s) - V(1, 2, s) * V(2, 1, s)
    assert check_invariance(det, "right-P1(k,n)", k=k, seed=2).invariant
    # a general parabolic element rescales the determinant
    assert not check_invariance(det, "right-P(k,n)", k=k, seed=2).invariant


def test_projection_polynomial_is_block_invariant():
    n, k = 4, 2
    # the (1,1) entry of Q diag(I, 0) Q^T is invariant under O(k) x O(n-k)
    f = substitute_corner(V(1, 1, (n, n), True), k)
    assert check_invariance(f, "block-O(k)xO(n-k)", k=k, seed=3).invariant


def test_unknown_action():
    with pytest.raises(PolyError):
        check_invariance(V(1, 1, (2, 2)), "left-GL")
