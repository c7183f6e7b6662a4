"""Named verification suites: exact identities and numerical cross-checks at small scale.

Each suite returns a :class:`SuiteResult` with case counts, the largest
residual seen, and a description of every failure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import conversions as cv
from .graphs import clique_number, find_k_clique, generate, max_clique, stability_number
from .manifolds import QuotientPoint, random_point, validate
from .poly import SparsePoly, substitute_corner, substitute_gram
from .reductions import (
    FeatureDisabled, clique_decision_form, clique_number_form, copositivity_form,
    density_qp_form, motzkin_straus_value, nesterov_cubic, simplex_ms_form,
)
from .schur_horn import lift_diagonal
from .solvers import (SpdSup, copositive_brute, lp_grassmann, lp_spd_sup, lp_stiefel,
                      multistart_rgd)

SUITES = ("roundtrips", "motzkin-straus", "clique-decision", "schur-horn", "lp-closed-form",
          "copositivity", "pullbacks", "nesterov")

# a copositive matrix that is neither PSD nor entrywise nonnegative
HORN_MATRIX = [[1, -1, 1, 1, -1],
               [-1, 1, -1, 1, 1],
               [1, -1, 1, -1, 1],
               [1, 1, -1, 1, -1],
               [-1, 1, 1, -1, 1]]


@dataclass
class SuiteResult:
    suite: str
    anchor: str
    cases: int = 0
    failures: list = field(default_factory=list)
    max_residual: float = 0.0

    @property
    def passed(self):
        return not self.failures

    def check(self, ok, residual, what):
        self.cases += 1
        if residual is not None and math.isfinite(residual):
            self.max_residual = max(self.max_residual, float(residual))
        if not ok:
            self.failures.append(what)

    def to_json_dict(self):
        return {"suite": self.suite, "anchor": self.anchor, "passed": self.passed,
                "cases": self.cases, "failed": len(self.failures),
                "max_residual": self.max_residual, "failures": self.failures[:50]}


# -- shared fixtures ----------------------------------------------------------------

def small_graphs(nmax=6, n_random=50):
    """Complete, cycle, path and empty graphs up to ``nmax`` plus seeded ``G(n, 1/2)``.

    Random graph ``s`` has ``n = 2 + (s mod (nmax - 1))`` vertices and seed
    ``s``. Duplicates are dropped, first occurrence kept.
    """
    out = []
    for n in range(1, nmax + 1):
        out.append(generate("complete", n))
        if n >= 3:
            out.append(generate("cycle", n))
        out.append(generate("path", n))
        out.append(generate("empty", n))
    for s in range(n_random):
        out.append(generate("gnp", 2 + s % max(nmax - 1, 1), Fraction(1, 2), seed=s))
    seen, unique = set(), []
    for g in out:
        key = (g.n, g.edges)
        if key not in seen:
            seen.add(key)
            unique.append(g)
    return unique


def uniform_clique_diagonal(g, k):
    """``k/omega`` on a maximum clique, 0 elsewhere."""
    omega = clique_number(g)
    clique = set(max_clique(g))
    return [Fraction(k, omega) if v in clique else Fraction(0) for v in range(1, g.n + 1)]


def random_hypersimplex_point(rng, n, k):
    """Dirichlet mixture of random vertices of the hypersimplex."""
    m = n + 1
    w = rng.dirichlet(np.ones(m))
    d = np.zeros(n)
    for wi in w:
        d[rng.choice(n, size=k, replace=False)] += wi
    return np.clip(d, 0.0, 1.0)


def random_quadratic(rng, n, symmetric=True, n_terms=8):
    """Random homogeneous quadratic with small integer coefficients in an ``n x n`` variable."""
    terms = {}
    for _ in range(n_terms):
        a = (int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1)))
        b = (int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1)))
        if symmetric:
            a, b = tuple(sorted(a)), tuple(sorted(b))
        mono = ((a, 2),) if a == b else tuple(sorted(((a, 1), (b, 1))))
        terms[mono] = terms.get(mono, 0) + int(rng.integers(-5, 6))
    return SparsePoly((n, n), terms, symmetric=symmetric)


# -- suites ------------------------------------------------------------------------

def suite_roundtrips(seed=0, n_points=50, tol=1e-8):
    res = SuiteResult("roundtrips", "Prop 6.1, Lemma 7.4, Lemma 8.3")
    rng = np.random.default_rng(seed)

    def dims(square=False):
        n = int(rng.integers(2, 7))
        k = n if square else int(rng.integers(1, n))
        return n, k, int(rng.integers(0, 2**32))

    def rel(A, B):
        A, B = np.asarray(A, float), np.asarray(B, float)
        return float(np.abs(A - B).max()) / max(1.0, float(np.abs(A).max()))

    def coset_case(name, tag, fwd, back):
        for _ in range(n_points):
            n, k, s = dims(tag == "GL/O")
            x = random_point(tag, n, k, seed=s)
            y = back(fwd(x))
            res.check(cv.same_coset(x, y, tol) and not validate(fwd(x), tau_mem=1e-8),
                      None, f"{name}: coset round trip failed (n={n}, k={k}, seed={s})")

    def point_case(name, model, fwd, back, extract):
        for _ in range(n_points):
            n, k, s = dims()
            x = random_point(model, n, k, seed=s)
            y = back(fwd(x))
            r = rel(extract(x), extract(y))
            res.check(r <= tol, r, f"{name}: residual {r:.3e} (n={n}, k={k}, seed={s})")

    coset_case("phi1_inv . phi1", "O/OxO", cv.phi1, cv.phi1_inv)
    coset_case("phi2_inv . phi2", "V/O", cv.phi2, cv.phi2_inv)
    coset_case("phi4_inv . phi4", "V/O", cv.phi4, cv.phi4_inv)
    coset_case("phi5_inv . phi5", "O/OxO", cv.phi5, cv.phi5_inv)
    coset_case("psi1_inv . psi1", "O/O", cv.psi1, cv.psi1_inv)
    coset_case("psi2_inv . psi2", "GL/P1", cv.psi2, cv.psi2_inv)
    coset_case("rho_inv . rho", "GL/O", cv.rho, cv.rho_inv)
    coset_case("phi1 . phi1_inv", "V/O", cv.phi1_inv, cv.phi1)
    coset_case("phi4 . phi4_inv", "St/GL", cv.phi4_inv, cv.phi4)
    coset_case("phi5 . phi5_inv", "GL/P", cv.phi5_inv, cv.phi5)
    point_case("phi2 . phi2_inv", "projection", cv.phi2_inv, cv.phi2, lambda p: p.P)
    point_case("psi1 . psi1_inv", "stiefel", cv.psi1_inv, cv.psi1, lambda p: p.Y)
    point_case("psi2 . psi2_inv", "fullrank", cv.psi2_inv, cv.psi2, lambda p: p.S)
    point_case("rho . rho_inv", "spd", cv.rho_inv, cv.rho, lambda p: p.A)
    ab_choices = [(1, -1), (1, 0), (2, 5), (Fraction(1, 3), Fraction(-7, 2))]
    for i in range(n_points):
        a, b = ab_choices[i % len(ab_choices)]
        n, k, s = dims()
        p = random_point("projection", n, k, seed=s)
        q = cv.phi3_inv(cv.phi3(p, a, b))
        r = rel(p.P, q.P)
        bad = validate(cv.phi3(p, a, b), tau_mem=1e-8)
        res.check(r <= tol and not bad, r, f"phi3 round trip (a,b)=({a},{b}): residual {r:.3e}")

    # two O(3) representatives of one O(2)xO(1) coset
    c, s = 0.6, 0.8
    Q1 = np.array([[c, 0, -s], [0, 1, 0], [s, 0, c]])
    Q2 = np.array([[c**3 - c * s**2, -2 * c**2 * s, -s],
                   [2 * c * s, c**2 - s**2, 0],
                   [c**2 * s - s**3, -2 * c * s**2, c]])
    q1, q2 = QuotientPoint(Q1, "O/OxO", 3, 2), QuotientPoint(Q2, "O/OxO", 3, 2)
    ok = cv.same_coset(q1, q2, tol) and cv.same_coset(cv.phi1(q1), cv.phi1(q2), tol)
    res.check(ok, None, "the two O(3) representatives at (c, s) = (0.6, 0.8) differ")
    return res


def _rgd_cache():
    cache = {}

    def run(inst, key, starts, iters, seed):
        full = (key, starts, iters, seed)
        if full not in cache:
            cache[full] = multistart_rgd(inst, starts, iters, seed)
        return cache[full]
    return run


def suite_motzkin_straus(seed=42, nmax=6, starts=20, iters=500, reach_nmax=5,
                         run_rgd=True, n_random=50):
    res = SuiteResult("motzkin-straus", "Prop 5.1, Prop 5.3, Cor 5.5")
    run = _rgd_cache()
    for g in small_graphs(nmax, n_random):
        omega = clique_number(g)
        for k in range(1, omega + 1):
            inst = clique_number_form(g, k)
            target = motzkin_straus_value(k, omega)
            x = uniform_clique_diagonal(g, k)
            simplex = simplex_ms_form(g, k)
            exact = simplex.objective.eval_exact(np.array(x, dtype=object))
            res.check(exact == target, float(abs(exact - target)),
                      f"simplex witness value {exact} != {target} (n={g.n}, k={k})")
            P = lift_diagonal(x, k).P
            r = abs(inst.objective.eval_float(P) - float(target))
            res.check(r <= 1e-9, r, f"lifted witness off by {r:.3e} (n={g.n}, k={k})")
            if run_rgd:
                rep = run(inst, (g.n, g.edges, k), starts, iters, seed)
                over = rep.best_value - float(target)
                res.check(over <= 1e-6, max(over, 0.0),
                          f"local search exceeded the optimum by {over:.3e} (n={g.n}, k={k})")
                if g.n <= reach_nmax:
                    miss = float(target) - rep.best_value
                    res.check(miss <= 1e-4, max(miss, 0.0),
                              f"local search missed the optimum by {miss:.3e} (n={g.n}, k={k})")
        dens = density_qp_form(g)
        x = uniform_clique_diagonal(g, 1)
        r = abs(dens.objective.eval_float(lift_diagonal(x, 1).P) - float(dens.theoretical_value))
        res.check(r <= 1e-9, r, f"density witness off by {r:.3e} (n={g.n})")
    return res


def suite_clique_decision(seed=42, nmax=6, starts=20, iters=500, run_rgd=True, n_random=50):
    res = SuiteResult("clique-decision", "Prop 4.1")
    run = _rgd_cache()
    for g in small_graphs(nmax, n_random):
        for k in range(1, g.n + 1):
            inst = clique_decision_form(g, k)
            clique = find_k_clique(g, k)
            if clique is not None:
                D = np.array([[Fraction(int(i == j and i + 1 in clique)) for j in range(g.n)]
                              for i in range(g.n)], dtype=object)
                val = inst.objective.eval_exact(D)
                res.check(val == k * k, float(abs(val - k * k)),
                          f"f(D) = {val} != {k * k} (n={g.n}, k={k})")
            elif run_rgd:
                bound = k * k - 1.0 / (g.n + 1) ** 2 + 1e-6
                rep = run(inst, (g.n, g.edges, k), starts, iters, seed)
                res.check(rep.best_value <= bound, max(rep.best_value - bound, 0.0),
                          f"no {k}-clique but local search reached {rep.best_value:.9f} "
                          f"> {bound:.9f} (n={g.n})")
    return res


def suite_schur_horn(seed=0, nmax=10, per_case=200):
    res = SuiteResult("schur-horn", "Prop 5.3")
    rng = np.random.default_rng(seed)
    for n in range(1, nmax + 1):
        for k in range(1, n + 1):
            for _ in range(per_case):
                d = random_hypersimplex_point(rng, n, k)
                P = lift_diagonal(d, k).P
                rd = float(np.abs(np.diag(P) - d).max())
                ev = np.sort(np.linalg.eigvalsh(P))[::-1]
                re = float(np.abs(ev - np.r_[np.ones(k), np.zeros(n - k)]).max())
                res.check(rd <= 1e-10 and re <= 1e-9, max(rd, re),
                          f"n={n}, k={k}: diagonal residual {rd:.2e}, spectrum residual {re:.2e}")
    return res


def suite_lp_closed_form(seed=0, n_matrices=50, n_samples=1000, nmax=8):
    res = SuiteResult("lp-closed-form", "Lemma 9")
    rng = np.random.default_rng(seed)
    for t in range(n_matrices):
        n = int(rng.integers(1, nmax + 1))
        k = int(rng.integers(1, n + 1))
        # Stiefel
        A = rng.standard_normal((n, k))
        val, X = lp_stiefel(A)
        feas = float(np.abs(X.Y.T @ X.Y - np.eye(k)).max())
        att = abs(float(np.trace(A.T @ X.Y)) - val)
        samples = np.stack([random_point("stiefel", n, k, seed=int(rng.integers(2**32))).Y
                            for _ in range(n_samples)])
        dom = float(np.max(np.einsum("ij,sij->s", A, samples)) - val)
        res.check(feas <= 1e-10 and att <= 1e-9 * (1 + np.linalg.norm(A)) and dom <= 1e-9,
                  max(feas, att, dom, 0.0), f"lp_stiefel case {t}: feas {feas:.2e}, "
                  f"attain {att:.2e}, dominance {dom:.2e}")
        # Grassmann
        A = rng.standard_normal((n, n))
        val, P = lp_grassmann(A, k)
        feas = max(float(np.abs(P.P @ P.P - P.P).max()), abs(np.trace(P.P) - k))
        att = abs(float(np.sum(A * P.P)) - val)
        Ys = np.stack([random_point("stiefel", n, k, seed=int(rng.integers(2**32))).Y
                       for _ in range(n_samples)])
        Ps = Ys @ np.swapaxes(Ys, 1, 2)
        dom = float(np.max(np.einsum("ij,sij->s", A, Ps)) - val)
        res.check(feas <= 1e-10 and att <= 1e-9 * (1 + np.linalg.norm(A)) and dom <= 1e-9,
                  max(feas, att, dom, 0.0), f"lp_grassmann case {t}: feas {feas:.2e}, "
                  f"attain {att:.2e}, dominance {dom:.2e}")
    for t in range(20):
        n = int(rng.integers(1, nmax + 1))
        G = rng.standard_normal((n, n))
        S = rng.standard_normal((n, n))
        skew = S - S.T
        neg = -(G @ G.T) / 2 + skew
        res.check(lp_spd_sup(neg) is SpdSup.ZERO, None, f"lp_spd_sup: NSD case {t} not 0")
        v = rng.standard_normal(n)
        pos = neg + (abs(np.linalg.eigvalsh(neg + neg.T)).max() + 1.0) * np.outer(v, v) / (v @ v)
        res.check(lp_spd_sup(pos) is SpdSup.PLUS_INFINITY, None,
                  f"lp_spd_sup: indefinite case {t} not +inf")
    return res


def suite_copositivity(seed=0, n_points=10_000, m=20):
    res = SuiteResult("copositivity", "Lemma 8.1")
    rng = np.random.default_rng(seed)
    mats = [HORN_MATRIX, [[-1 if i == j else 0 for j in range(4)] for i in range(4)],
            [[0, -1], [-1, 0]], np.eye(3, dtype=int).tolist()]
    for _ in range(3):
        n = int(rng.integers(2, 6))
        mats.append(rng.integers(-3, 4, size=(n, n)).tolist())
    for A in mats:
        inst = copositivity_form(A)
        n = inst.n
        cp = inst.objective.compile()
        Aflt = np.asarray(A, dtype=float)
        worst = 0.0
        for start in range(0, n_points, 1000):
            G = rng.standard_normal((1000, n, n))
            X = G @ np.swapaxes(G, 1, 2) + 1e-3 * np.eye(n)
            d = np.diagonal(X, axis1=1, axis2=2)
            ref = np.einsum("si,ij,sj->s", d, Aflt, d)
            got = cp.value(X)
            worst = max(worst, float(np.max(np.abs(got - ref) / np.maximum(1.0, np.abs(ref)))))
        res.check(worst <= 1e-10, worst, f"diag form mismatch {worst:.2e} for n={n}")
    # A = -I: X = I is a negative witness
    inst = copositivity_form([[-1 if i == j else 0 for j in range(3)] for i in range(3)])
    val = inst.objective.eval_exact(np.eye(3, dtype=int).astype(object))
    res.check(val < 0, None, f"A = -I: f(I) = {val} is not negative")
    verdict = copositive_brute(HORN_MATRIX, m)
    res.check(verdict.copositive_on_grid, None,
              f"Horn matrix: grid minimum {verdict.minimum} at m={m}")
    v2 = copositive_brute([[0, -1], [-1, 0]], 2)
    res.check(v2.counterexample == (Fraction(1, 2), Fraction(1, 2)) and v2.minimum == Fraction(-1, 2),
              None, f"[[0,-1],[-1,0]]: got {v2}")
    return res


def suite_pullbacks(seed=0, n_polys=20, n_points=100):
    res = SuiteResult("pullbacks", "Example 6.2, Thm 7.2")
    rng = np.random.default_rng(seed)
    for t in range(n_polys):
        n = int(rng.integers(1, 6))
        k = int(rng.integers(1, min(3, n) + 1))
        f = random_quadratic(rng, n, symmetric=bool(t % 2))
        g_st = substitute_gram(f, k).compile()
        g_or = substitute_corner(f, k).compile()
        Ys = np.stack([random_point("stiefel", n, k, seed=int(rng.integers(2**32))).Y
                       for _ in range(n_points)])
        Qs = np.stack([random_point("orthogonal", n, seed=int(rng.integers(2**32))).Q
                       for _ in range(n_points)])
        Ps = Ys @ np.swapaxes(Ys, 1, 2)
        Pq = Qs[:, :, :k] @ np.swapaxes(Qs[:, :, :k], 1, 2)
        fc = f.compile()
        r1 = float(np.abs(fc.value(Ps) - g_st.value(Ys)).max())
        r2 = float(np.abs(fc.value(Pq) - g_or.value(Qs)).max())
        res.check(r1 <= 1e-10, r1, f"gram pullback residual {r1:.2e} (n={n}, k={k})")
        res.check(r2 <= 1e-10, r2, f"corner pullback residual {r2:.2e} (n={n}, k={k})")
    return res


def suite_nesterov(seed=42, enabled=False, nmax=5, starts=20, iters=500, tol=5e-3):
    if not enabled:
        raise FeatureDisabled("the nesterov suite is feature-gated and not enabled")
    res = SuiteResult("nesterov", "Thm 7.2")
    for g in small_graphs(nmax, n_random=10):
        inst = nesterov_cubic(g, enabled=True)
        target = float(inst.theoretical_value)
        rep = multistart_rgd(inst, starts, iters, seed)
        r = abs(rep.best_value - target)
        res.check(r <= tol, r, f"alpha={stability_number(g)}: ascent {rep.best_value:.6f} "
                               f"vs {target:.6f} (n={g.n})")
    return res


def run_suite(name, seed=0, nesterov=False, **opts):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    fn = {"roundtrips": suite_roundtrips, "motzkin-straus": suite_motzkin_straus,
          "clique-decision": suite_clique_decision, "schur-horn": suite_schur_horn,
          "lp-closed-form": suite_lp_closed_form, "copositivity": suite_copositivity,
          "pullbacks": suite_pullbacks}.get(name)
    if name == "nesterov":
        return suite_nesterov(seed=seed, enabled=nesterov, **opts)
    return fn(seed=seed, **opts)
