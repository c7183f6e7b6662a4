"""Optimization instances built from graphs and matrices.

Every builder returns a :class:`ReductionInstance` whose objective is an
exact :class:`~grassnp.poly.SparsePoly`. When a closed-form optimum is known
it is stored as ``theoretical_value``: a :class:`~fractions.Fraction`, or a
:class:`SqrtValue` for square roots of rationals.

Model tags: ``grassmann`` (projection model, symmetric ``n x n`` variable),
``stiefel``, ``orthogonal``, ``sphere`` (vector variable), ``simplex``,
``density`` and ``spd``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .graphs import clique_number, find_k_clique, max_clique, stability_number
from .poly import PolyError, SparsePoly, substitute_corner, substitute_gram

MODELS = ("grassmann", "stiefel", "orthogonal", "sphere", "simplex", "density", "spd")

# max of t^3 sqrt(1 - t^2) on [0, 1], attained at t = sqrt(3)/2
QUARTIC_LIFT_CONSTANT = 3 * math.sqrt(3) / 16


class ReductionError(ValueError):
    pass


class FeatureDisabled(RuntimeError):
    """Raised by feature-gated builders when the feature is off."""


@dataclass(frozen=True)
class SqrtValue:
    """The exact number ``sqrt(radicand)`` for a rational radicand."""
    radicand: Fraction

    def __float__(self):
        return math.sqrt(self.radicand)

    def __str__(self):
        return f"sqrt({self.radicand})"


@dataclass(frozen=True)
class ReductionInstance:
    model: str
    n: int
    k: int
    objective: SparsePoly
    sense: str = "maximize"
    provenance: dict = field(default_factory=dict)
    theoretical_value: object = None
    ab: tuple | None = None
    witness: tuple | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ReductionError(f"unknown model {self.model!r}")
        if self.sense not in ("maximize", "minimize"):
            raise ReductionError(f"unknown sense {self.sense!r}")
        want = self.variable_shape()
        if self.objective.shape != want:
            raise ReductionError(
                f"objective lives over {self.objective.shape}, model {self.model} needs {want}")

    def variable_shape(self):
        if self.model in ("grassmann", "orthogonal", "density", "spd"):
            return (self.n, self.n)
        if self.model == "stiefel":
            return (self.n, self.k)
        return (self.n, 1)

    def theoretical_float(self):
        return None if self.theoretical_value is None else float(self.theoretical_value)

    # -- JSON ----------------------------------------------------------------
    def to_json_dict(self):
        tv = self.theoretical_value
        if tv is None:
            tv_json = None
        elif isinstance(tv, SqrtValue):
            tv_json = {"sqrt_expr": str(tv), "radicand": _frac_json(tv.radicand),
                       "float": float(tv)}
        else:
            tv_json = dict(_frac_json(Fraction(tv)), float=float(tv))
        out = {"model": self.model, "n": self.n, "k": self.k, "sense": self.sense,
               "objective": self.objective.to_json_dict(),
               "provenance": self.provenance, "theoretical_value": tv_json}
        if self.ab is not None:
            out["ab"] = [str(Fraction(x)) for x in self.ab]
        if self.witness is not None:
            out["witness"] = [str(Fraction(x)) for x in self.witness]
        return out

    @classmethod
    def from_json_dict(cls, d):
        try:
            tv = d.get("theoretical_value")
            if tv is not None:
                tv = (SqrtValue(_frac_from_json(tv["radicand"])) if "sqrt_expr" in tv
                      else _frac_from_json(tv))
            ab = tuple(Fraction(x) for x in d["ab"]) if d.get("ab") else None
            witness = tuple(Fraction(x) for x in d["witness"]) if d.get("witness") else None
            return cls(model=d["model"], n=int(d["n"]), k=int(d["k"]),
                       objective=SparsePoly.from_json_dict(d["objective"]),
                       sense=d.get("sense", "maximize"),
                       provenance=dict(d.get("provenance", {})),
                       theoretical_value=tv, ab=ab, witness=witness)
        except (KeyError, TypeError, ValueError, PolyError) as exc:
            raise ReductionError(f"malformed instance JSON: {exc}") from exc


def _frac_json(q):
    return {"num": str(q.numerator), "den": str(q.denominator)}


def _frac_from_json(d):
    return Fraction(int(d["num"]), int(d["den"]))


def _check_k(g, k):
    if not 1 <= k <= g.n:
        raise ReductionError(f"k must lie in 1..{g.n}, got {k}")


def _graph_prov(g):
    return {"n": g.n, "edges": [list(e) for e in g.sorted_edges()]}


def _diag_var(i, n):
    return SparsePoly.var(i, i, (n, n), symmetric=True)


def edge_diagonal_form(g):
    """``2 * sum_{edges ij} p_ii p_jj`` over a symmetric ``n x n`` variable."""
    n = g.n
    terms = {(((i, i), 1), ((j, j), 1)): 2 for i, j in g.edges}
    return SparsePoly((n, n), terms, symmetric=True)


def motzkin_straus_value(k, omega):
    return Fraction(k * k) * (1 - Fraction(1, omega))


# -- Grassmannian reductions -----------------------------------------------------

def clique_decision_form(g, k):
    """Quadratic on ``Gr(k, n)`` whose maximum is ``k^2`` iff ``g`` has a ``k``-clique."""
    _check_k(g, k)
    n = g.n
    f = edge_diagonal_form(g)
    f = f + SparsePoly((n, n), {(((i, i), 2),): 1 for i in range(1, n + 1)}, symmetric=True)
    witness = find_k_clique(g, k)
    tv = Fraction(k * k) if witness is not None else None
    prov = {"reduction": "clique-decision", "anchor": "Prop 4.1", "graph": _graph_prov(g),
            "gap_lower_bound": str(Fraction(1, (n + 1) ** 2)),
            "fptas_epsilon_context": (str(Fraction(1, 2 * k * k * (n - k - 1) ** 2))
                                      if n - k - 1 != 0 else None)}
    w = None
    if witness is not None:
        w = tuple(Fraction(int(i + 1 in witness)) for i in range(n))
    return ReductionInstance("grassmann", n, k, f, "maximize", prov, tv, witness=w)


def clique_number_form(g, k):
    """``2 sum_{edges} p_ii p_jj`` on ``Gr(k, n)``; maximum ``k^2 (1 - 1/omega)`` when ``omega >= k``."""
    _check_k(g, k)
    omega = clique_number(g)
    tv = motzkin_straus_value(k, omega) if omega >= k else None
    prov = {"reduction": "clique-number", "anchor": "Prop 5.3", "graph": _graph_prov(g),
            "clique_number": omega,
            "fptas_epsilon_context": str(Fraction(1, 2 * k * k * g.n * g.n))}
    return ReductionInstance("grassmann", g.n, k, edge_diagonal_form(g), "maximize", prov, tv,
                             witness=_uniform_clique_witness(g, k, omega) if tv is not None else None)


def _uniform_clique_witness(g, k, omega):
    clique = set(max_clique(g))
    return tuple(Fraction(k, omega) if v in clique else Fraction(0) for v in range(1, g.n + 1))


def simplex_ms_form(g, k):
    """``2 sum_{edges} x_i x_j`` on the hypersimplex, with the uniform clique witness."""
    _check_k(g, k)
    n = g.n
    f = SparsePoly((n, 1), {(((i, 1), 1), ((j, 1), 1)): 2 for i, j in g.edges})
    omega = clique_number(g)
    tv = motzkin_straus_value(k, omega) if omega >= k else None
    w = _uniform_clique_witness(g, k, omega) if tv is not None else None
    prov = {"reduction": "simplex-motzkin-straus", "anchor": "Prop 5.1", "graph": _graph_prov(g),
            "clique_number": omega}
    return ReductionInstance("simplex", n, k, f, "maximize", prov, tv, witness=w)


def density_qp_form(g):
    """Edge form over density matrices; maximum ``1 - 1/omega``."""
    omega = clique_number(g)
    prov = {"reduction": "density-qp", "anchor": "Cor 5.5", "graph": _graph_prov(g),
            "clique_number": omega}
    return ReductionInstance("density", g.n, 1, edge_diagonal_form(g), "maximize", prov,
                             motzkin_straus_value(1, omega),
                             witness=_uniform_clique_witness(g, 1, omega))


# -- sphere, quartic and Grassmann lifts ------------------------------------------

def quartic_sphere_lift(f):
    """``g(x, y) = f(x) * y`` for a homogeneous cubic ``f`` on ``R^(n-1)``."""
    m, cols = f.shape
    if cols != 1 or not f.is_homogeneous(3) or f.is_zero():
        raise ReductionError("expected a nonzero homogeneous cubic in a vector variable")
    n = m + 1
    mapping = {(i, 1): SparsePoly.var(i, 1, (n, 1)) for i in range(1, m + 1)}
    return f.substitute(mapping, (n, 1)) * SparsePoly.var(n, 1, (n, 1))


def grassmann_h_from_quartic(g):
    """Quadratic ``h`` in ``P`` with ``h(z z^T) = g(z)`` for a homogeneous quartic ``g``.

    The monomial ``z_a z_b z_c z_d`` (indices ascending) becomes ``p_ab p_cd``.
    """
    n, cols = g.shape
    if cols != 1 or not g.is_homogeneous(4) or g.is_zero():
        raise ReductionError("expected a nonzero homogeneous quartic in a vector variable")
    terms = {}
    for mono, c in g.terms.items():
        idx = sorted(i for (i, _), e in mono for _ in range(e))
        a, b, cc, d = idx
        key = (((a, b), 1), ((cc, d), 1))
        terms[key] = terms.get(key, 0) + c
    h = SparsePoly((n, n), terms, symmetric=True)
    prov = {"reduction": "grassmann-quartic", "anchor": "Cor 7.3",
            "lift_constant": QUARTIC_LIFT_CONSTANT,
            "note": "max h over Gr(1,n) = lift_constant * max f over the sphere "
                    "when g = f(x) y comes from quartic_sphere_lift"}
    return ReductionInstance("grassmann", n, 1, h, "maximize", prov, None)


def nesterov_cubic(g, enabled=False):
    """Cubic on the sphere encoding the stability number (feature-gated).

    Variables are ``x_1..x_n`` (vertices) followed by one ``y_ij`` per
    non-adjacent pair ``i < j``; ``f = sum x_i x_j y_ij``. Maximizing ``y``
    for fixed ``|x| = r`` and applying the simplex bound to ``x_i^2 / r^2``
    gives ``max f = sqrt(2/27 (1 - 1/alpha))``, a fixed multiple of
    ``sqrt(1 - 1/alpha)`` that keeps the coefficients rational.
    """
    if not enabled:
        raise FeatureDisabled("nesterov_cubic is feature-gated and not enabled")
    nonedges = sorted(g.complement().edges)
    n = g.n
    size = n + len(nonedges)
    terms = {}
    for t, (i, j) in enumerate(nonedges):
        terms[(((i, 1), 1), ((j, 1), 1), ((n + 1 + t, 1), 1))] = 1
    f = SparsePoly((size, 1), terms)
    alpha = stability_number(g)
    tv = SqrtValue(Fraction(2, 27) * (1 - Fraction(1, alpha)))
    prov = {"reduction": "stability-cubic", "anchor": "Thm 7.2", "graph": _graph_prov(g),
            "stability_number": alpha, "scale_to_target": "sqrt(27/2)"}
    return ReductionInstance("sphere", size, 1, f, "maximize", prov, tv)


# -- pullbacks to Stiefel and orthogonal variables ---------------------------------

def _require_grassmann(inst):
    if inst.model != "grassmann":
        raise ReductionError(f"expected a grassmann instance, got {inst.model!r}")


def stiefel_pullback(inst):
    """Same optimum on ``V(k, n)`` through ``Y -> Y Y^T``."""
    _require_grassmann(inst)
    f = substitute_gram(inst.objective, inst.k)
    prov = dict(inst.provenance, pullback="stiefel: f(Y Y^T)")
    return replace(inst, model="stiefel", objective=f, provenance=prov)


def orthogonal_pullback(inst):
    """Same optimum on ``O(n)`` through ``Q -> Q diag(I_k, 0) Q^T``."""
    _require_grassmann(inst)
    f = substitute_corner(inst.objective, inst.k)
    prov = dict(inst.provenance, pullback="orthogonal: f(Q I_k Q^T)")
    return replace(inst, model="orthogonal", objective=f, provenance=prov)


def first_column_pullback(f, k, model="stiefel", theoretical_value=None, provenance=None):
    """``x_i -> y_i1``: a sphere polynomial as a polynomial on ``V(k, n)`` or ``O(n)``."""
    n, cols = f.shape
    if cols != 1:
        raise ReductionError(f"expected a vector variable, got shape {f.shape}")
    if model not in ("stiefel", "orthogonal"):
        raise ReductionError("first_column_pullback targets stiefel or orthogonal")
    if model == "orthogonal":
        k = n
    if not 1 <= k <= n:
        raise ReductionError(f"k must lie in 1..{n}")
    shape = (n, k)
    g = f.substitute({(i, 1): SparsePoly.var(i, 1, shape) for i in range(1, n + 1)}, shape)
    prov = dict(provenance or {}, pullback="first column: f(Y e_1)", anchor="Thm 7.2")
    return ReductionInstance(model, n, k, g, "maximize", prov, theoretical_value)


def sphere_instance(f, theoretical_value=None, provenance=None):
    n, cols = f.shape
    if cols != 1:
        raise ReductionError(f"expected a vector variable, got shape {f.shape}")
    return ReductionInstance("sphere", n, 1, f, "maximize", dict(provenance or {}),
                             theoretical_value)


# -- copositivity ----------------------------------------------------------------

def copositivity_form(A):
    """``f(X) = diag(X)^T A diag(X)`` on ``S++``, to be minimized.

    ``f`` only sees ``(A + A^T)/2``. ``f >= 0`` on ``S++`` implies that the
    symmetrized ``A`` is copositive.
    """
    rows = [list(r) for r in A]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ReductionError("copositivity_form needs a square matrix")
    terms = {}
    for i in range(1, n + 1):
        for k in range(1, n + 1):
            c = Fraction(rows[i - 1][k - 1])
            if c:
                mono = (((i, i), 2),) if i == k else (((min(i, k),) * 2, 1), ((max(i, k),) * 2, 1))
                terms[mono] = terms.get(mono, 0) + c
    f = SparsePoly((n, n), terms, symmetric=True)
    prov = {"reduction": "copositivity", "anchor": "Lemma 8.1",
            "matrix": [[str(Fraction(x)) for x in r] for r in rows],
            "threshold": "0: nonnegative on S++ implies (A+A^T)/2 copositive"}
    return ReductionInstance("spd", n, n, f, "minimize", prov, None)
