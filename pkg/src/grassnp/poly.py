"""Exact-rational sparse polynomials in the entries of one matrix variable.

A :class:`SparsePoly` lives over a variable of shape ``(rows, cols)``;
vectors are ``(n, 1)``. Variables are addressed 1-based as ``(row, col)``.
For a *symmetric* variable the entries ``(i, j)`` and ``(j, i)`` are the same
unknown and are always stored as ``(min, max)``, so ``p_12 + p_21`` becomes
``2 p_12``.

Coefficients are :class:`fractions.Fraction`; floats only appear in
:meth:`SparsePoly.eval_float` and in :class:`CompiledPoly`, the vectorised
evaluator the solvers use.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from types import MappingProxyType
from typing import NamedTuple

import numpy as np


class PolyError(ValueError):
    pass


def _frac(c):
    # floats convert to their exact binary value
    return c if isinstance(c, Fraction) else Fraction(c)


def _canon_var(var, symmetric):
    i, j = var
    if symmetric and i > j:
        return (j, i)
    return (i, j)


def _mono(factors):
    """Canonical monomial from an iterable of ``(var, exponent)``."""
    acc = defaultdict(int)
    for var, e in factors:
        if e:
            acc[var] += e
    return tuple(sorted((v, e) for v, e in acc.items() if e))


def _mono_mul(a, b):
    return _mono(list(a) + list(b))


def _mono_degree(m):
    return sum(e for _, e in m)


class SparsePoly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("shape", "symmetric", "_terms", "_hash")

    def __init__(self, shape, terms=None, symmetric=False):
        rows, cols = (int(s) for s in shape)
        if rows < 1 or cols < 1:
            raise PolyError(f"invalid variable shape {shape}")
        if symmetric and rows != cols:
            raise PolyError("a symmetric variable must be square")
        self.shape = (rows, cols)
        self.symmetric = bool(symmetric)
        acc = defaultdict(Fraction)
        for mono, c in (terms or {}).items():
            canon = []
            for var, e in mono:
                i, j = _canon_var(var, self.symmetric)
                if not (1 <= i <= rows and 1 <= j <= cols):
                    raise PolyError(f"variable {(i, j)} outside shape {self.shape}")
                if int(e) != e or e < 0:
                    raise PolyError(f"invalid exponent {e!r}")
                canon.append(((i, j), int(e)))
            acc[_mono(canon)] += _frac(c)
        self._terms = MappingProxyType({m: c for m, c in acc.items() if c != 0})
        self._hash = None

    # -- constructors --------------------------------------------------------
    @classmethod
    def constant(cls, c, shape, symmetric=False):
        return cls(shape, {(): c}, symmetric)

    @classmethod
    def var(cls, i, j, shape, symmetric=False):
        return cls(shape, {(((i, j), 1),): 1}, symmetric)

    @classmethod
    def zero(cls, shape, symmetric=False):
        return cls(shape, {}, symmetric)

    @property
    def terms(self):
        return self._terms

    # -- structure -----------------------------------------------------------
    def degree(self):
        """Maximum total degree; the zero polynomial has degree -1."""
        return max((_mono_degree(m) for m in self._terms), default=-1)

    def is_homogeneous(self, d=None):
        degs = {_mono_degree(m) for m in self._terms}
        if not degs:
            return True
        if len(degs) != 1:
            return False
        return d is None or degs == {d}

    def variables(self):
        return sorted({v for m in self._terms for v, _ in m})

    def is_zero(self):
        return not self._terms

    def _same_space(self, other):
        if self.shape != other.shape or self.symmetric != other.symmetric:
            raise PolyError(
                f"incompatible variables: {self.shape}/{self.symmetric} vs "
                f"{other.shape}/{other.symmetric}")

    def _lift(self, other):
        if isinstance(other, SparsePoly):
            self._same_space(other)
            return other
        return SparsePoly.constant(other, self.shape, self.symmetric)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, 0) + c
        return SparsePoly(self.shape, acc, self.symmetric)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly(self.shape, {m: -c for m, c in self._terms.items()}, self.symmetric)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            c = _frac(other)
            return SparsePoly(self.shape, {m: c * v for m, v in self._terms.items()},
                              self.symmetric)
        self._same_space(other)
        acc = defaultdict(Fraction)
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                acc[_mono_mul(m1, m2)] += c1 * c2
        return SparsePoly(self.shape, acc, self.symmetric)

    __rmul__ = __mul__

    def __pow__(self, e):
        if int(e) != e or e < 0:
            raise PolyError("only non-negative integer powers")
        out = SparsePoly.constant(1, self.shape, self.symmetric)
        base = self
        e = int(e)
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return (self.shape == other.shape and self.symmetric == other.symmetric
                and dict(self._terms) == dict(other._terms))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shape, self.symmetric, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"SparsePoly(shape={self.shape}, symmetric={self.symmetric}, {self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in sorted(self._terms.items()):
            vs = "*".join(f"x{i}_{j}" + (f"^{e}" if e > 1 else "") for (i, j), e in m)
            parts.append(f"{c}" if not vs else (vs if c == 1 else f"{c}*{vs}"))
        return " + ".join(parts)

    # -- calculus and substitution -------------------------------------------
    def diff(self, var):
        """Exact partial derivative with respect to the (canonical) variable ``var``."""
        var = _canon_var(var, self.symmetric)
        acc = {}
        for m, c in self._terms.items():
            for k, (v, e) in enumerate(m):
                if v == var:
                    rest = m[:k] + (((v, e - 1),) if e > 1 else ()) + m[k + 1:]
                    acc[rest] = acc.get(rest, 0) + c * e
        return SparsePoly(self.shape, acc, self.symmetric)

    def substitute(self, mapping, shape, symmetric=False):
        """Replace every variable by a polynomial over a new variable shape.

        ``mapping`` sends each canonical variable of ``self`` to a
        :class:`SparsePoly` over ``shape``. Expansion is eager and exact.
        """
        powers = {}

        def power(var, e):
            key = (var, e)
            if key not in powers:
                try:
                    base = mapping[var]
                except KeyError:
                    raise PolyError(f"no substitution given for variable {var}") from None
                if base.shape != tuple(shape) or base.symmetric != symmetric:
                    raise PolyError(f"substitution for {var} lives over the wrong variable")
                powers[key] = base ** e
            return powers[key]

        acc = defaultdict(Fraction)
        for m, c in self._terms.items():
            term = SparsePoly.constant(c, shape, symmetric)
            for v, e in m:
                term = term * power(v, e)
            for m2, c2 in term._terms.items():
                acc[m2] += c2
        return SparsePoly(shape, acc, symmetric)

    # -- evaluation ----------------------------------------------------------
    def _as_matrix(self, X):
        X = np.asarray(X)
        if X.ndim == 1 and self.shape[1] == 1:
            X = X.reshape(-1, 1)
        if X.ndim == 0 and self.shape == (1, 1):
            X = X.reshape(1, 1)
        if X.shape != self.shape:
            raise PolyError(f"point of shape {X.shape} does not match variable shape {self.shape}")
        return X

    def eval_float(self, X):
        X = self._as_matrix(X).astype(float)
        total = 0.0
        for m, c in self._terms.items():
            t = float(c)
            for (i, j), e in m:
                t *= X[i - 1, j - 1] ** e
            total += t
        return total

    def eval_exact(self, X):
        X = self._as_matrix(np.asarray(X, dtype=object))
        total = Fraction(0)
        for m, c in self._terms.items():
            t = c
            for (i, j), e in m:
                t *= Fraction(X[i - 1, j - 1]) ** e
            total += t
        return total

    def compile(self):
        return CompiledPoly(self)

    # -- serialization -------------------------------------------------------
    def to_json_dict(self):
        terms = []
        for m, c in sorted(self._terms.items()):
            terms.append({"m": [[i, j, e] for (i, j), e in m],
                          "num": str(c.numerator), "den": str(c.denominator)})
        out = {"shape": list(self.shape), "terms": terms}
        if self.symmetric:
            out["symmetric"] = True
        return out

    @classmethod
    def from_json_dict(cls, data):
        try:
            shape = tuple(data["shape"])
            terms = {}
            for t in data["terms"]:
                mono = tuple(((int(i), int(j)), int(e)) for i, j, e in t["m"])
                c = Fraction(int(t["num"]), int(t["den"]))
                mono = _mono(mono)
                terms[mono] = terms.get(mono, 0) + c
        except (KeyError, TypeError, ValueError) as exc:
            raise PolyError(f"malformed polynomial JSON: {exc}") from exc
        return cls(shape, terms, bool(data.get("symmetric", False)))


class CompiledPoly:
    """Float evaluator for batches of points.

    Each term is unrolled into ``degree`` factor slots holding flat variable
    indices (``x`` cubed takes three slots); unused slots point at an extra
    coordinate pinned to 1. Values are gathers and products; the gradient
    applies the product rule slot by slot and scatters with one matmul.
    """

    def __init__(self, poly):
        self.shape = poly.shape
        self.symmetric = poly.symmetric
        rows, cols = poly.shape
        self.size = rows * cols
        d = max(poly.degree(), 1)
        terms = list(poly.terms.items())
        idx = np.full((len(terms), d), self.size, dtype=np.intp)
        coef = np.empty(len(terms))
        for t, (m, c) in enumerate(terms):
            coef[t] = float(c)
            slots = [(i - 1) * cols + (j - 1) for (i, j), e in m for _ in range(e)]
            idx[t, :len(slots)] = slots
        self.coef = coef
        self.idx = idx
        self.degree = d
        # scatter[s*T + t, v] = 1 iff slot s of term t holds variable v
        T = len(terms)
        scatter = np.zeros((d * T, self.size + 1))
        scatter[np.arange(d * T), idx.T.reshape(-1)] = 1.0
        self._scatter = scatter[:, :-1]

    def _pad(self, X):
        x = np.asarray(X, dtype=float)
        x = x.reshape(x.shape[0], -1)
        if x.shape[1] != self.size:
            raise PolyError(f"batch points have {x.shape[1]} coordinates, expected {self.size}")
        return np.concatenate([x, np.ones((x.shape[0], 1))], axis=1)

    def value(self, X):
        """Values at a batch ``X`` of shape ``(B, rows, cols)``."""
        xp = self._pad(X)
        if not len(self.coef):
            return np.zeros(xp.shape[0])
        return np.prod(xp[:, self.idx], axis=2) @ self.coef

    def value_and_grad(self, X):
        """Values ``(B,)`` and Euclidean gradients ``(B, rows, cols)``.

        For a symmetric polynomial the gradient is with respect to the stored
        upper-triangular coordinates.
        """
        xp = self._pad(X)
        B = xp.shape[0]
        if not len(self.coef):
            return np.zeros(B), np.zeros((B,) + self.shape)
        f = xp[:, self.idx]  # (B, T, d)
        vals = np.prod(f, axis=2) @ self.coef
        if self.degree == 1:
            contrib = np.broadcast_to(self.coef, f.shape[:2])[:, None, :]
        else:
            contrib = np.stack([np.prod(np.delete(f, s, axis=2), axis=2)
                                for s in range(self.degree)], axis=1) * self.coef
        grad = contrib.reshape(B, -1) @ self._scatter
        return vals, grad.reshape((B,) + self.shape)


# -- variable-substitution pullbacks ------------------------------------------

def _gram_entry(i, j, n, k):
    """``(Y Y^T)_{ij} = sum_l y_il y_jl`` as a polynomial over ``n x k``."""
    terms = {}
    for l in range(1, k + 1):
        mono = _mono([((i, l), 1), ((j, l), 1)])
        terms[mono] = terms.get(mono, 0) + 1
    return SparsePoly((n, k), terms)


def substitute_gram(f, k):
    """Pull back ``f(P)`` on an ``n x n`` variable to ``g(Y) = f(Y Y^T)``, ``Y`` being ``n x k``."""
    n, cols = f.shape
    if n != cols:
        raise PolyError(f"expected a square variable, got {f.shape}")
    if not 1 <= k <= n:
        raise PolyError(f"k must lie in 1..{n}")
    mapping = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            mapping[_canon_var((i, j), f.symmetric)] = _gram_entry(i, j, n, k)
    return f.substitute(mapping, (n, k))


def substitute_corner(f, k):
    """Pull back ``f(P)`` to ``g(Q) = f(Q diag(1..1, 0..0) Q^T)`` on an ``n x n`` variable.

    Only the first ``k`` columns of ``Q`` occur, so this is the Gram
    substitution re-embedded into the square variable.
    """
    n = f.shape[0]
    g = substitute_gram(f, k)
    mapping = {(i, j): SparsePoly.var(i, j, (n, n)) for i in range(1, n + 1)
               for j in range(1, k + 1)}
    return g.substitute(mapping, (n, n))


def compose_affine_matrix(f, s, t):
    """``g(W) = f(s W + t I)``, expanded exactly. ``s`` must be nonzero."""
    s, t = _frac(s), _frac(t)
    if s == 0:
        raise PolyError("scale must be nonzero")
    n, cols = f.shape
    if n != cols:
        raise PolyError(f"expected a square variable, got {f.shape}")
    mapping = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            v = _canon_var((i, j), f.symmetric)
            if v in mapping:
                continue
            entry = SparsePoly.var(*v, (n, n), f.symmetric) * s
            if i == j:
                entry = entry + t
            mapping[v] = entry
    return f.substitute(mapping, (n, n), f.symmetric)


def symmetric_matrix_poly(f):
    """Re-express ``f`` (over a general square variable) over a symmetric one."""
    n = f.shape[0]
    mapping = {(i, j): SparsePoly.var(i, j, (n, n), True)
               for i in range(1, n + 1) for j in range(1, n + 1)}
    return f.substitute(mapping, (n, n), True)


# -- numerical invariance check ----------------------------------------------

ACTIONS = ("right-O(k)", "right-P1(k,n)", "right-P(k,n)", "block-O(k)xO(n-k)")


class InvarianceResult(NamedTuple):
    invariant: bool
    max_deviation: float


def _haar_orthogonal(rng, m):
    G = rng.standard_normal((m, m))
    Q, R = np.linalg.qr(G)
    return Q * np.sign(np.diag(R))


def check_invariance(f, action, k=None, n_samples=50, seed=0, tol=1e-9):
    """Sample ``|f(X g) - f(X)|`` over random ``X`` and random group elements ``g``.

    ``right-O(k)`` acts on an ``n x k`` variable; the other actions act on an
    ``n x n`` variable and need the block size ``k``. A numerical sampler,
    not a proof.
    """
    if action not in ACTIONS:
        raise PolyError(f"unknown action {action!r}; choose from {ACTIONS}")
    rows, cols = f.shape
    if action == "right-O(k)":
        k = cols
    elif k is None or not 1 <= k < cols or rows != cols:
        raise PolyError(f"action {action} needs a square variable and 1 <= k < n")
    rng = np.random.default_rng(seed)
    n = cols
    worst = 0.0
    for _ in range(n_samples):
        X = rng.standard_normal((rows, cols))
        if action == "right-O(k)":
            g = _haar_orthogonal(rng, k)
        elif action == "block-O(k)xO(n-k)":
            g = np.zeros((n, n))
            g[:k, :k] = _haar_orthogonal(rng, k)
            g[k:, k:] = _haar_orthogonal(rng, n - k)
        else:
            g = np.zeros((n, n))
            g[:k, :k] = np.eye(k) if action == "right-P1(k,n)" else rng.standard_normal((k, k)) + 2 * np.eye(k)
            g[:k, k:] = rng.standard_normal((k, n - k))
            g[k:, k:] = rng.standard_normal((n - k, n - k)) + 2 * np.eye(n - k)
        base = f.eval_float(X)
        moved = f.eval_float(X @ g)
        worst = max(worst, abs(moved - base) / max(1.0, abs(base)))
    return InvarianceResult(worst <= tol, worst)
