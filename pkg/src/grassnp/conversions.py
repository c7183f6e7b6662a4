"""Explicit diffeomorphisms between the models in :mod:`grassnp.manifolds`.

Grassmannian maps::

    O/OxO --phi1--> V/O --phi2--> projection --phi3--> quadratic(a, b)
      |              |
     phi5           phi4
      v              v
    GL/P           St/GL

Stiefel and Cartan maps: ``psi1: O/O -> stiefel``, ``psi2: GL/P1 -> fullrank``,
``rho: GL/O -> spd``. Every map has an inverse; quotient outputs are
compared with :func:`same_coset`.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction

import numpy as np

from .linalg import RankDeficientError, ldl_nopivot, lower_solve, qr_positive, sym_eig
from .manifolds import (
    TAU_MEM, TAU_RANK, FullRankPoint, InvolutionPoint, ManifoldError, ProjectionPoint,
    QuadraticModelPoint, QuotientPoint, SpdPoint, StiefelPoint, validate,
)

COSET_TOL = 1e-8


class ConversionError(ValueError):
    pass


def _require(pt, kind, tag=None, tau_mem=TAU_MEM):
    if not isinstance(pt, kind) or (tag is not None and pt.tag != tag):
        want = tag or kind.__name__
        raise ConversionError(f"expected a {want} point, got {getattr(pt, 'model', pt)!r}")
    bad = validate(pt, tau_mem=tau_mem)
    if bad:
        raise ConversionError(f"invalid {getattr(pt, 'model', '')} point: {bad}")


def _leading_cols(X, k):
    return np.asarray(X, dtype=float)[:, :k]


def _eig_basis_of_projector(P, k):
    """``Q`` with ``P = Q diag(I_k, 0) Q^T`` (descending eigenvalues)."""
    _, Q = sym_eig(P)
    return Q


# -- phi1: O(n)/(O(k)xO(n-k)) <-> V(k,n)/O(k) ------------------------------------

def phi1(q):
    _require(q, QuotientPoint, "O/OxO")
    return QuotientPoint(_leading_cols(q.rep, q.k), "V/O", q.n, q.k)


def phi1_inv(y):
    _require(y, QuotientPoint, "V/O")
    Y = np.asarray(y.rep, dtype=float)
    return QuotientPoint(_eig_basis_of_projector(Y @ Y.T, y.k), "O/OxO", y.n, y.k)


# -- phi2: V(k,n)/O(k) <-> projection model -----------------------------------

def phi2(y):
    _require(y, QuotientPoint, "V/O")
    Y = np.asarray(y.rep, dtype=float)
    return ProjectionPoint(Y @ Y.T, y.k)


def phi2_inv(p):
    _require(p, ProjectionPoint)
    n = p.P.shape[0]
    Q = _eig_basis_of_projector(p.P, p.k)
    return QuotientPoint(Q[:, :p.k], "V/O", n, p.k)


# -- phi3: projection <-> quadratic model (a, b) ------------------------------

def _affine(M, s, t):
    """``s M + t I``; exact when ``M`` holds Fractions (object dtype)."""
    M = np.asarray(M)
    n = M.shape[0]
    if M.dtype == object:
        eye = np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)
        return s * M + t * eye
    return float(s) * M + float(t) * np.eye(n)


def phi3(p, a, b):
    a, b = Fraction(a), Fraction(b)
    if a == b:
        raise ConversionError("phi3 needs a != b")
    if not isinstance(p, ProjectionPoint):
        raise ConversionError("phi3 maps projection points")
    return QuadraticModelPoint(_affine(p.P, a - b, b), p.k, a, b)


def phi3_inv(w):
    if not isinstance(w, (QuadraticModelPoint, InvolutionPoint)):
        raise ConversionError("phi3_inv maps quadratic-model points")
    a, b = (w.a, w.b) if isinstance(w, QuadraticModelPoint) else (Fraction(1), Fraction(-1))
    if a == b:
        raise ConversionError("phi3_inv needs a != b")
    W = w.W if isinstance(w, QuadraticModelPoint) else w.Q
    return ProjectionPoint(_affine(W, 1 / (a - b), -b / (a - b)), w.k)


# -- phi4: V(k,n)/O(k) <-> St(k,n)/GL(k) --------------------------------------

def phi4(y):
    _require(y, QuotientPoint, "V/O")
    return QuotientPoint(np.array(y.rep, dtype=float), "St/GL", y.n, y.k)


def phi4_inv(s):
    _require(s, QuotientPoint, "St/GL")
    try:
        Y, _ = qr_positive(s.rep, tol=TAU_RANK)
    except RankDeficientError as exc:
        raise ConversionError(f"rank-deficient representative: {exc}") from exc
    return QuotientPoint(Y, "V/O", s.n, s.k)


# -- phi5: O(n)/(O(k)xO(n-k)) <-> GL(n)/P(k,n) ----------------------------------

def phi5(q):
    _require(q, QuotientPoint, "O/OxO")
    return QuotientPoint(np.array(q.rep, dtype=float), "GL/P", q.n, q.k)


def phi5_inv(x):
    _require(x, QuotientPoint, "GL/P")
    try:
        Q, _ = qr_positive(x.rep, mode="complete", tol=TAU_RANK)
    except RankDeficientError as exc:
        raise ConversionError(f"singular representative: {exc}") from exc
    return QuotientPoint(Q, "O/OxO", x.n, x.k)


# -- psi1: O(n)/O(n-k) <-> V(k,n) ---------------------------------------------

def psi1(q):
    _require(q, QuotientPoint, "O/O")
    return StiefelPoint(_leading_cols(q.rep, q.k))


def psi1_inv(y):
    """Complete ``Y`` to an orthogonal matrix ``[Y, Y_perp]``.

    ``Y_perp`` is the null eigenbasis of ``Y Y^T``, so the coset's leading
    columns are ``Y`` itself and ``psi1(psi1_inv(Y)) == Y``.
    """
    _require(y, StiefelPoint)
    Y = np.asarray(y.Y, dtype=float)
    n, k = Y.shape
    Q = _eig_basis_of_projector(Y @ Y.T, k)
    return QuotientPoint(np.hstack([Y, Q[:, k:]]), "O/O", n, k)


# -- psi2: GL(n)/P1(k,n) <-> St(k,n) ------------------------------------------

def psi2(x):
    _require(x, QuotientPoint, "GL/P1")
    return FullRankPoint(_leading_cols(x.rep, x.k))


def psi2_factors(S, tol=TAU_RANK):
    """Unit lower-triangular ``L`` and ``d >= 0`` with ``S S^T = L diag(d) L^T``."""
    S = np.asarray(S, dtype=float)
    return ldl_nopivot(S @ S.T, S.shape[1], tol=tol)


def psi2_inv(s):
    """Coset in ``GL(n)/P1(k,n)`` whose leading ``k`` columns are ``S``.

    Built from the pivot-free ``L D L^T`` of ``S S^T``: ``L^{-1} S = [C; 0]``,
    and ``L diag(C, I)`` has leading columns ``S``. ``L`` alone only fixes
    the coarser ``P(k,n)`` coset.
    """
    _require(s, FullRankPoint)
    S = np.asarray(s.S, dtype=float)
    n, k = S.shape
    try:
        L, _ = psi2_factors(S)
    except RankDeficientError as exc:
        raise ConversionError(str(exc)) from exc
    C = lower_solve(L, S)[:k]
    B = np.eye(n)
    B[:k, :k] = C
    return QuotientPoint(L @ B, "GL/P1", n, k)


# -- rho: GL(n)/O(n) <-> S++ ----------------------------------------------------

def rho(x):
    _require(x, QuotientPoint, "GL/O")
    X = np.asarray(x.rep, dtype=float)
    return SpdPoint(X.T @ X)


def rho_inv(s):
    if not isinstance(s, SpdPoint):
        raise ConversionError("rho_inv maps SPD points")
    A = np.asarray(s.A, dtype=float)
    try:
        R = np.linalg.cholesky(0.5 * (A + A.T)).T
    except np.linalg.LinAlgError as exc:
        raise ConversionError(f"not positive definite: {exc}") from exc
    n = A.shape[0]
    return QuotientPoint(R, "GL/O", n, n)


# -- coset equality --------------------------------------------------------------

def _span_projector(X, k):
    Y, _ = np.linalg.qr(np.asarray(X, dtype=float)[:, :k])
    return Y @ Y.T


def _close(A, B, tol):
    scale = max(1.0, float(np.abs(A).max()), float(np.abs(B).max()))
    return float(np.abs(A - B).max()) <= tol * scale


def same_coset(a, b, tol=COSET_TOL):
    """Equality of cosets through a complete invariant of each quotient."""
    if not (isinstance(a, QuotientPoint) and isinstance(b, QuotientPoint)):
        raise ConversionError("same_coset compares quotient points")
    if (a.tag, a.n, a.k) != (b.tag, b.n, b.k):
        raise ConversionError(f"mismatched quotients {(a.tag, a.n, a.k)} vs {(b.tag, b.n, b.k)}")
    if a.tag in ("O/OxO", "V/O", "St/GL", "GL/P"):
        return _close(_span_projector(a.rep, a.k), _span_projector(b.rep, b.k), tol)
    if a.tag in ("O/O", "GL/P1"):
        return _close(_leading_cols(a.rep, a.k), _leading_cols(b.rep, b.k), tol)
    X, Z = np.asarray(a.rep, dtype=float), np.asarray(b.rep, dtype=float)
    return _close(X.T @ X, Z.T @ Z, tol)


# -- routing ---------------------------------------------------------------------

# edges of the conversion graph: (source, target) -> callable(point, ab)
_EDGES = {
    ("O/OxO", "V/O"): lambda p, ab: phi1(p),
    ("V/O", "O/OxO"): lambda p, ab: phi1_inv(p),
    ("V/O", "projection"): lambda p, ab: phi2(p),
    ("projection", "V/O"): lambda p, ab: phi2_inv(p),
    ("projection", "quadratic"): lambda p, ab: phi3(p, *ab),
    ("quadratic", "projection"): lambda p, ab: phi3_inv(p),
    ("projection", "involution"): lambda p, ab: _as_involution(phi3(p, 1, -1)),
    ("involution", "projection"): lambda p, ab: phi3_inv(p),
    ("V/O", "St/GL"): lambda p, ab: phi4(p),
    ("St/GL", "V/O"): lambda p, ab: phi4_inv(p),
    ("O/OxO", "GL/P"): lambda p, ab: phi5(p),
    ("GL/P", "O/OxO"): lambda p, ab: phi5_inv(p),
    ("O/O", "stiefel"): lambda p, ab: psi1(p),
    ("stiefel", "O/O"): lambda p, ab: psi1_inv(p),
    ("GL/P1", "fullrank"): lambda p, ab: psi2(p),
    ("fullrank", "GL/P1"): lambda p, ab: psi2_inv(p),
    ("GL/O", "spd"): lambda p, ab: rho(p),
    ("spd", "GL/O"): lambda p, ab: rho_inv(p),
}
_OUT_OF_SCOPE = {"plucker"}


def _as_involution(w):
    return InvolutionPoint(w.W, w.k)


def conversion_path(source, target):
    """Shortest chain of model tags from ``source`` to ``target``.

    The conversion graph is a forest, so the path is unique when it exists.
    """
    for tag in (source, target):
        if tag in _OUT_OF_SCOPE:
            raise ConversionError(f"model {tag!r} is out of scope")
    nodes = {s for s, _ in _EDGES} | {t for _, t in _EDGES}
    for tag in (source, target):
        if tag not in nodes:
            raise ConversionError(f"no conversions available for model {tag!r}")
    prev = {source: None}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if u == target:
            break
        for s, t in _EDGES:
            if s == u and t not in prev:
                prev[t] = u
                queue.append(t)
    if target not in prev:
        raise ConversionError(f"no conversion path from {source!r} to {target!r}")
    path = [target]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def convert(pt, target, ab=(1, -1)):
    """Route ``pt`` to ``target``; returns ``(point, path)``."""
    path = conversion_path(pt.model, target)
    for s, t in zip(path, path[1:]):
        try:
            pt = _EDGES[(s, t)](pt, ab)
        except ManifoldError as exc:
            raise ConversionError(str(exc)) from exc
    return pt, path
