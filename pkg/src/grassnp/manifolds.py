"""Matrix models of the Grassmann, Stiefel and Cartan manifolds.

Submanifold models are plain matrices satisfying defining equations;
quotient models are a representative matrix plus the name of the quotient.
Membership is checked numerically by :func:`validate`, which returns the
violated equations with their residuals rather than raising.

Quotient tags::

    O/OxO   O(n)/(O(k) x O(n-k))   Grassmannian
    V/O     V(k,n)/O(k)            Grassmannian
    GL/P    GL(n)/P(k,n)           Grassmannian
    St/GL   St(k,n)/GL(k)          Grassmannian
    O/O     O(n)/O(n-k)            compact Stiefel
    GL/P1   GL(n)/P1(k,n)          noncompact Stiefel
    GL/O    GL(n)/O(n)             Cartan (ellipsoids); O(n) acts on the left
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .linalg import RankDeficientError, qr_positive

TAU_MEM = 1e-10
TAU_RANK = 1e-8

QUOTIENT_TAGS = {
    "O/OxO": "O(n)/(O(k)xO(n-k))",
    "V/O": "V(k,n)/O(k)",
    "GL/P": "GL(n)/P(k,n)",
    "St/GL": "St(k,n)/GL(k)",
    "O/O": "O(n)/O(n-k)",
    "GL/P1": "GL(n)/P1(k,n)",
    "GL/O": "GL(n)/O(n)",
}
# shape of a representative, as a function of (n, k)
_REP_IS_TALL = {"V/O", "St/GL"}
# the submanifold each quotient's representatives live in
_AMBIENT = {"O/OxO": "orthogonal", "O/O": "orthogonal", "V/O": "stiefel",
            "St/GL": "fullrank", "GL/P": "gl", "GL/P1": "gl", "GL/O": "gl"}

SUBMANIFOLD_MODELS = ("projection", "involution", "quadratic", "stiefel", "sphere",
                      "orthogonal", "fullrank", "spd")


class ManifoldError(ValueError):
    pass


class Violation(NamedTuple):
    name: str
    residual: float


def _inf_norm(A):
    return float(np.max(np.abs(A), initial=0.0))


def _as_float(A):
    return np.asarray(A, dtype=float)


# -- point types -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProjectionPoint:
    P: np.ndarray
    k: int
    model = "projection"

    def violations(self, tau_mem=TAU_MEM, tau_rank=TAU_RANK):
        P = _as_float(self.P)
        out = _square_violations(P)
        if out:
            return out
        checks = [("symmetry", _inf_norm(P - P.T)),
                  ("idempotency", _inf_norm(P @ P - P)),
                  ("trace", abs(np.trace(P) - self.k))]
        return [Violation(nm, r) for nm, r in checks if r > tau_mem]


@dataclass(frozen=True, eq=False)
class InvolutionPoint:
    Q: np.ndarray
    k: int
    model = "involution"

    def violations(self, tau_mem=TAU_MEM, tau_rank=TAU_RANK):
        Q = _as_float(self.Q)
        out = _square_violations(Q)
        if out:
            return out
        n = Q.shape[0]
        checks = [("orthogonality", _inf_norm(Q.T @ Q - np.eye(n))),
                  ("symmetry", _inf_norm(Q - Q.T)),
                  ("trace", abs(np.trace(Q) - (2 * self.k - n)))]
        return [Violation(nm, r) for nm, r in checks if r > tau_mem]


@dataclass(frozen=True, eq=False)
class QuadraticModelPoint:
    W: np.ndarray
    k: int
    a: Fraction
    b: Fraction
    model = "quadratic"

    def violations(self, tau_mem=TAU_MEM, tau_rank=TAU_RANK):
        W = _as_float(self.W)
        out = _square_violations(W)
        if out:
            return out
        if self.a == self.b:
            return [Violation("distinct-ab", 0.0)]
        a, b = float(self.a), float(self.b)
        n = W.shape[0]
        I = np.eye(n)
        quad_tol = tau_mem * max(1.0, a * a, b * b)
        out = []
        if (r := _inf_norm(W - W.T)) > tau_mem:
            out.append(Violation("symmetry", r))
        if (r := _inf_norm((W - a * I) @ (W - b * I))) > quad_tol:
            out.append(Violation("quadratic", r))
        if (r := abs(np.trace(W) - (self.k * a + (n - self.k) * b))) > tau_mem:
            out.append(Violation("trace", r))
        return out


@dataclass(frozen=True, eq=False)
class StiefelPoint:
    Y: np.ndarray
    model = "stiefel"

    @property
    def k(self):
        return np.asarray(self.Y).shape[1]

    def violations(self, tau_mem=TAU_MEM, tau_rank=TAU_RANK):
        Y = _as_float(self.Y)
        if Y.ndim != 2 or Y.shape[1] > Y.shape[0]:
            return [Violation("shape", float("inf"))]
        r = _inf_norm(Y.T @ Y - np.eye(Y.shape[1]))
        return [Violation("orthonormality", r)] if r > tau_mem else []


@dataclass(frozen=True, eq=False)
class OrthogonalPoint:
    Q: np.ndarray
    model = "orthogonal"

    def violations(self, tau_mem=TAU_MEM, tau_rank=TAU_RANK):
        Q = _as_float(self.Q)
        out = _square_violations(Q)
        if out:
            return out
        r = _inf_norm(Q.T @ Q - np.eye(Q.shape[0]))
        return [Violation("orthogonality", r)] if r > tau_mem else []


@dataclass(frozen=True, eq=False)
class FullRankPoint:
    S: np.ndarray
    model = "fullrank"

    @property
    def k(self):
        return np.asarray(self.S).shape[1]

    def violations(self, tau_mem=TAU_MEM, tau_rank=TAU_RANK):
        S = _as_float(self.S)
        if S.ndim != 2 or S.shape[1] > S.shape[0]:
            return [Violation("shape", float("inf"))]
        smin = float(np.linalg.svd(S, compute_uv=False)[-1])
        return [Violation("rank", smin)] if smin <= tau_rank else []


@dataclass(frozen=True, eq=False)
class SpdPoint:
    A: np.ndarray
    model = "spd"

    def violations(self, tau_mem=TAU_MEM, tau_rank=TAU_RANK):
        A = _as_float(self.A)
        out = _square_violations(A)
        if out:
            return out
        if (r := _inf_norm(A - A.T)) > tau_mem:
            out.append(Violation("symmetry", r))
        lmin = float(np.linalg.eigvalsh(0.5 * (A + A.T))[0])
        if lmin <= tau_rank:
            out.append(Violation("positive-definite", lmin))
        return out


@dataclass(frozen=True, eq=False)
class QuotientPoint:
    """A coset, held through one representative. Compare with ``same_coset``."""
    rep: np.ndarray
    tag: str
    n: int
    k: int

    def __post_init__(self):
        if self.tag not in QUOTIENT_TAGS:
            raise ManifoldError(f"unknown quotient tag {self.tag!r}")

    @property
    def model(self):
        return self.tag

    def violations(self, tau_mem=TAU_MEM, tau_rank=TAU_RANK):
        X = _as_float(self.rep)
        expect = (self.n, self.k) if self.tag in _REP_IS_TALL else (self.n, self.n)
        if X.shape != expect:
            return [Violation("shape", float("inf"))]
        if not 1 <= self.k <= self.n:
            return [Violation("dims", float(self.k))]
        amb = _AMBIENT[self.tag]
        if amb == "orthogonal":
            return OrthogonalPoint(X).violations(tau_mem, tau_rank)
        if amb == "stiefel":
            return StiefelPoint(X).violations(tau_mem, tau_rank)
        return FullRankPoint(X).violations(tau_mem, tau_rank)


def _square_violations(A):
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return [Violation("shape", float("inf"))]
    return []


def validate(pt, tau_mem=TAU_MEM, tau_rank=TAU_RANK):
    """Named violations of the model's defining equations (empty when valid)."""
    return pt.violations(tau_mem, tau_rank)


def is_valid(pt, tau_mem=TAU_MEM, tau_rank=TAU_RANK):
    return not validate(pt, tau_mem, tau_rank)


# -- samplers ----------------------------------------------------------------

def _haar(rng, n, k):
    Q, _ = qr_positive(rng.standard_normal((n, k)))
    return Q


def _gl(rng, n, k, tau_rank):
    while True:
        S = rng.standard_normal((n, k))
        if np.linalg.svd(S, compute_uv=False)[-1] > max(tau_rank, 1e-3):
            return S


def random_point(model, n, k=None, seed=0, ab=(1, -1), tau_rank=TAU_RANK):
    """Deterministic random point of the given model (or quotient tag)."""
    if k is None:
        k = n if model in ("orthogonal", "spd", "GL/O") else 1
    if not (isinstance(n, (int, np.integer)) and 1 <= k <= n):
        raise ManifoldError(f"invalid dimensions n={n}, k={k}")
    rng = np.random.default_rng(seed)
    if model in ("stiefel", "sphere"):
        return StiefelPoint(_haar(rng, n, 1 if model == "sphere" else k))
    if model == "orthogonal":
        return OrthogonalPoint(_haar(rng, n, n))
    if model in ("projection", "involution", "quadratic"):
        Y = _haar(rng, n, k)
        P = Y @ Y.T
        if model == "projection":
            return ProjectionPoint(P, k)
        a, b = (1, -1) if model == "involution" else ab
        a, b = Fraction(a), Fraction(b)
        if a == b:
            raise ManifoldError("quadratic model needs a != b")
        W = float(a - b) * P + float(b) * np.eye(n)
        if model == "involution":
            return InvolutionPoint(W, k)
        return QuadraticModelPoint(W, k, a, b)
    if model == "fullrank":
        return FullRankPoint(_gl(rng, n, k, tau_rank))
    if model == "spd":
        G = rng.standard_normal((n, n))
        return SpdPoint(G.T @ G + 1e-2 * np.eye(n))
    if model in QUOTIENT_TAGS:
        amb = _AMBIENT[model]
        if amb == "orthogonal":
            rep = _haar(rng, n, n)
        elif amb == "stiefel":
            rep = _haar(rng, n, k)
        elif amb == "fullrank":
            rep = _gl(rng, n, k, tau_rank)
        else:
            rep = _gl(rng, n, n, tau_rank)
        return QuotientPoint(rep, model, n, k)
    raise ManifoldError(f"unknown model {model!r}")


# -- Stiefel kernels -----------------------------------------------------------

def _sym(M):
    return 0.5 * (M + np.swapaxes(M, -1, -2))


def stiefel_tangent_project(Y, G):
    """Project an ambient ``n x k`` direction onto the tangent space at ``Y``.

    Works on single matrices or stacks ``(B, n, k)``.
    """
    Y = _as_float(getattr(Y, "Y", Y))
    G = _as_float(G)
    if Y.shape != G.shape:
        raise ManifoldError(f"shape mismatch {Y.shape} vs {G.shape}")
    return G - Y @ _sym(np.swapaxes(Y, -1, -2) @ G)


def stiefel_retract(Y, D, tol=TAU_RANK):
    """QR retraction ``qf(Y + D)`` with positive ``R`` diagonal.

    Raises :class:`RankDeficientError` if ``Y + D`` loses rank; shrink the step.
    """
    Y = _as_float(getattr(Y, "Y", Y))
    Q, _ = qr_positive(Y + _as_float(D), tol=tol)
    return StiefelPoint(Q)


def stiefel_retract_batch(Y, D):
    """Batched QR retraction on ``(B, n, k)`` stacks (no rank check)."""
    Q, R = np.linalg.qr(Y + D)
    s = np.sign(np.diagonal(R, axis1=-2, axis2=-1))
    s[s == 0] = 1.0
    return Q * s[:, None, :]


# -- JSON point files ----------------------------------------------------------

def point_to_json_dict(pt):
    M = _point_matrix(pt)
    n = M.shape[0]
    out = {"model": pt.model, "n": int(n), "k": int(_point_k(pt, M)),
           "data": [float(x) for x in np.asarray(M, dtype=float).ravel()]}
    if isinstance(pt, QuadraticModelPoint):
        out["ab"] = [str(pt.a), str(pt.b)]
    return out


def _point_matrix(pt):
    for attr in ("P", "W", "Y", "S", "A", "rep", "Q"):
        if hasattr(pt, attr):
            return np.asarray(getattr(pt, attr))
    raise ManifoldError(f"not a point: {pt!r}")


def _point_k(pt, M):
    if hasattr(pt, "k"):
        return pt.k
    return M.shape[1] if isinstance(pt, (StiefelPoint, FullRankPoint)) else M.shape[0]


def point_from_json_dict(d):
    try:
        model, n, k = d["model"], int(d["n"]), int(d["k"])
        data = np.asarray(d["data"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifoldError(f"malformed point JSON: {exc}") from exc
    tall = model in ("stiefel", "sphere", "fullrank") or model in _REP_IS_TALL
    shape = (n, k) if tall else (n, n)
    if data.size != shape[0] * shape[1]:
        raise ManifoldError(f"{model} point needs {shape[0] * shape[1]} entries, got {data.size}")
    M = data.reshape(shape)
    if model == "projection":
        return ProjectionPoint(M, k)
    if model == "involution":
        return InvolutionPoint(M, k)
    if model == "quadratic":
        a, b = (Fraction(x) for x in d.get("ab", (1, -1)))
        return QuadraticModelPoint(M, k, a, b)
    if model in ("stiefel", "sphere"):
        return StiefelPoint(M)
    if model == "orthogonal":
        return OrthogonalPoint(M)
    if model == "fullrank":
        return FullRankPoint(M)
    if model == "spd":
        return SpdPoint(M)
    if model in QUOTIENT_TAGS:
        return QuotientPoint(M, model, n, k)
    raise ManifoldError(f"unknown model {model!r}")


__all__ = [
    "TAU_MEM", "TAU_RANK", "QUOTIENT_TAGS", "ManifoldError", "RankDeficientError",
    "Violation", "ProjectionPoint", "InvolutionPoint", "QuadraticModelPoint",
    "StiefelPoint", "OrthogonalPoint", "FullRankPoint", "SpdPoint", "QuotientPoint",
    "validate", "is_valid", "random_point", "stiefel_tangent_project",
    "stiefel_retract", "stiefel_retract_batch", "point_to_json_dict",
    "point_from_json_dict",
]
