"""Closed-form optima, exact clique values and a multistart local optimizer.

The multistart optimizer is a numerical cross-check, not a global solver:
it can only confirm that local search never beats a known optimum and
usually reaches it.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graphs import clique_number
from .linalg import fix_signs, sym_eig
from .manifolds import (OrthogonalPoint, ProjectionPoint, StiefelPoint, random_point,
                        stiefel_retract_batch, stiefel_tangent_project)
from .reductions import motzkin_straus_value, stiefel_pullback


class SolverError(ValueError):
    pass


# -- linear objectives ---------------------------------------------------------

def _matrix(A, name="A"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise SolverError(f"{name} must be a matrix, got shape {A.shape}")
    return A


def lp_stiefel(A):
    """``max tr(A^T X)`` over ``V(k, n)``: the nuclear norm, at ``X = U V^T``."""
    A = _matrix(A)
    n, k = A.shape
    if n < k or k < 1:
        raise SolverError(f"lp_stiefel needs an n x k matrix with n >= k >= 1, got {A.shape}")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    return float(np.sum(s)), StiefelPoint(U @ Vt)


def lp_grassmann(A, k):
    """``max tr(A^T P)`` over ``Gr(k, n)``: the ``k`` top eigenvalues of ``(A + A^T)/2``."""
    A = _matrix(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise SolverError(f"lp_grassmann needs a square matrix, got {A.shape}")
    if not 1 <= k <= n:
        raise SolverError(f"k must lie in 1..{n}, got {k}")
    w, V = sym_eig(A)
    Qk = V[:, :k]
    return float(np.sum(w[:k])), ProjectionPoint(Qk @ Qk.T, k)


class SpdSup(enum.Enum):
    """Supremum of ``tr(A^T X)`` over the SPD cone."""
    ZERO = "0"
    PLUS_INFINITY = "+inf"


def lp_spd_sup(A, tol=1e-12):
    """``0`` if ``A + A^T`` is negative semidefinite (up to ``tol * max(1, |A|)``), else ``+inf``."""
    A = _matrix(A)
    if A.shape[0] != A.shape[1]:
        raise SolverError(f"lp_spd_sup needs a square matrix, got {A.shape}")
    lam = np.linalg.eigvalsh(A + A.T)[-1]
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    return SpdSup.ZERO if lam <= tol * scale else SpdSup.PLUS_INFINITY


def qp_sphere_homogeneous(A, tol=1e-12):
    """``max x^T A x`` on the unit sphere: the top eigenpair of symmetric ``A``."""
    A = _matrix(A)
    if A.shape[0] != A.shape[1]:
        raise SolverError(f"expected a square matrix, got {A.shape}")
    if np.abs(A - A.T).max(initial=0.0) > tol * max(1.0, np.abs(A).max(initial=0.0)):
        raise SolverError("qp_sphere_homogeneous needs a symmetric matrix")
    w, V = sym_eig(A)
    return float(w[0]), fix_signs(V[:, 0])


def exact_ms_value(g, k):
    """``k^2 (1 - 1/omega)``, the hypersimplex optimum, for ``omega >= k``."""
    omega = clique_number(g)
    if omega < k:
        raise SolverError(f"omega < k: clique number {omega} is below k = {k}")
    if k < 1:
        raise SolverError(f"k must be positive, got {k}")
    return motzkin_straus_value(k, omega)


# -- copositivity grid oracle ----------------------------------------------------

MAX_GRID_N = 8
MAX_GRID_M = 40


@dataclass(frozen=True)
class GridVerdict:
    """Result of :func:`copositive_brute`.

    ``counterexample`` is the grid minimizer (lexicographically first among
    ties) when the minimum is negative, else ``None``.
    """
    copositive_on_grid: bool
    minimum: Fraction
    argmin: tuple
    counterexample: tuple | None
    points_checked: int


def _compositions(parts, total, cache):
    """All nonnegative integer vectors of length ``parts`` summing to ``total``, lexicographic."""
    key = (parts, total)
    if key not in cache:
        if parts == 1:
            cache[key] = np.array([[total]], dtype=np.int64)
        else:
            blocks = []
            for first in range(total + 1):
                tail = _compositions(parts - 1, total - first, cache)
                blocks.append(np.hstack([np.full((len(tail), 1), first, dtype=np.int64), tail]))
            cache[key] = np.vstack(blocks)
    return cache[key]


def copositive_brute(A, m):
    """Minimize ``x^T A x`` over the simplex grid with step ``1/m``, exactly.

    ``A`` must be symmetric with rational (or exactly representable) entries.
    The grid is enumerated in lexicographic order of ``m x``; signs are
    decided in integer arithmetic after clearing denominators.
    """
    rows = [[Fraction(x) for x in r] for r in A]
    n = len(rows)
    if n < 1 or any(len(r) != n for r in rows):
        raise SolverError("copositive_brute needs a square matrix")
    if n > MAX_GRID_N or not 1 <= m <= MAX_GRID_M:
        raise SolverError(f"grid limits exceeded: need n <= {MAX_GRID_N} and 1 <= m <= {MAX_GRID_M}")
    if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(i)):
        raise SolverError("copositive_brute needs a symmetric matrix; pass (A + A^T)/2")
    L = math.lcm(*(x.denominator for r in rows for x in r))
    Aint = [[int(x * L) for x in r] for r in rows]
    bound = max(abs(x) for r in Aint for x in r) * (m * n) ** 2
    dtype = np.int64 if bound < 2 ** 62 else object
    Ai = np.array(Aint, dtype=dtype)
    cache = {}
    best, best_c, count = None, None, 0
    # split on the leading coordinate to keep blocks small
    for first in range(m + 1):
        if n == 1:
            C = np.array([[m]], dtype=dtype) if first == m else None
        else:
            tail = _compositions(n - 1, m - first, cache).astype(dtype)
            C = np.hstack([np.full((len(tail), 1), first, dtype=dtype), tail])
        if C is None:
            continue
        q = np.einsum("ij,ij->i", C @ Ai, C)
        count += len(q)
        i = int(np.argmin(q))
        if best is None or q[i] < best:
            best, best_c = int(q[i]), tuple(int(c) for c in C[i])
    minimum = Fraction(best, L * m * m)
    x = tuple(Fraction(c, m) for c in best_c)
    return GridVerdict(minimum >= 0, minimum, x, x if minimum < 0 else None, count)


# -- multistart Riemannian gradient ascent ------------------------------------------

ARMIJO_STEP = 1.0
ARMIJO_SHRINK = 0.5
ARMIJO_C = 1e-4
ARMIJO_MAX_BACKTRACKS = 30
GRAD_TOL = 1e-9
SUPPORTED_MODELS = ("grassmann", "stiefel", "orthogonal", "sphere")


@dataclass(frozen=True)
class StartRecord:
    start: int
    seed: int
    iterations: int
    final_value: float
    grad_norm: float
    status: str


@dataclass
class SolveReport:
    method: str
    model: str
    sense: str
    best_value: float
    best_start: int | None
    best_point: object
    best_projection: ProjectionPoint | None = None
    per_start: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    theoretical_value: object = None
    gap: float | None = None
    provenance: dict = field(default_factory=dict)
    traces: list | None = None
    extra: dict = field(default_factory=dict)

    def to_json_dict(self):
        from .manifolds import point_to_json_dict

        tv = self.theoretical_value
        out = {
            "method": self.method, "model": self.model, "sense": self.sense,
            "best_value": _json_value(self.best_value),
            "best_start": self.best_start,
            "best_point": None if self.best_point is None else point_to_json_dict(self.best_point),
        }
        if self.best_projection is not None:
            out["best_projection"] = point_to_json_dict(self.best_projection)
        out["per_start"] = [dict(r.__dict__) for r in self.per_start]
        out["config"] = self.config
        out["theoretical_value"] = None if tv is None else {"exact": str(tv), "float": float(tv)}
        out["gap"] = self.gap
        out["provenance"] = self.provenance
        out.update(self.extra)
        return out

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["start", "seed", "iterations", "final_value", "grad_norm", "status"])
        for r in self.per_start:
            w.writerow([r.start, r.seed, r.iterations, repr(r.final_value), repr(r.grad_norm), r.status])
        return buf.getvalue()


def _json_value(v):
    if isinstance(v, SpdSup):
        return {"tag": v.value}
    return v


def _prepare(inst):
    if inst.model not in SUPPORTED_MODELS:
        raise SolverError(f"multistart_rgd does not support model {inst.model!r}; "
                          f"supported: {', '.join(SUPPORTED_MODELS)}")
    work = stiefel_pullback(inst) if inst.model == "grassmann" else inst
    n = inst.n
    cols = {"stiefel": inst.k, "grassmann": inst.k, "orthogonal": n, "sphere": 1}[inst.model]
    if work.objective.shape != (n, cols):
        raise SolverError(f"objective shape {work.objective.shape} does not match ({n}, {cols})")
    return work, cols


def _initial(model, n, cols, seed):
    if model == "orthogonal":
        return random_point("orthogonal", n, seed=seed).Q
    return random_point("stiefel", n, cols, seed=seed).Y


def multistart_rgd(inst, starts=20, iters=500, seed=0, grad_tol=GRAD_TOL, record_trace=False):
    """Riemannian gradient ascent from ``starts`` random points, all advanced together.

    Start ``s`` is seeded with ``seed ^ s``. Each iteration takes the tangent
    gradient ``G - Y sym(Y^T G)`` of the analytic Euclidean gradient, runs an
    Armijo backtracking search from step 1, and retracts by QR. Once a step
    passes, halving continues while the objective keeps rising; every step
    taken this way still satisfies the Armijo condition. A start stops
    when its tangent gradient norm falls to ``grad_tol``, when ``iters``
    steps are taken, or when no step passes the Armijo test (its iterate
    would never move again). Minimization maximizes ``-f``.
    """
    if starts < 1 or iters < 0:
        raise SolverError("need starts >= 1 and iters >= 0")
    work, cols = _prepare(inst)
    n = inst.n
    sgn = 1.0 if inst.sense == "maximize" else -1.0
    cp = work.objective.compile()

    def fg(Y):
        v, g = cp.value_and_grad(Y)
        return sgn * v, sgn * g

    seeds = [int(seed) ^ s for s in range(starts)]
    Y = np.stack([_initial(inst.model, n, cols, sd) for sd in seeds])
    f, G = fg(Y)
    xi = stiefel_tangent_project(Y, G)
    gn = np.linalg.norm(xi, axis=(1, 2))
    count = np.zeros(starts, dtype=int)
    status = np.array(["max-iters"] * starts, dtype=object)
    active = gn > grad_tol
    status[~active] = "converged"
    traces = [[float(sgn * v)] for v in f] if record_trace else None

    for _ in range(iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Ya, fa, xa, g2 = Y[idx], f[idx], xi[idx], gn[idx] ** 2
        t = np.full(idx.size, ARMIJO_STEP)
        accepted = np.zeros(idx.size, dtype=bool)
        Ynew = Ya.copy()
        pending = np.arange(idx.size)
        for _bt in range(ARMIJO_MAX_BACKTRACKS + 1):
            Yc = stiefel_retract_batch(Ya[pending], t[pending, None, None] * xa[pending])
            fc = sgn * cp.value(Yc)
            ok = fc >= fa[pending] + ARMIJO_C * t[pending] * g2[pending]
            Ynew[pending[ok]] = Yc[ok]
            accepted[pending[ok]] = True
            pending = pending[~ok]
            if pending.size == 0:
                break
            t[pending] *= ARMIJO_SHRINK
        # keep halving while it still improves: each such step also passes the
        # Armijo test, and it breaks the step-1/step-1/2 overshoot cycle
        Yacc = Ynew[accepted]
        facc = sgn * cp.value(Yacc) if accepted.any() else np.zeros(0)
        grow = np.flatnonzero(accepted)
        pos = np.arange(grow.size)
        for _ext in range(ARMIJO_MAX_BACKTRACKS):
            if pos.size == 0:
                break
            t[grow[pos]] *= ARMIJO_SHRINK
            sel = grow[pos]
            Yc = stiefel_retract_batch(Ya[sel], t[sel, None, None] * xa[sel])
            fc = sgn * cp.value(Yc)
            better = fc > facc[pos]
            Yacc[pos[better]] = Yc[better]
            facc[pos[better]] = fc[better]
            pos = pos[better]
        Ynew[accepted] = Yacc
        stalled = idx[~accepted]
        active[stalled] = False
        status[stalled] = "line-search-stalled"
        acc = idx[accepted]
        if acc.size == 0:
            continue
        Y[acc] = Ynew[accepted]
        count[acc] += 1
        f[acc], G = fg(Y[acc])
        xi[acc] = stiefel_tangent_project(Y[acc], G)
        gn[acc] = np.linalg.norm(xi[acc], axis=(1, 2))
        done = acc[gn[acc] <= grad_tol]
        active[done] = False
        status[done] = "converged"
        if record_trace:
            for i in acc:
                traces[i].append(float(sgn * f[i]))

    values = sgn * f
    # ties go to the lowest start index
    best = int(np.argmax(f))
    records = [StartRecord(s, seeds[s], int(count[s]), float(values[s]), float(gn[s]), str(status[s]))
               for s in range(starts)]
    Yb = Y[best]
    if inst.model == "orthogonal":
        point = OrthogonalPoint(Yb)
    else:
        point = StiefelPoint(Yb)
    proj = ProjectionPoint(Yb @ Yb.T, inst.k) if inst.model == "grassmann" else None
    tv = inst.theoretical_value
    gap = None
    if tv is not None:
        gap = float(sgn * (float(tv) - float(values[best])))
    config = {"starts": starts, "iters": iters, "seed": int(seed),
              "step_rule": {"rule": "armijo", "initial_step": ARMIJO_STEP,
                            "shrink": ARMIJO_SHRINK, "sufficient_decrease": ARMIJO_C,
                            "max_backtracks": ARMIJO_MAX_BACKTRACKS,
                            "continue_halving_while_improving": True},
              "grad_tol": grad_tol, "retraction": "qr",
              "pulled_back": inst.model == "grassmann"}
    return SolveReport("multistart-rgd", inst.model, inst.sense, float(values[best]), best,
                       point, proj, records, config, tv, gap, dict(inst.provenance), traces)


# -- closed-form reports for linear instances ------------------------------------------

def linear_coefficients(inst):
    """The matrix ``A`` with ``f(X) = tr(A^T X)`` for a homogeneous linear objective.

    For symmetric variables an off-diagonal coefficient ``c`` of ``p_ij`` is
    split as ``A_ij = A_ji = c/2``.
    """
    f = inst.objective
    if not f.is_zero() and not f.is_homogeneous(1):
        raise SolverError("closed-form methods need a homogeneous linear objective")
    A = np.zeros(f.shape)
    for mono, c in f.terms.items():
        ((i, j), _), = mono
        if f.symmetric and i != j:
            A[i - 1, j - 1] += float(c) / 2
            A[j - 1, i - 1] += float(c) / 2
        else:
            A[i - 1, j - 1] += float(c)
    return A


def solve_closed_form(inst):
    """Exact optimum of a linear objective on ``stiefel``, ``grassmann``, ``spd`` or
    a quadratic form on ``sphere``."""
    if inst.sense != "maximize":
        raise SolverError("closed-form methods maximize")
    config = {"method": "closed-form"}
    if inst.model == "stiefel":
        value, pt = lp_stiefel(linear_coefficients(inst))
        proj = None
    elif inst.model == "grassmann":
        value, pt = lp_grassmann(linear_coefficients(inst), inst.k)
        proj = pt
    elif inst.model == "spd":
        value, pt, proj = lp_spd_sup(linear_coefficients(inst)), None, None
    elif inst.model == "sphere":
        f = inst.objective
        if not f.is_zero() and not f.is_homogeneous(2):
            raise SolverError("closed-form sphere method needs a homogeneous quadratic")
        n = inst.n
        A = np.zeros((n, n))
        for mono, c in f.terms.items():
            idx = [i for (i, _), e in mono for _ in range(e)]
            A[idx[0] - 1, idx[1] - 1] += float(c) / 2
            A[idx[1] - 1, idx[0] - 1] += float(c) / 2
        value, x = qp_sphere_homogeneous(A)
        pt, proj = StiefelPoint(x[:, None]), None
    else:
        raise SolverError(f"no closed form for model {inst.model!r}")
    tv = inst.theoretical_value
    gap = None
    if tv is not None and not isinstance(value, SpdSup):
        gap = float(tv) - float(value)
    return SolveReport("closed-form", inst.model, inst.sense, value, None, pt, proj, [],
                       config, tv, gap, dict(inst.provenance))
