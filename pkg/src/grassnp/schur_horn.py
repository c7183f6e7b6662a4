"""Rank-k orthogonal projections with a prescribed diagonal.

The diagonals of rank-``k`` projections are exactly the points of the
hypersimplex ``{d : 0 <= d_i <= 1, sum d = k}``. :func:`lift_diagonal` builds
such a projection from ``diag(1,...,1,0,...,0)`` with at most ``n - 1``
Givens rotations.

Each rotation is a T-transform of the current diagonal: with the target
sorted decreasingly, take ``j`` the last index whose current entry exceeds
its target and ``l`` the first index after ``j`` whose entry falls short of
its target, then move ``min(a_j - d_j, d_l - a_l)`` from ``j`` to ``l``.
This keeps the target majorized by the current diagonal and matches at
least one more entry per step. Rows and columns not yet matched always form
a diagonal block, so every rotation acts on a diagonal 2 x 2 block and its
angle follows from ``sin^2 = shift / (a_j - a_l)``.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .manifolds import TAU_MEM, ProjectionPoint

MATCH_TOL = 1e-13


class SimplexError(ValueError):
    pass


def check_simplex(d, k, tol=1e-12):
    """Named violations of ``0 <= d_i <= 1`` and ``sum d = k``.

    Exact for rational input; floats get ``tol``.
    """
    d = list(d)
    exact = all(isinstance(x, (int, Fraction)) for x in d)
    t = 0 if exact else tol
    out = []
    lo = min(d) if d else 0
    hi = max(d) if d else 0
    if lo < -t:
        out.append(("lower-bound", float(-lo)))
    if hi > 1 + t:
        out.append(("upper-bound", float(hi - 1)))
    total = sum(Fraction(x) for x in d) if exact else float(np.sum(np.asarray(d, dtype=float)))
    if abs(total - k) > t:
        out.append(("sum", float(abs(total - k))))
    if not 0 <= k <= len(d):
        out.append(("rank", float(k)))
    return out


def lift_diagonal(d, k):
    """Projection ``P`` in ``Gr(k, n)`` with ``diag(P) = d``."""
    bad = check_simplex(d, k)
    if bad:
        raise SimplexError(f"target diagonal is not in the hypersimplex: {bad}")
    target = np.clip(np.asarray([float(x) for x in d]), 0.0, 1.0)
    n = target.size
    order = np.argsort(-target, kind="stable")
    dt = target[order]
    P = np.diag([1.0] * k + [0.0] * (n - k))
    a = np.diag(P).copy()
    for _ in range(n):
        excess = np.flatnonzero(a - dt > MATCH_TOL)
        if excess.size == 0:
            break
        j = excess[-1]
        short = np.flatnonzero(dt[j + 1:] - a[j + 1:] > MATCH_TOL)
        if short.size == 0:
            break
        l = j + 1 + short[0]
        shift = min(a[j] - dt[j], dt[l] - a[l])
        gap = a[j] - a[l]
        s2 = min(max(shift / gap, 0.0), 1.0)
        c, s = np.sqrt(1.0 - s2), np.sqrt(s2)
        G = np.eye(n)
        G[j, j] = G[l, l] = c
        G[j, l], G[l, j] = -s, s
        P = G @ P @ G.T
        P = 0.5 * (P + P.T)
        a = np.diag(P).copy()
    # undo the sorting permutation
    inv = np.empty(n, dtype=int)
    inv[order] = np.arange(n)
    P = P[np.ix_(inv, inv)]
    return ProjectionPoint(P, k)


def diag_of(p, tau_mem=TAU_MEM):
    """The diagonal of a projection; lies in the hypersimplex up to ``tau_mem``."""
    d = np.diag(np.asarray(p.P, dtype=float)).copy()
    return d
