"""Deterministic decomposition conventions shared by every module.

* Symmetric eigendecomposition: eigenvalues descending; each eigenvector is
  signed so that its largest-magnitude entry is positive (ties go to the
  lowest index).
* QR: ``R`` has a positive diagonal, obtained by flipping column signs of
  ``Q``.
* LDL^T: no pivoting; zero pivots are accepted only after the first ``k``
  (the rank), where they are set to exactly zero.
"""
import numpy as np
from scipy.linalg import solve_triangular


class RankDeficientError(np.linalg.LinAlgError):
    """A factorization met a (numerically) zero pivot where it needs a nonzero one."""


def fix_signs(V):
    """Sign each column so its largest-magnitude entry is positive."""
    V = np.array(V, dtype=float, copy=True)
    if V.ndim == 1:
        return fix_signs(V[:, None])[:, 0]
    for c in range(V.shape[1]):
        col = V[:, c]
        # argmax returns the first maximiser, i.e. the lowest index on ties
        if col[np.argmax(np.abs(col))] < 0:
            V[:, c] = -col
    return V


def sym_eig(M):
    """Eigenpairs of the symmetric part of ``M`` under the fixed convention."""
    M = np.asarray(M, dtype=float)
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    order = np.argsort(-w, kind="stable")
    return w[order], fix_signs(V[:, order])


def qr_positive(A, mode="reduced", tol=0.0):
    """QR factorization with ``diag(R) > 0``.

    Raises :class:`RankDeficientError` when some ``|R_ii| <= tol * max(1, |A|)``.
    """
    A = np.asarray(A, dtype=float)
    Q, R = np.linalg.qr(A, mode=mode)
    d = np.diag(R).copy()
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    if np.any(np.abs(d) <= tol * scale):
        raise RankDeficientError(f"QR pivot {np.abs(d).min():.3e} below tolerance")
    s = np.where(d < 0, -1.0, 1.0)
    Q = Q.copy()
    Q[:, :len(s)] *= s
    R = s[:, None] * R
    return Q, R


def ldl_nopivot(M, k, tol=1e-8):
    """``M = L D L^T`` without pivoting for a PSD ``M`` of rank ``k``.

    The first ``k`` pivots must be nonzero (relative to ``tol * max|M|``);
    the trailing ones must vanish to that tolerance and are set to 0, with
    their columns of ``L`` below the diagonal set to 0. Returns ``(L, d)``.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    scale = max(float(np.abs(M).max(initial=0.0)), np.finfo(float).tiny)
    L = np.eye(n)
    d = np.zeros(n)
    for j in range(n):
        piv = M[j, j] - np.dot(L[j, :j] ** 2, d[:j])
        if abs(piv) <= tol * scale:
            if j < k:
                raise RankDeficientError(
                    f"zero pivot at position {j + 1} of {k}: the leading {k}x{k} block "
                    "is singular; perturb the input or reorder rows")
            d[j] = 0.0
            continue
        if j >= k:
            raise RankDeficientError(
                f"nonzero pivot {piv:.3e} beyond the declared rank {k}")
        d[j] = piv
        L[j + 1:, j] = (M[j + 1:, j] - L[j + 1:, :j] @ (L[j, :j] * d[:j])) / piv
    return L, d


def lower_solve(L, B):
    return solve_triangular(L, B, lower=True, unit_diagonal=True)
