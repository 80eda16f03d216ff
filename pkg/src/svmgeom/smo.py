"""Pairwise coordinate solver for the linear SVM dual.

Minimises 0.5 a^T Q a - sum(a) with Q_ij = y_i y_j x_i.x_j subject to
y^T a = 0 and 0 <= a_i <= C (C may be inf for the hard margin). Each step
moves the maximal violating pair; the gap between the two extreme
violators is the KKT violation used for stopping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, SeparabilityError

__all__ = ["DualResult", "solve_dual", "violating_bounds"]

TAU = 1e-12


@dataclass
class DualResult:
    alpha: np.ndarray
    b: float
    violation: float
    iterations: int
    polished: bool


def _index_sets(alpha, y, C):
    pos = y > 0
    below = alpha < C
    above = alpha > 0
    up = (pos & below) | (~pos & above)
    low = (~pos & below) | (pos & above)
    return up, low


def violating_bounds(alpha, grad, y, C):
    """(m, M) where any intercept b in [m, M] satisfies the KKT conditions."""
    up, low = _index_sets(alpha, y, C)
    yg = -y * grad
    return float(yg[up].max()), float(yg[low].min())


def _intercept(alpha, grad, y, C, free_tol):
    yg = -y * grad
    free = (alpha > free_tol) & (alpha < C - free_tol)
    if np.any(free):
        return float(yg[free].mean())
    m, M = violating_bounds(alpha, grad, y, C)
    return 0.5 * (m + M)


def _max_violation(alpha, grad, y, C):
    m, M = violating_bounds(alpha, grad, y, C)
    return max(0.0, m - M)


def _polish(Q, y, C, alpha, free_tol, rounds=4):
    """Solve the equality system on the current free set exactly.

    Margin vectors satisfy Q_F a_F + y_F b = 1 - Q_{F,U} C; weights at
    the upper bound stay at C. Returns refined ``alpha`` and ``b``, or
    ``None`` when the free set is empty or the solution leaves the box.
    """
    n = len(y)
    finite = np.isfinite(C)
    free = (alpha > free_tol) & (~finite | (alpha < C - free_tol))
    upper = finite & (alpha >= C - free_tol) if finite else np.zeros(n, bool)
    for _ in range(rounds):
        F = np.flatnonzero(free)
        if F.size == 0:
            return None
        U = np.flatnonzero(upper)
        k = F.size
        K = np.zeros((k + 1, k + 1))
        K[:k, :k] = Q[np.ix_(F, F)]
        K[:k, k] = y[F]
        K[k, :k] = y[F]
        rhs = np.ones(k + 1)
        rhs[k] = 0.0
        if U.size:
            rhs[:k] -= C * Q[np.ix_(F, U)].sum(axis=1)
            rhs[k] = -C * y[U].sum()
        sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
        if np.linalg.norm(K @ sol - rhs) > 1e-9 * max(1.0, np.linalg.norm(rhs)):
            return None
        aF = sol[:k]
        neg = aF <= 0
        over = finite & (aF >= C) if finite else np.zeros(k, bool)
        if not (neg.any() or over.any()):
            out = np.zeros(n)
            out[F] = aF
            if U.size:
                out[U] = C
            return out, float(sol[k])
        free[F[neg | over]] = False
        if finite:
            upper[F[over]] = True
    return None


def solve_dual(X, y, C=np.inf, tol=1e-6, max_iter=1_000_000, alpha0=None,
               polish=True) -> DualResult:
    """Pairwise coordinate descent on the dual.

    ``alpha0`` warm-starts the solver; it must be feasible for ``C``.
    Raises :class:`ConvergenceError` after ``max_iter`` pair updates and
    :class:`SeparabilityError` when the hard-margin dual is unbounded.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    K = X @ X.T
    Q = K * np.outer(y, y)
    diag = np.diag(K)
    alpha = np.zeros(n) if alpha0 is None else np.clip(np.array(alpha0, float), 0, C)
    grad = Q @ alpha - 1.0
    pos = y > 0

    it = 0
    viol = np.inf
    while True:
        yg = -y * grad
        below = alpha < C
        above = alpha > 0
        up = (pos & below) | (~pos & above)
        low = (~pos & below) | (pos & above)
        i = int(np.argmax(np.where(up, yg, -np.inf)))
        j = int(np.argmin(np.where(low, yg, np.inf)))
        viol = yg[i] - yg[j]
        if viol <= tol:
            break
        if it >= max_iter:
            raise ConvergenceError(
                f"dual solver did not converge in {max_iter} pair updates",
                violation=float(viol), iterations=it,
            )
        it += 1
        curv = diag[i] + diag[j] - 2.0 * K[i, j]
        step = viol / curv if curv > TAU else np.inf
        cap_i = C - alpha[i] if y[i] > 0 else alpha[i]
        cap_j = alpha[j] if y[j] > 0 else C - alpha[j]
        step = min(step, cap_i, cap_j)
        if not np.isfinite(step):
            raise SeparabilityError("hard-margin dual is unbounded: classes are not separable")
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        # snap to the bounds that limited the step
        if step == cap_i:
            alpha[i] = C if y[i] > 0 else 0.0
        if step == cap_j:
            alpha[j] = 0.0 if y[j] > 0 else C
        grad += step * (y[i] * Q[:, i] - y[j] * Q[:, j])
        if it % 1000 == 0:
            grad = Q @ alpha - 1.0

    grad = Q @ alpha - 1.0
    scale = C if np.isfinite(C) else max(float(alpha.max()), 1.0)
    free_tol = 1e-9 * scale
    b = _intercept(alpha, grad, y, C, free_tol)
    viol = _max_violation(alpha, grad, y, C)
    polished = False
    if polish:
        refined = _polish(Q, y, C, alpha, free_tol)
        if refined is not None:
            a2, b2 = refined
            g2 = Q @ a2 - 1.0
            v2 = _max_violation(a2, g2, y, C)
            if v2 <= viol and abs(a2 @ y) <= 1e-12 * max(1.0, a2.sum()):
                alpha, b, viol, polished = a2, b2, v2, True
    return DualResult(alpha, b, float(viol), it, polished)
