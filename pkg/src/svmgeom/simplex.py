"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves ``min c.x  s.t.  A x = b, x >= 0``. Problems here are small
feasibility questions, so the tableau is dense and pivots are vectorised
row operations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError

__all__ = ["LPResult", "simplex", "min_l1_residual"]


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float
    infeasibility: float  # optimum of the phase-one problem
    pivots: int

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def _pivot(T, row, col):
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    T -= np.outer(factor, T[row])


def _bland_loop(T, basis, allowed, rc_tol, piv_tol, budget):
    """Run pivots until optimal. Returns ("optimal" | "unbounded", pivots)."""
    m = T.shape[0] - 1
    pivots = 0
    while True:
        cost = T[-1, :-1]
        candidates = np.flatnonzero((cost < -rc_tol) & allowed)
        if candidates.size == 0:
            return "optimal", pivots
        col = candidates[0]
        column = T[:m, col]
        rows = np.flatnonzero(column > piv_tol)
        if rows.size == 0:
            return "unbounded", pivots
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        row = ties[np.argmin(np.asarray(basis)[ties])]
        _pivot(T, row, col)
        basis[row] = col
        pivots += 1
        if pivots > budget:
            raise SolverError(f"simplex exceeded {budget} pivots")


def simplex(c, A_eq, b_eq, feas_tol=1e-9, piv_tol=1e-11, max_pivots=50_000) -> LPResult:
    """Two-phase simplex. ``feas_tol`` is relative to max(1, |b|_inf)."""
    A = np.array(A_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # phase one: artificial identity block, minimise their sum
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    allowed = np.ones(n + m, dtype=bool)

    _, pivots = _bland_loop(T, basis, allowed, 1e-10, piv_tol, max_pivots)
    infeas = max(0.0, -T[-1, -1])
    if infeas > feas_tol * max(1.0, float(np.abs(b).max(initial=0.0))):
        return LPResult("infeasible", None, np.nan, infeas, pivots)

    # drive remaining artificials out of the basis; drop redundant rows
    keep = []
    for row in range(m):
        if basis[row] >= n:
            nz = np.flatnonzero(np.abs(T[row, :n]) > piv_tol)
            if nz.size == 0:
                continue
            _pivot(T, row, nz[0])
            basis[row] = nz[0]
            pivots += 1
        keep.append(row)
    T = np.vstack([T[keep][:, list(range(n)) + [n + m]], np.zeros((1, n + 1))])
    basis = [basis[r] for r in keep]
    A, b = A[keep], b[keep]
    m = len(keep)

    cb = c[basis]
    T[-1, :n] = c - cb @ T[:m, :n]
    T[-1, -1] = -cb @ T[:m, -1]
    rc_tol = 1e-10 * max(1.0, float(np.abs(c).max(initial=0.0)))
    status, more = _bland_loop(
        T, basis, np.ones(n, dtype=bool), rc_tol, piv_tol, max_pivots - pivots
    )
    pivots += more

    x = np.zeros(n)
    if m:
        # recompute the basic solution from the original rows to shed drift
        xb, *_ = np.linalg.lstsq(A[:, basis], b, rcond=None)
        x[basis] = np.maximum(xb, 0.0)
    if status == "unbounded":
        return LPResult("unbounded", x, -np.inf, infeas, pivots)
    return LPResult("optimal", x, float(c @ x), infeas, pivots)


def min_l1_residual(A_eq, b_eq, **kwargs):
    """Minimise |A x - b|_1 over x >= 0.

    Returns ``(x, residual)``. Zero residual certifies feasibility of
    ``A x = b, x >= 0``; a small one measures how far an inexact right-hand
    side is from the feasible set.
    """
    A = np.asarray(A_eq, dtype=float)
    m, n = A.shape
    big = np.hstack([A, np.eye(m), -np.eye(m)])
    cost = np.concatenate([np.zeros(n), np.ones(2 * m)])
    res = simplex(cost, big, b_eq, **kwargs)
    if res.status != "optimal":
        raise SolverError(f"residual LP ended with status {res.status}")
    x = res.x[:n]
    return x, float(np.abs(A @ x - np.asarray(b_eq, dtype=float)).sum())
