"""Two-class geometry: diameter, gap, data piling and convex directions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, require_direction
from .errors import ConvergenceError, DegenerateDirectionError
from .simplex import min_l1_residual, simplex

__all__ = [
    "PilingCertificate",
    "HullWitness",
    "GapResult",
    "CPIntersection",
    "diameter",
    "gap",
    "solve_affine_piling",
    "pinv_psd",
    "mdp_direction",
    "has_complete_piling",
    "is_convex_direction",
    "cp_intersection_lp",
    "in_general_position",
]

DEFAULT_RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PilingCertificate:
    """Unit direction v with v.x_i = a*y_i + b for every training point.

    ``raw_v``/``raw_b`` are the unnormalised solution of X v + b 1 = y
    (note the opposite sign convention for the offset there).
    """

    v: np.ndarray
    a: float
    b: float
    raw_v: np.ndarray
    raw_b: float

    def to_dict(self):
        return {"v": self.v.tolist(), "a": self.a, "b": self.b,
                "raw_v": self.raw_v.tolist(), "raw_b": self.raw_b}


@dataclass(frozen=True, eq=False)
class HullWitness:
    """Convex weights over each class and the hull points they produce."""

    lambda_plus: np.ndarray
    lambda_minus: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray

    @classmethod
    def from_weights(cls, data: Dataset, lam_plus, lam_minus) -> "HullWitness":
        lam_plus = np.asarray(lam_plus, dtype=float)
        lam_minus = np.asarray(lam_minus, dtype=float)
        return cls(lam_plus, lam_minus, lam_plus @ data.X_plus, lam_minus @ data.X_minus)

    def check(self, data: Dataset, tol=1e-8) -> bool:
        ok = True
        for lam, X, c in ((self.lambda_plus, data.X_plus, self.c_plus),
                          (self.lambda_minus, data.X_minus, self.c_minus)):
            ok &= bool(np.all(lam >= -tol)) and abs(lam.sum() - 1) <= tol
            ok &= np.linalg.norm(lam @ X - c) <= tol * max(1.0, np.linalg.norm(c))
        return bool(ok)

    def to_dict(self):
        return {k: getattr(self, k).tolist()
                for k in ("lambda_plus", "lambda_minus", "c_plus", "c_minus")}


@dataclass(frozen=True, eq=False)
class GapResult:
    gap: float
    separable: bool
    lower: float
    upper: float
    witness: HullWitness
    iterations: int

    def __float__(self):
        return self.gap


@dataclass(frozen=True, eq=False)
class CPIntersection:
    """Outcome of the convex-and-piling feasibility program."""

    feasible: bool
    v: np.ndarray | None = None
    offset: float | None = None
    witness: HullWitness | None = None
    infeasibility: float = 0.0


def diameter(data: Dataset) -> float:
    """Largest distance between a positive and a negative point (brute force)."""
    diff = data.X_plus[:, None, :] - data.X_minus[None, :, :]
    return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", diff, diff))))


def _affine_minimizer(S):
    """Weights mu (summing to one) minimising |mu @ S|."""
    k = S.shape[0]
    K = np.empty((k + 1, k + 1))
    K[:k, :k] = S @ S.T
    K[:k, k] = K[k, :k] = 1.0
    K[k, k] = 0.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    mu = sol[:k]
    return mu / mu.sum()


def gap(data: Dataset, tol: float | None = None, max_iter: int = 10_000) -> GapResult:
    """Distance between the two class hulls via Wolfe's minimum-norm-point method.

    The polytope is the Minkowski difference conv(X+) - conv(X-); its
    vertices x_i - x_j are generated lazily by a linear minimisation oracle.
    Stops when the bracket [z.q/|z|, |z|] on the distance is narrower than
    ``tol`` (default 1e-8 * diameter). A zero-length iterate means the hulls
    intersect and the gap is 0.
    """
    Xp, Xm = data.X_plus, data.X_minus
    if tol is None:
        tol = 1e-8 * max(diameter(data), 1e-300)
    eps = 1e-12

    z0 = data.mean_plus - data.mean_minus
    corral = [(int(np.argmin(Xp @ -z0)), int(np.argmax(Xm @ -z0)))]
    lam = np.array([1.0])
    lower, upper = 0.0, np.inf

    def points(pairs):
        idx = np.array(pairs)
        return Xp[idx[:, 0]] - Xm[idx[:, 1]]

    for it in range(1, max_iter + 1):
        S = points(corral)
        z = lam @ S
        upper = float(np.linalg.norm(z))
        if upper <= tol:
            return _gap_result(data, corral, lam, 0.0, False, 0.0, upper, it)
        i, j = int(np.argmin(Xp @ z)), int(np.argmax(Xm @ z))
        q = Xp[i] - Xm[j]
        lower = float(z @ q) / upper
        if upper - lower <= tol or (i, j) in corral:
            separable = lower > 0
            return _gap_result(data, corral, lam, upper if separable else 0.0,
                               separable, max(lower, 0.0), upper, it)
        corral.append((i, j))
        lam = np.append(lam, 0.0)
        while True:
            S = points(corral)
            mu = _affine_minimizer(S)
            if np.all(mu > eps):
                lam = mu
                break
            bad = mu <= eps
            theta = np.min(lam[bad] / (lam[bad] - mu[bad]))
            lam = lam + theta * (mu - lam)
            drop = lam <= eps
            drop[np.argmin(np.where(bad, lam, np.inf))] = True
            corral = [p for p, dropped in zip(corral, drop) if not dropped]
            lam = lam[~drop]
            lam /= lam.sum()
            if len(corral) == 1:
                lam = np.array([1.0])
                break
    raise ConvergenceError(
        "gap iteration cap reached", lower=max(lower, 0.0), upper=upper
    )


def _gap_result(data, corral, lam, value, separable, lower, upper, it):
    lam_plus = np.zeros(data.n_plus)
    lam_minus = np.zeros(data.n_minus)
    for (i, j), weight in zip(corral, lam):
        lam_plus[i] += weight
        lam_minus[j] += weight
    witness = HullWitness.from_weights(data, lam_plus, lam_minus)
    return GapResult(float(value), bool(separable), float(lower), float(upper), witness, it)


def in_general_position(data: Dataset, rank_tol: float = DEFAULT_RANK_TOL) -> bool:
    """Points affinely independent (if n <= d+1) or spanning R^d affinely."""
    Xt = np.hstack([data.points, np.ones((data.n, 1))])
    s = np.linalg.svd(Xt, compute_uv=False)
    rank = int(np.sum(s > rank_tol * s[0]))
    if rank < min(data.n, data.d + 1):
        return False
    return len(np.unique(data.points, axis=0)) == data.n


def solve_affine_piling(data: Dataset, rank_tol: float = DEFAULT_RANK_TOL):
    """The complete-data-piling direction inside the affine hull of the data.

    Solves X v + b 1 = y with v restricted to the span of the centred data.
    Returns ``None`` when d < n - 1 or [X | 1] lacks full row rank.
    """
    n, d = data.n, data.d
    if d < n - 1:
        return None
    Xt = np.hstack([data.points, np.ones((n, 1))])
    s = np.linalg.svd(Xt, compute_uv=False)
    if np.sum(s > rank_tol * s[0]) < n:
        return None
    center = data.points.mean(axis=0)
    Xc = data.points - center
    # minimum-norm solution lies in the row space of [Xc | 1], so v is in span(Xc)
    sol, *_ = np.linalg.lstsq(np.hstack([Xc, np.ones((n, 1))]), data.labels, rcond=None)
    v, beta = sol[:d], sol[d]
    raw_b = float(beta - v @ center)
    norm = float(np.linalg.norm(v))
    # X v + raw_b = y  <=>  (v/|v|).x = y/|v| - raw_b/|v|
    return PilingCertificate(v / norm, 1.0 / norm, -raw_b / norm, v, raw_b)


def pinv_psd(Xc, rank_tol: float = DEFAULT_RANK_TOL, divisor: float = 1.0):
    """Pseudo-inverse of Xc.T @ Xc / divisor from the SVD of Xc.

    Eigenvalues below rank_tol times the largest are treated as zero.
    """
    _, s, Vt = np.linalg.svd(Xc, full_matrices=False)
    ev = s**2 / divisor
    if ev.size == 0 or ev[0] == 0:
        return np.zeros((Xc.shape[1], Xc.shape[1]))
    keep = ev > rank_tol * ev[0]
    V = Vt[keep].T
    return (V / ev[keep]) @ V.T


def mdp_direction(data: Dataset, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Pseudo-inverse of the global sample covariance applied to the mean difference."""
    delta = data.mean_plus - data.mean_minus
    require_direction(delta, data.scale, "mean difference")
    Xc = data.points - data.points.mean(axis=0)
    w = pinv_psd(Xc, rank_tol, data.n - 1) @ delta
    if np.linalg.norm(w) == 0:
        raise DegenerateDirectionError("maximal data piling direction is zero")
    return w


def has_complete_piling(data: Dataset, v, tol: float = 1e-8):
    """Whether projecting onto ``v`` piles each class onto one value.

    Returns ``(piles, a, b)`` with v.x_i ~ a*y_i + b fitted by least
    squares, i.e. from the projected class means.
    """
    v = require_direction(v, data.scale)
    p = data.points @ v
    mp, mm = p[data.positive].mean(), p[~data.positive].mean()
    a, b = (mp - mm) / 2.0, (mp + mm) / 2.0
    resid = np.max(np.abs(p - (a * data.labels + b)))
    thresh = tol * np.linalg.norm(v) * data.scale
    return bool(resid <= thresh and abs(a) > thresh), float(a), float(b)


def is_convex_direction(data: Dataset, v, tol: float = 1e-7):
    """Whether +-v is a positive multiple of c+ - c- for hull points c+, c-.

    For each orientation s, minimises the L1 residual of
    X+^T l+ - X-^T l- = s v/|v| with sum(l+) = sum(l-) >= 0 by simplex; a
    residual within ``tol`` accepts. Returns ``(ok, witness or None)``.
    """
    v = require_direction(v, data.scale)
    u = v / np.linalg.norm(v)
    d = data.d
    n_p, n_m = data.n_plus, data.n_minus
    # columns: lambda+, lambda-, tau
    A = np.zeros((d + 2, n_p + n_m + 1))
    A[:d, :n_p] = data.X_plus.T
    A[:d, n_p : n_p + n_m] = -data.X_minus.T
    A[d, :n_p] = 1.0
    A[d + 1, n_p : n_p + n_m] = 1.0
    A[d:, -1] = -1.0
    for sign in (1.0, -1.0):
        rhs = np.concatenate([sign * u, [0.0, 0.0]])
        x, resid = min_l1_residual(A, rhs)
        tau = x[-1]
        if resid <= tol and tau > 0:
            return True, HullWitness.from_weights(
                data, x[:n_p] / x[:n_p].sum(), x[n_p : n_p + n_m] / x[n_p : n_p + n_m].sum()
            )
    return False, None


def cp_intersection_lp(data: Dataset, feas_tol: float = 1e-9) -> CPIntersection:
    """Decide whether some convex direction also gives complete data piling.

    Feasibility program in (alpha, beta, b+, b-, tau) >= 0 with
    v = X+^T alpha - X-^T beta eliminated:

        X v + (b+ - b-) 1 = y,   sum(alpha) = sum(beta) = tau.

    Letting the common weight total ``tau`` float (instead of pinning it to
    one) keeps the program scale free; a = 1 on the piling side already
    rules out v = 0.
    """
    X, y = data.points, data.labels
    n_p = data.n_plus
    G = X @ X.T
    pos = data.positive
    n = data.n
    A = np.zeros((n + 2, n + 3))
    A[:n, :n_p] = G[:, pos]
    A[:n, n_p:n] = -G[:, ~pos]
    A[:n, n] = 1.0
    A[:n, n + 1] = -1.0
    A[n, :n_p] = 1.0
    A[n + 1, n_p:n] = 1.0
    A[n:, n + 2] = -1.0
    rhs = np.concatenate([y, [0.0, 0.0]])
    res = simplex(np.zeros(n + 3), A, rhs, feas_tol=feas_tol)
    if not res.feasible:
        return CPIntersection(False, infeasibility=res.infeasibility)
    x = res.x
    alpha, beta = x[:n_p], x[n_p:n]
    v = alpha @ data.X_plus - beta @ data.X_minus
    offset = float(x[n] - x[n + 1])
    witness = HullWitness.from_weights(data, alpha / alpha.sum(), beta / beta.sum())
    return CPIntersection(True, v, offset, witness, res.infeasibility)
