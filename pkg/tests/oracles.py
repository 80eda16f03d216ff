"""Slow, independent reference solvers used only by the tests."""

import numpy as np


def project_box_hyperplane(z, y, C):
    """Euclidean projection of z onto {0 <= a <= C, y.a = 0}.

    The projection is clip(z - t y, 0, C) for the t that zeroes
    g(t) = y.clip(z - t y); g is piecewise linear and non-increasing with
    breakpoints where a coordinate hits 0 or C, so t is found exactly by
    evaluating g at every breakpoint and interpolating.
    """
    upper = C if np.isfinite(C) else np.inf
    bps = np.concatenate([z / y, (z - upper) / y]) if np.isfinite(upper) else z / y
    bps = np.unique(bps[np.isfinite(bps)])
    g = np.clip(z[None, :] - bps[:, None] * y[None, :], 0, upper) @ y
    # g is non-increasing in t
    k = np.searchsorted(-g, 0.0)
    if k == 0:
        t = bps[0]
    elif k == len(bps):
        t = bps[-1]
    else:
        t0, t1, g0, g1 = bps[k - 1], bps[k], g[k - 1], g[k]
        t = t0 if g0 == g1 else t0 + (t1 - t0) * g0 / (g0 - g1)
    return np.clip(z - t * y, 0, upper)


def dual_objective(alpha, Q):
    return float(alpha.sum() - 0.5 * alpha @ Q @ alpha)


def best_intercept(w, X, y, C):
    """Exact minimiser over b of the hinge primal for fixed w (1-d, piecewise linear)."""
    cands = y - X @ w
    vals = [hinge_primal(w, b, X, y, C) for b in cands]
    k = int(np.argmin(vals))
    return float(cands[k]), float(vals[k])


def projected_gradient_dual(X, y, C, gap_tol=1e-10, iters=500_000):
    """Maximise the SVM dual by accelerated projected gradient with restarts.

    Stops once the primal value at w = sum a_i y_i x_i (with its best
    intercept) is within ``gap_tol`` of the dual value, which certifies the
    dual objective to that accuracy. Returns ``(alpha, dual value, gap)``.
    """
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    Q = (y[:, None] * y[None, :]) * (X @ X.T)
    L = max(np.linalg.eigvalsh(Q)[-1], 1e-12)
    a = project_box_hyperplane(np.zeros(len(y)), y, C)
    z, t, prev = a.copy(), 1.0, dual_objective(a, Q)
    gap = np.inf
    stalled = 0
    for k in range(iters):
        if k % 25 == 0:
            _, primal = best_intercept((a * y) @ X, X, y, C)
            gap = primal - prev
            if gap <= gap_tol:
                break
        a_new = project_box_hyperplane(z + (1 - Q @ z) / L, y, C)
        obj = dual_objective(a_new, Q)
        if obj < prev:
            # adaptive restart when the momentum overshoots
            z, t = a.copy(), 1.0
            stalled += 1
            if stalled > 3:
                break  # no further progress possible in floating point
            continue
        stalled = 0
        t_new = 0.5 * (1 + np.sqrt(1 + 4 * t * t))
        z = a_new + (t - 1) / t_new * (a_new - a)
        a, t, prev = a_new, t_new, obj
    _, primal = best_intercept((a * y) @ X, X, y, C)
    gap = primal - prev
    return a, prev, gap


def hinge_primal(w, b, X, y, C):
    xi = np.maximum(0.0, 1 - y * (X @ w + b))
    return 0.5 * w @ w + C * xi.sum()
