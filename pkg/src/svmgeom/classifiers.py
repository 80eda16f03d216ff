"""Mean difference, FLD, MDP and SVM classifiers plus intercept variants."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, LinearModel, require_direction
from .errors import NoSupportVectorError, RankError, SeparabilityError
from .geometry import DEFAULT_RANK_TOL, gap, has_complete_piling, mdp_direction
from .smo import solve_dual

__all__ = [
    "SoftMarginSolution",
    "mean_difference",
    "fld",
    "mdp_classifier",
    "soft_margin_svm",
    "hard_margin_svm",
    "svm_centroids",
    "centroid_intercept",
    "adaptive_intercept",
    "with_intercept_mode",
    "predict",
    "INTERCEPT_MODES",
]

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 1_000_000
INTERCEPT_MODES = ("standard", "centroid", "adaptive")


@dataclass(frozen=True, eq=False)
class SoftMarginSolution:
    """A fitted (soft or hard) margin SVM together with its KKT variables.

    ``C`` is ``math.inf`` for the hard margin.
    """

    model: LinearModel
    alpha: np.ndarray
    xi: np.ndarray
    C: float
    objective: float = float("nan")
    dual_objective: float = float("nan")
    iterations: int = 0
    kkt_violation: float = float("nan")

    @property
    def w(self) -> np.ndarray:
        return self.model.w

    @property
    def b(self) -> float:
        return self.model.b

    @property
    def hard(self) -> bool:
        return math.isinf(self.C)

    @property
    def margin_width(self) -> float:
        norm = float(np.linalg.norm(self.model.w))
        return math.inf if norm == 0 else 1.0 / norm

    @property
    def active_tol(self) -> float:
        """Weights below this count as zero (and within it of C as at C)."""
        scale = float(self.alpha.max(initial=0.0)) if self.hard else self.C
        return 1e-8 * max(scale, 1e-300)

    def support(self) -> np.ndarray:
        return self.alpha > self.active_tol

    def to_dict(self):
        return {
            "w": self.model.w.tolist(),
            "b": self.model.b,
            "alpha": self.alpha.tolist(),
            "xi": self.xi.tolist(),
            "C": None if self.hard else self.C,
            "objective": self.objective,
            "dual_objective": self.dual_objective,
            "iterations": self.iterations,
            "kkt_violation": self.kkt_violation,
        }

    @classmethod
    def from_dict(cls, obj) -> "SoftMarginSolution":
        C = math.inf if obj["C"] is None else float(obj["C"])
        return cls(
            LinearModel(obj["w"], obj["b"]),
            np.asarray(obj["alpha"], dtype=float),
            np.asarray(obj["xi"], dtype=float),
            C,
            float(obj["objective"]),
            float(obj["dual_objective"]),
            int(obj["iterations"]),
            float(obj["kkt_violation"]),
        )


def predict(model: LinearModel, points) -> np.ndarray:
    """sign(w.x + b) with sign(0) = +1."""
    return model.predict(points)


def _midpoint_model(w, data: Dataset) -> LinearModel:
    return LinearModel(w, -0.5 * w @ (data.mean_plus + data.mean_minus))


def mean_difference(data: Dataset) -> LinearModel:
    """Hyperplane halfway between the class means."""
    w = require_direction(data.mean_plus - data.mean_minus, data.scale, "mean difference")
    return _midpoint_model(w, data)


def pooled_covariance(data: Dataset) -> np.ndarray:
    Rp = data.X_plus - data.mean_plus
    Rm = data.X_minus - data.mean_minus
    return (Rp.T @ Rp + Rm.T @ Rm) / (data.n - 2)


def fld(data: Dataset, rank_tol: float = DEFAULT_RANK_TOL) -> LinearModel:
    """Fisher linear discriminant: pooled covariance inverse times the mean difference."""
    if data.n - 2 < data.d:
        raise RankError(
            f"pooled covariance is singular for n={data.n}, d={data.d}; "
            "use mdp_classifier instead"
        )
    S = pooled_covariance(data)
    s = np.linalg.svd(S, compute_uv=False)
    if s[-1] <= rank_tol * s[0]:
        raise RankError("pooled covariance is numerically singular; use mdp_classifier instead")
    w = np.linalg.solve(S, data.mean_plus - data.mean_minus)
    return _midpoint_model(require_direction(w, data.scale, "FLD direction"), data)


def mdp_classifier(data: Dataset, rank_tol: float = DEFAULT_RANK_TOL) -> LinearModel:
    """MDP direction with the intercept halfway between the projected class means."""
    return _midpoint_model(mdp_direction(data, rank_tol), data)


def _solution(data: Dataset, res, C) -> SoftMarginSolution:
    X, y, alpha = data.points, data.labels, res.alpha
    # w = 0 is a legitimate soft-margin optimum (heavily overlapping classes)
    w = (alpha * y) @ X
    model = LinearModel(w, res.b)
    xi = np.maximum(0.0, 1.0 - y * model.decision_function(X))
    ww = float(w @ w)
    if math.isinf(C):
        objective = 0.5 * ww
    else:
        objective = 0.5 * ww + C * float(xi.sum())
    dual = float(alpha.sum()) - 0.5 * ww
    return SoftMarginSolution(model, alpha, xi, C, objective, dual, res.iterations, res.violation)


def soft_margin_svm(data: Dataset, C: float, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER, alpha0=None) -> SoftMarginSolution:
    """Soft-margin linear SVM fitted in the dual.

    ``tol`` bounds the final KKT violation in decision-function units.
    ``alpha0`` may warm-start from a solution at a smaller C.
    """
    if not C > 0 or math.isinf(C):
        raise ValueError("C must be a finite positive number")
    res = solve_dual(data.points, data.labels, C, tol, max_iter, alpha0)
    return _solution(data, res, float(C))


def hard_margin_svm(data: Dataset, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> SoftMarginSolution:
    """Maximum-margin separating hyperplane; raises SeparabilityError if none exists."""
    if not gap(data).separable:
        raise SeparabilityError("classes are not linearly separable")
    res = solve_dual(data.points, data.labels, math.inf, tol, max_iter)
    return _solution(data, res, math.inf)


def svm_centroids(sol: SoftMarginSolution, data: Dataset):
    """Weighted class centroids m+ and m- from the dual weights, and the total A."""
    pos = data.positive
    A = float(sol.alpha[pos].sum())
    if A <= 0:
        raise NoSupportVectorError("all dual weights are zero")
    m_plus = sol.alpha[pos] @ data.X_plus / A
    m_minus = sol.alpha[~pos] @ data.X_minus / sol.alpha[~pos].sum()
    return m_plus, m_minus, A


def centroid_intercept(sol: SoftMarginSolution, data: Dataset) -> float:
    """Intercept placing the hyperplane halfway between the SVM centroids."""
    m_plus, m_minus, _ = svm_centroids(sol, data)
    return float(-0.5 * sol.w @ (m_plus + m_minus))


def one_class_fully_supported(sol: SoftMarginSolution, data: Dataset) -> bool:
    support = sol.support()
    pos = data.positive
    return bool(np.all(support[pos]) or np.all(support[~pos]))


def adaptive_intercept(sol: SoftMarginSolution, data: Dataset) -> float:
    """Centroid intercept when a whole class is support vectors, else the solver's b."""
    svm_centroids(sol, data)
    if one_class_fully_supported(sol, data):
        return centroid_intercept(sol, data)
    return sol.b


def with_intercept_mode(sol: SoftMarginSolution, data: Dataset, mode: str) -> LinearModel:
    if mode == "standard":
        return sol.model
    if mode == "centroid":
        return sol.model.with_intercept(centroid_intercept(sol, data))
    if mode == "adaptive":
        return sol.model.with_intercept(adaptive_intercept(sol, data))
    raise ValueError(f"unknown intercept mode {mode!r}; expected one of {INTERCEPT_MODES}")


def piles_completely(sol: SoftMarginSolution, data: Dataset, tol: float = 1e-8) -> bool:
    return has_complete_piling(data, sol.w, tol)[0]
