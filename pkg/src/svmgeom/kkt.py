"""KKT verification, support-vector taxonomy and regime checks.

Violations of conditions on the dual weights are reported relative to
max(1, C) (or max(1, sum alpha) for the hard margin); conditions on the
decision function are absolute, in functional-margin units.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .classifiers import SoftMarginSolution, hard_margin_svm
from .data import Dataset, LinearModel, angle_or_nan, direction_angle
from .errors import DegenerateDirectionError, SeparabilityError
from .geometry import (
    cp_intersection_lp,
    diameter,
    gap,
    in_general_position,
    mdp_direction,
)

__all__ = [
    "KKTReport",
    "SupportClassification",
    "RegimeThresholds",
    "Regime",
    "SmallCKind",
    "SmallCResult",
    "MDPEquivalence",
    "MDPCheck",
    "SupportCountResult",
    "RegimeReport",
    "verify_kkt_hard",
    "verify_kkt_soft",
    "classify_support_vectors",
    "thresholds",
    "check_small_c_regime",
    "check_margin_bounce",
    "check_hard_margin_equiv",
    "check_mdp_equiv",
    "support_count_check",
    "regime_report",
    "oriented",
]

ANGLE_TOL_REGIME = 1e-4
ANGLE_TOL_IDENTITY = 1e-6


@dataclass
class KKTReport:
    violations: dict[str, float]

    @property
    def max_violation(self) -> float:
        return max(self.violations.values())

    def passed(self, tol: float) -> bool:
        return self.max_violation <= tol


def oriented(data: Dataset, sol: SoftMarginSolution):
    """Relabel so the positive class is the larger one, flipping the model to match."""
    if data.n_plus >= data.n_minus:
        return data, sol
    flipped = Dataset(data.points, -data.labels, not data.flipped)
    model = LinearModel(-sol.w, -sol.b)
    return flipped, SoftMarginSolution(
        model, sol.alpha, sol.xi, sol.C, sol.objective, sol.dual_objective,
        sol.iterations, sol.kkt_violation,
    )


def _common(data, sol, alpha_scale):
    X, y, alpha = data.points, data.labels, sol.alpha
    margin = y * sol.model.decision_function(X)
    expansion = np.max(np.abs(sol.w - (alpha * y) @ X)) / max(1.0, np.max(np.abs(sol.w)))
    balance = abs(float(alpha @ y)) / alpha_scale
    return margin, float(expansion), balance


def verify_kkt_hard(data: Dataset, sol: SoftMarginSolution, tol: float = 1e-6) -> KKTReport:
    """Check w expansion, weight balance, sign and complementary slackness."""
    alpha = sol.alpha
    scale = max(1.0, float(alpha.sum()))
    margin, expansion, balance = _common(data, sol, scale)
    active = alpha > sol.active_tol
    v = {
        "expansion": expansion,
        "balance": balance,
        "nonnegative": float(max(0.0, -alpha.min())) / scale,
        "primal_feasibility": float(max(0.0, np.max(1.0 - margin))),
        "complementary": float(np.max(np.abs(margin[active] - 1.0), initial=0.0)),
    }
    return KKTReport(v)


def verify_kkt_soft(data: Dataset, sol: SoftMarginSolution, C: float,
                    tol: float = 1e-6) -> KKTReport:
    """Check all soft-margin conditions with mu_i = C - alpha_i."""
    if not (0 < C < math.inf):
        raise ValueError("C must be finite and positive")
    alpha, xi = sol.alpha, sol.xi
    scale = max(1.0, C)
    margin, expansion, balance = _common(data, sol, scale)
    mu = C - alpha
    active = alpha > 1e-8 * C
    hinge = np.maximum(0.0, 1.0 - margin)
    sv = classify_support_vectors(sol, data, tol, C=C)
    lhs = C * len(sv.slack_plus) + float(alpha[sv.margin_plus].sum())
    rhs = C * len(sv.slack_minus) + float(alpha[sv.margin_minus].sum())
    v = {
        "expansion": expansion,
        "balance": balance,
        "box": float(max(0.0, -alpha.min(), (alpha - C).max())) / scale,
        "slack_nonnegative": float(max(0.0, -xi.min())),
        "slack_consistency": float(np.max(np.maximum(0.0, hinge - xi))),
        "complementary": float(np.max(np.abs(margin[active] - (1.0 - xi[active])), initial=0.0)),
        "slack_dual": float(np.max(np.minimum(xi, mu / scale))),
        "class_balance": abs(lhs - rhs) / scale,
    }
    return KKTReport(v)


@dataclass
class SupportClassification:
    margin_plus: np.ndarray
    margin_minus: np.ndarray
    slack_plus: np.ndarray
    slack_minus: np.ndarray
    non_support: np.ndarray

    def counts(self):
        return {
            "margin_plus": len(self.margin_plus),
            "margin_minus": len(self.margin_minus),
            "slack_plus": len(self.slack_plus),
            "slack_minus": len(self.slack_minus),
        }


def classify_support_vectors(sol: SoftMarginSolution, data: Dataset, tol: float = 1e-6,
                             C: float | None = None) -> SupportClassification:
    """Split indices into margin vectors, slack vectors and the rest.

    Support means alpha above 1e-8 * C (relative to the largest weight for the
    hard margin); a support vector is a slack vector when xi exceeds ``tol``.
    """
    C = sol.C if C is None else C
    scale = float(sol.alpha.max(initial=0.0)) if math.isinf(C) else C
    support = sol.alpha > 1e-8 * max(scale, 1e-300)
    slack = support & (sol.xi > tol)
    margin = support & ~slack
    pos = data.positive
    idx = np.flatnonzero
    return SupportClassification(
        idx(margin & pos), idx(margin & ~pos), idx(slack & pos), idx(slack & ~pos), idx(~support)
    )


@dataclass(frozen=True)
class RegimeThresholds:
    c_small: float
    c_large: float | None
    diameter: float
    gap: float
    separable: bool

    def to_dict(self):
        return {
            "c_small": self.c_small,
            "c_large": self.c_large,
            "diameter": self.diameter,
            "gap": self.gap,
            "separable": self.separable,
        }


def thresholds(data: Dataset) -> RegimeThresholds:
    """C_small = 2 / (max(n+, n-) D^2); C_large = 2 / G^2 when separable."""
    D = diameter(data)
    g = gap(data)
    c_small = 2.0 / (max(data.n_plus, data.n_minus) * D**2)
    c_large = 2.0 / g.gap**2 if g.separable else None
    return RegimeThresholds(c_small, c_large, D, g.gap, g.separable)


class Regime(str, enum.Enum):
    EXACT_MD = "ExactMD"
    CROPPED_MD = "CroppedMD"
    INTERMEDIATE = "Intermediate"
    HARD_MARGIN_EQUIV = "HardMarginEquiv"


class SmallCKind(str, enum.Enum):
    EXACT_MD = "ExactMD"
    CROPPED_MD = "CroppedMD"
    NOT_IN_REGIME = "NotInRegime"


@dataclass
class SmallCResult:
    """Outcome of the small-C check.

    ``constraint_residual`` measures sum over M+ of alpha against
    C (n- - |L+|), the value the class balance forces once every point of
    the smaller class carries weight C. ``decomposition_residual`` is
    |w - (sum_{M+} alpha x + C sum_{L+} x - C sum_{I-} x)| / |w|.
    """

    kind: SmallCKind
    angle_to_md: float
    support: SupportClassification
    margin_weight: float = float("nan")
    constraint_target: float = float("nan")
    constraint_residual: float = float("nan")
    decomposition_residual: float = float("nan")
    weights_at_C: float = float("nan")


def check_small_c_regime(data: Dataset, sol: SoftMarginSolution, tol: float = 1e-6,
                         angle_tol: float = ANGLE_TOL_REGIME) -> SmallCResult:
    data, sol = oriented(data, sol)
    C = sol.C
    sv = classify_support_vectors(sol, data, tol)
    md = data.mean_plus - data.mean_minus
    angle = angle_or_nan(sol.w, md)
    neg = np.flatnonzero(~data.positive)
    if math.isinf(C) or len(sv.slack_minus) != len(neg):
        return SmallCResult(SmallCKind.NOT_IN_REGIME, angle, sv)
    alpha, X = sol.alpha, data.points
    at_c = float(np.max(np.abs(alpha[neg] - C)))
    n_minus = data.n_minus
    margin_weight = float(alpha[sv.margin_plus].sum())
    target = C * (n_minus - len(sv.slack_plus))
    rebuilt = (alpha[sv.margin_plus] @ X[sv.margin_plus]
               + C * X[sv.slack_plus].sum(axis=0) - C * X[neg].sum(axis=0))
    decomp = float(np.linalg.norm(sol.w - rebuilt) / max(np.linalg.norm(sol.w), 1e-300))
    if data.balanced:
        at_c = float(np.max(np.abs(alpha - C)))
        kind = SmallCKind.EXACT_MD if angle <= angle_tol else SmallCKind.NOT_IN_REGIME
    else:
        kind = SmallCKind.CROPPED_MD
    return SmallCResult(kind, angle, sv, margin_weight, target,
                        abs(margin_weight - target), decomp, at_c)


def check_margin_bounce(data: Dataset, sol: SoftMarginSolution) -> bool:
    """True when every training point is assigned to the larger class."""
    data, sol = oriented(data, sol)
    return bool(np.all(sol.model.predict(data.points) > 0))


def check_hard_margin_equiv(data: Dataset, sol: SoftMarginSolution, tol: float = 1e-6,
                            hard: SoftMarginSolution | None = None) -> bool:
    """Soft solution equals the hard-margin one in w (relative) and b."""
    if hard is None:
        hard = hard_margin_svm(data)
    dw = np.linalg.norm(sol.w - hard.w)
    return bool(dw <= tol * np.linalg.norm(hard.w) and abs(sol.b - hard.b) <= tol * data.scale)


class MDPEquivalence(str, enum.Enum):
    FULL_MDP = "FullMDP"
    CROPPED_MDP = "CroppedMDP"
    NOT_APPLICABLE = "NotApplicable"


@dataclass
class MDPCheck:
    kind: MDPEquivalence
    angle_to_mdp: float | None
    angle_to_support_mdp: float | None
    support: np.ndarray
    lp_feasible: bool | None = None
    lp_consistent: bool | None = None


def check_mdp_equiv(data: Dataset, sol: SoftMarginSolution, tol: float = ANGLE_TOL_IDENTITY,
                    run_lp: bool = True) -> MDPCheck:
    """Compare a hard-margin direction with the MDP of all points and of its support vectors."""
    support = np.flatnonzero(sol.support())
    full_angle = sup_angle = None
    lp_feasible = lp_consistent = None
    high_dim = data.d >= data.n - 1
    if high_dim:
        full_angle = direction_angle(sol.w, mdp_direction(data))
        if run_lp:
            lp_feasible = cp_intersection_lp(data).feasible
            lp_consistent = lp_feasible == (full_angle <= tol)
        if full_angle <= tol:
            return MDPCheck(MDPEquivalence.FULL_MDP, full_angle, full_angle, support,
                            lp_feasible, lp_consistent)
    sub = data.subset(support)
    if data.d >= len(support) - 1 and sub.n_plus and sub.n_minus:
        sup_angle = direction_angle(sol.w, mdp_direction(sub))
        if sup_angle <= tol:
            return MDPCheck(MDPEquivalence.CROPPED_MDP, full_angle, sup_angle, support,
                            lp_feasible, lp_consistent)
    return MDPCheck(MDPEquivalence.NOT_APPLICABLE, full_angle, sup_angle, support,
                    lp_feasible, lp_consistent)


@dataclass
class SupportCountResult:
    held: bool | None
    larger_class_support: int
    bound: int
    held_loose_bound: bool | None
    loose_bound: int
    skipped_reason: str | None = None


def support_count_check(data: Dataset, sol: SoftMarginSolution) -> SupportCountResult:
    """Support vectors in the larger class versus n- + d - 1 (and the looser n- + d + 1)."""
    data, sol = oriented(data, sol)
    count = int(np.count_nonzero(sol.support()[data.positive]))
    bound = data.n_minus + data.d - 1
    loose = data.n_minus + data.d + 1
    if not in_general_position(data):
        return SupportCountResult(None, count, bound, None, loose,
                                  "data not in general position")
    if np.linalg.norm(sol.w) <= 1e-12 * data.scale:
        # w = 0 leaves the dual weights non-unique, so the count means nothing
        return SupportCountResult(None, count, bound, None, loose,
                                  "zero normal vector: dual weights not unique")
    return SupportCountResult(count <= bound, count, bound, count <= loose, loose)


@dataclass
class RegimeReport:
    C: float
    regime: Regime
    margin_bounce: bool
    angle_to_md: float
    angle_to_mdp: float | None
    angle_to_hard_margin: float | None
    support_counts: dict = field(default_factory=dict)
    kkt_violation: float = float("nan")

    def to_dict(self):
        return {
            "C": self.C,
            "regime": self.regime.value,
            "margin_bounce": self.margin_bounce,
            "angle_to_md": self.angle_to_md,
            "angle_to_mdp": self.angle_to_mdp,
            "angle_to_hard_margin": self.angle_to_hard_margin,
            "support_counts": self.support_counts,
            "kkt_violation": self.kkt_violation,
        }


def regime_report(data: Dataset, sol: SoftMarginSolution, hard: SoftMarginSolution | None = None,
                  tol: float = 1e-6, angle_tol: float = ANGLE_TOL_REGIME) -> RegimeReport:
    """Summarise where a soft-margin fit sits relative to MD, MDP and the hard margin.

    ``hard`` is the hard-margin fit of ``data`` (None when not separable).
    """
    small = check_small_c_regime(data, sol, tol, angle_tol)
    angle_md = angle_or_nan(sol.w, data.mean_plus - data.mean_minus)
    try:
        angle_mdp = angle_or_nan(sol.w, mdp_direction(data))
    except DegenerateDirectionError:
        angle_mdp = None
    angle_hard = direction_angle(sol.w, hard.w) if hard is not None else None
    if small.kind is SmallCKind.EXACT_MD:
        regime = Regime.EXACT_MD
    elif small.kind is SmallCKind.CROPPED_MD:
        regime = Regime.CROPPED_MD
    elif hard is not None and check_hard_margin_equiv(data, sol, 1e-3, hard) and angle_hard <= angle_tol:
        regime = Regime.HARD_MARGIN_EQUIV
    else:
        regime = Regime.INTERMEDIATE
    sv = classify_support_vectors(sol, data, tol)
    counts = {"plus": [len(sv.margin_plus), len(sv.slack_plus)],
              "minus": [len(sv.margin_minus), len(sv.slack_minus)]}
    return RegimeReport(sol.C, regime, check_margin_bounce(data, sol), angle_md, angle_mdp,
                        angle_hard, counts, sol.kkt_violation)


def separable_hard_fit(data: Dataset):
    """Hard-margin fit or None when the classes overlap."""
    try:
        return hard_margin_svm(data)
    except SeparabilityError:
        return None
