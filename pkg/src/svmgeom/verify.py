"""Run the regime and piling checks on a single dataset."""

from __future__ import annotations

import numpy as np

from .classifiers import soft_margin_svm
from .data import Dataset, direction_angle, normalize_labels
from .geometry import cp_intersection_lp, has_complete_piling, mdp_direction, solve_affine_piling
from .kkt import (
    ANGLE_TOL_IDENTITY,
    ANGLE_TOL_REGIME,
    SmallCKind,
    check_hard_margin_equiv,
    check_margin_bounce,
    check_mdp_equiv,
    check_small_c_regime,
    classify_support_vectors,
    separable_hard_fit,
    support_count_check,
    thresholds,
    verify_kkt_hard,
    verify_kkt_soft,
)


def _norm_bounds(data, sol, th):
    w = float(np.linalg.norm(sol.w))
    out = {
        "norm": w,
        "upper_bound": data.n_plus * sol.C * th.diameter,
        "holds": w <= data.n_plus * sol.C * th.diameter * (1 + 1e-9),
    }
    sv = classify_support_vectors(sol, data)
    if len(sv.slack_plus) + len(sv.slack_minus) > 0:
        out["lower_bound"] = sol.C * th.gap
        out["holds"] &= w >= sol.C * th.gap * (1 - 1e-6)
    return out


def verify_dataset(data: Dataset, tol: float = 1e-6) -> dict:
    """Fit at the regime thresholds and report which guarantees held.

    Entries carry ``holds`` (True/False, or None when the precondition
    does not apply) plus the measured quantities.
    """
    data = normalize_labels(data)
    th = thresholds(data)
    report = {"thresholds": th.to_dict(), "n_plus": data.n_plus, "n_minus": data.n_minus,
              "d": data.d, "labels_flipped": data.flipped}

    small = soft_margin_svm(data, 0.9 * th.c_small, tol)
    res = check_small_c_regime(data, small, tol)
    entry = {"C": small.C, "kind": res.kind.value, "angle_to_md": res.angle_to_md,
             "kkt": verify_kkt_soft(data, small, small.C).max_violation}
    if data.balanced:
        entry["holds"] = res.kind is SmallCKind.EXACT_MD and res.angle_to_md <= ANGLE_TOL_REGIME
    else:
        entry.update(constraint_residual=res.constraint_residual,
                     decomposition_residual=res.decomposition_residual)
        entry["holds"] = (res.kind is SmallCKind.CROPPED_MD
                          and res.constraint_residual <= tol * small.C * data.n
                          and res.decomposition_residual <= tol)
    entry["norm_bounds"] = _norm_bounds(data, small, th)
    report["small_c"] = entry

    if not data.balanced:
        tiny = soft_margin_svm(data, 0.4 * th.c_small, tol)
        report["margin_bounce"] = {"C": tiny.C, "holds": check_margin_bounce(data, tiny)}
    else:
        report["margin_bounce"] = {"holds": None, "reason": "balanced classes: not guaranteed"}

    hard = separable_hard_fit(data) if th.separable else None
    if hard is None:
        report["large_c"] = {"holds": None, "reason": "classes not separable"}
        report["hard_margin"] = {"holds": None, "reason": "classes not separable"}
    else:
        big = soft_margin_svm(data, 2 * th.c_large, tol)
        report["large_c"] = {
            "C": big.C,
            "angle_to_hard_margin": direction_angle(big.w, hard.w),
            "holds": check_hard_margin_equiv(data, big, 1e-3, hard)
            and direction_angle(big.w, hard.w) <= ANGLE_TOL_REGIME,
            "kkt": verify_kkt_soft(data, big, big.C).max_violation,
        }
        mdp = check_mdp_equiv(data, hard, ANGLE_TOL_IDENTITY)
        two_rho = 2 * hard.margin_width
        report["hard_margin"] = {
            "margin_vs_gap": abs(two_rho - th.gap) / th.gap,
            "mdp_relation": mdp.kind.value,
            "angle_to_support_mdp": mdp.angle_to_support_mdp,
            "kkt": verify_kkt_hard(data, hard).max_violation,
            "holds": abs(two_rho - th.gap) <= 1e-6 * th.gap
            and mdp.kind.value in ("FullMDP", "CroppedMDP"),
        }
        counts = support_count_check(data, hard)
        report["support_count"] = {"count": counts.larger_class_support, "bound": counts.bound,
                                   "loose_bound": counts.loose_bound, "holds": counts.held,
                                   "skipped_reason": counts.skipped_reason}

    piling = solve_affine_piling(data)
    if piling is None:
        report["affine_piling"] = {"holds": None, "reason": "d < n - 1 or not in general position"}
    else:
        angle = direction_angle(piling.v, mdp_direction(data))
        lp = cp_intersection_lp(data)
        entry = {"angle_to_mdp": angle, "cp_lp_feasible": lp.feasible,
                 "holds": angle <= ANGLE_TOL_IDENTITY}
        if hard is not None:
            piles = has_complete_piling(data, hard.w)[0]
            entry["hard_margin_piles"] = piles
            entry["holds"] &= piles == lp.feasible
        report["affine_piling"] = entry
    report["all_hold"] = all(v.get("holds") is not False for v in report.values()
                             if isinstance(v, dict))
    return report
