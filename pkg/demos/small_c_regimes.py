"""What a soft-margin SVM does when C is small.

Balanced classes: below C_small the SVM direction is exactly the mean
difference, and every point carries weight C. Unbalanced classes: the
smaller class is all slack at weight C, the direction becomes a cropped
mean difference, and further down the intercept bounces past the
smaller class so every point is assigned to the larger one.
"""

import numpy as np

from svmgeom import (
    GaussianPairConfig,
    check_margin_bounce,
    check_small_c_regime,
    direction_angle,
    generate_gaussian_pair,
    soft_margin_svm,
    thresholds,
)


def show(label, data):
    th = thresholds(data)
    md = data.mean_plus - data.mean_minus
    print(f"\n{label}: n+={data.n_plus}, n-={data.n_minus}, C_small={th.c_small:.4g}")
    for factor in (10.0, 1.0, 0.9, 0.4):
        sol = soft_margin_svm(data, factor * th.c_small)
        res = check_small_c_regime(data, sol)
        print(f"  C = {factor:>4} * C_small  angle to MD {direction_angle(sol.w, md):.2e}  "
              f"regime {res.kind.value:<12} all predicted +1: {check_margin_bounce(data, sol)}")
    sol = soft_margin_svm(data, 0.9 * th.c_small)
    res = check_small_c_regime(data, sol)
    if not data.balanced:
        s = res.support
        print(f"  at 0.9 * C_small: |M+|={len(s.margin_plus)} |L+|={len(s.slack_plus)} "
              f"|L-|={len(s.slack_minus)}; sum over M+ of alpha = {res.margin_weight:.6g}, "
              f"C (n- - |L+|) = {res.constraint_target:.6g}")
    else:
        print(f"  at 0.9 * C_small: max |alpha - C| = {np.max(np.abs(sol.alpha - sol.C)):.1e}")


if __name__ == "__main__":
    show("balanced", generate_gaussian_pair(GaussianPairConfig(20, 20, 2, 4.0, 0)))
    show("one extra positive point", generate_gaussian_pair(GaussianPairConfig(21, 20, 2, 4.0, 0)))
    show("high dimension, unbalanced", generate_gaussian_pair(GaussianPairConfig(21, 20, 50, 2.0, 2)))
