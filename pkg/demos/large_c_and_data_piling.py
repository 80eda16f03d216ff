"""Large C, the hard margin, and maximal data piling.

Above C_large = 2 / G^2 the soft-margin fit equals the hard-margin one.
When d >= n - 1 every dataset has a unique complete-data-piling
direction in its affine hull, and it is the MDP direction. The hard
margin is that direction exactly when a convex direction also piles,
which the cp intersection LP decides. Otherwise the hard margin is the
MDP of its own support vectors.
"""

import numpy as np

from svmgeom import (
    Dataset,
    GaussianPairConfig,
    cp_intersection_lp,
    direction_angle,
    generate_gaussian_pair,
    hard_margin_svm,
    has_complete_piling,
    mdp_direction,
    soft_margin_svm,
    solve_affine_piling,
    thresholds,
)


def large_c():
    data = generate_gaussian_pair(GaussianPairConfig(15, 12, 10, 4.0, 1))
    th = thresholds(data)
    hard = hard_margin_svm(data)
    print(f"gap G = {th.gap:.4f}, 2 * margin width = {2 * hard.margin_width:.4f}, C_large = {th.c_large:.4g}")
    for factor in (0.01, 0.1, 1.0, 2.0):
        sol = soft_margin_svm(data, factor * th.c_large)
        print(f"  C = {factor:>5} * C_large  angle to hard margin {direction_angle(sol.w, hard.w):.2e}")


def piling(label, data):
    hard = hard_margin_svm(data)
    mdp = mdp_direction(data)
    lp = cp_intersection_lp(data)
    sub = data.subset(hard.support())
    print(f"\n{label}: n={data.n}, d={data.d}")
    print(f"  affine piling vs MDP angle   {direction_angle(solve_affine_piling(data).v, mdp):.2e}")
    print(f"  hard margin piles completely {has_complete_piling(data, hard.w)[0]}")
    print(f"  cp intersection LP feasible  {lp.feasible}")
    print(f"  hard margin vs MDP angle     {direction_angle(hard.w, mdp):.2e}")
    print(f"  hard margin vs MDP of its {sub.n} support vectors {direction_angle(hard.w, mdp_direction(sub)):.2e}")


if __name__ == "__main__":
    large_c()
    print("\nhand example (0,0):-1 (2,0):+1 (0,2):+1")
    hand = Dataset([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]], [-1, 1, 1])
    print(f"  piling direction {np.round(solve_affine_piling(hand).v, 6)}")
    piling("five points in six dimensions", generate_gaussian_pair(GaussianPairConfig(3, 2, 6, 3.0, 2)))
    piling("seven points in eight dimensions", generate_gaussian_pair(GaussianPairConfig(4, 3, 8, 8.0, 3)))
