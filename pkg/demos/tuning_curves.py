"""Tuning curves for a balanced and an unbalanced draw, written as plot data.

With balanced training data the CV error explodes at small C while train
and test error stay low: CV training folds are usually unbalanced, so
their fits bounce. Adding one point makes train and test bounce too.
Pass an output directory to keep the CSV panels.
"""

import sys
import tempfile

import numpy as np

from svmgeom import GaussianPairConfig, emit_plot_data, generate_gaussian_pair, thresholds, tuning_path


def curve(n_plus, out_dir):
    train = generate_gaussian_pair(GaussianPairConfig(n_plus, 20, 2, 4.0, 2))
    test = generate_gaussian_pair(GaussianPairConfig(500, 500, 2, 4.0, 99))
    th = thresholds(train)
    grid = np.logspace(np.log10(th.c_small / 100), np.log10(100 * th.c_large), 15)
    cur = tuning_path(train, test, grid, seed=2)
    print(f"\n{n_plus}+20 points, C_small={th.c_small:.3g}, C_large={th.c_large:.3g}")
    print("         C   train     cv    test  angle_md  angle_hm  regime")
    for row in cur.rows:
        print(f"{row.C:10.3g}  {row.train_error:6.3f} {row.cv_error:6.3f} {row.test_error:6.3f}"
              f"  {row.angle_to_md:8.1e}  {row.angle_to_hard_margin:8.1e}  {row.regime}")
    files = emit_plot_data(cur, f"{out_dir}/{n_plus}_plus", include_solutions=True)
    print("wrote", ", ".join(sorted(f.name for f in files)))


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="tuning_")
    curve(20, out)
    curve(21, out)
    print(f"\nplot data in {out}")
