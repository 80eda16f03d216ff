"""Compare SVM intercepts under CV tuning on 51 + 50 points in 100 dimensions.

The standard intercept bounces at small C, which misleads cross
validation. The centroid intercept places the hyperplane midway between
the weighted class centroids; the adaptive one uses it only when one
class is fully supported. The mean difference classifier is the
baseline. Usage: intercept_benchmark.py [repetitions] [seed]
"""

import sys
from dataclasses import replace

from svmgeom import INTERCEPT_BENCHMARK, intercept_experiment

if __name__ == "__main__":
    reps = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 1
    cfg = replace(INTERCEPT_BENCHMARK, repetitions=reps, seed=seed)
    summary = intercept_experiment(cfg, progress=lambda i, n: print(f"\r{i}/{n}", end="", flush=True))
    print()
    for mode, err in summary.mean_test_error.items():
        print(f"{mode:>9}: {100 * err:.2f}% mean test error")
    for name, entry in summary.paired.items():
        extra = f", t={entry['t_statistic']:.2f}, p={entry['p_value']:.2g}" if "t_statistic" in entry else ""
        print(f"{name}: {100 * entry['mean_improvement']:.2f}% improvement{extra}")
