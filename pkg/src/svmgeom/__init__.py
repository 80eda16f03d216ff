"""Linear classifier geometry: SVM regimes, mean difference and data piling."""

from .classifiers import (
    INTERCEPT_MODES,
    SoftMarginSolution,
    adaptive_intercept,
    centroid_intercept,
    fld,
    hard_margin_svm,
    mdp_classifier,
    mean_difference,
    pooled_covariance,
    predict,
    soft_margin_svm,
    svm_centroids,
    with_intercept_mode,
)
from .data import (
    Dataset,
    GaussianPairConfig,
    LinearModel,
    direction_angle,
    directions_equivalent,
    generate_gaussian_pair,
    load_dataset_csv,
    normalize_labels,
    save_dataset_csv,
    transform_dataset,
)
from .errors import (
    ConvergenceError,
    DegenerateDirectionError,
    InvalidDirectionError,
    NoSupportVectorError,
    ParseError,
    RankError,
    SeparabilityError,
    SolverError,
)
from .geometry import (
    cp_intersection_lp,
    diameter,
    gap,
    has_complete_piling,
    is_convex_direction,
    mdp_direction,
    solve_affine_piling,
)
from .harness import (
    INTERCEPT_BENCHMARK,
    CGrid,
    ExperimentConfig,
    cross_validate,
    emit_plot_data,
    intercept_experiment,
    tuning_path,
)
from .kkt import (
    Regime,
    check_hard_margin_equiv,
    check_margin_bounce,
    check_mdp_equiv,
    check_small_c_regime,
    classify_support_vectors,
    regime_report,
    support_count_check,
    thresholds,
    verify_kkt_hard,
    verify_kkt_soft,
)
from .verify import verify_dataset

__version__ = "0.1.0"
