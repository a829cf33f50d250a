"""Estimate the number of factors and lags of a dynamic factor model from the
spectra of symmetrized lag-covariance matrices."""

from ._version import __version__
from .estimator import (
    FactorOrderEstimator,
    NonConvergenceWarning,
    OrderEstimate,
    ThresholdSet,
    count_outliers,
    decide_orders,
    estimate_noise_variance,
    estimate_orders,
    threshold_tau0,
    threshold_tau_pos,
)
from .exceptions import (
    AspectRatioOne,
    CEqualsOne,
    ConvergenceFailure,
    DfmOrderError,
    EmptyInput,
    EmptyWindow,
    InsideSupport,
    InsufficientColumns,
    NonFinite,
    NonPositiveLambda,
    PanelError,
    RaggedRows,
)
from .io import read_panel_csv, report_dict, write_panel_csv
from .panel import Panel, Spectrum, SymLagCov, build_sym_lag_cov, eigenvalues_sym, lag_spectra, validate_panel
from .rmt import (
    LsdEdge,
    RmtContext,
    g_tau0,
    lsd_cdf,
    lsd_density,
    lsd_edge,
    lsd_stieltjes,
    lsd_support,
    mp_companion_stieltjes,
    mp_edges,
    mp_stieltjes,
    solve_y1,
    spike_location_tau0,
    stieltjes_edge_m1,
)
from .simulate import (
    ModelConfig,
    esd_ks_distance,
    generate_loadings,
    generate_panel,
    loading_gram_eigenvalues,
    run_replicates,
)
from .spikes import (
    build_H,
    classify_spike,
    g_infinity_threshold,
    g_j_eval,
    h_eigenvalues,
    predict_outlier_counts,
    solve_spike_tau,
)
