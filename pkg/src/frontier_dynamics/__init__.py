"""Constrained mean-variance frontiers plus a logistic-map stability screen."""

__version__ = "0.1.0"

from . import errors
from .market_data import (
    AssetMoments,
    ReturnSeries,
    annualize,
    correlation_matrix,
    estimate_moments,
    load_returns_csv,
)
from .mean_variance import (
    FrontierPoint,
    PortfolioWeights,
    TwoAssetFrontier,
    evaluate,
    portfolio_mean,
    portfolio_stddev,
    two_asset_frontier,
)
from .frontier import (
    ConstraintSet,
    CornerPortfolio,
    TangencyResult,
    corner_portfolios,
    dollar_neutral_optimize,
    efficient_frontier,
    frontier_with_turnover,
    grid_oracle,
    max_sharpe_portfolio,
    min_variance_for_target_return,
    optimize_130_30,
    tangency_portfolio,
)
from .logistic import (
    CHAOTIC,
    FEIGENBAUM_DELTA,
    BifurcationDiagram,
    BifurcationSequence,
    FeigenbaumEstimate,
    MapParams,
    QuadraticTrajectory,
    Trajectory,
    attractor_sample,
    bifurcation_diagram,
    conjugate_state,
    convert_parameter,
    detect_bifurcations,
    detect_period,
    feigenbaum_ratio,
    find_chaos_onset,
    fixed_points,
    iterate_logistic,
    iterate_quadratic_form,
    multiplier_at,
    period2_multiplier,
    period2_points,
)
from .stability import (
    AnnotatedFrontierPoint,
    AssetDynamics,
    PairVerdict,
    ScreenConfig,
    ScreenPolicy,
    SigmaMapConfig,
    StabilityReport,
    build_asset_dynamics,
    divergence_test,
    dynamics_from_moments,
    filter_frontier,
    lyapunov_exponent,
    map_sigma_to_r,
    report_to_dict,
    screen_pair,
    screen_portfolio,
)

__all__ = [name for name in dir() if not name.startswith("_")]
