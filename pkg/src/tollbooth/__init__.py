"""Approximate revenue-maximizing edge prices for the tollbooth problem on trees."""

from .classification import ClassifiedInstance, SolveReport, choose_k, classify, is_separated, single_edge_pricing, solve_full
from .decomp_solver import (
    CapExceeded,
    GammaGrid,
    Selector,
    SolverConfig,
    build_gamma_grid,
    expected_revenue,
    scenario1,
    scenario2,
    solve_decomposition,
)
from .decomposition import (
    Decomposition,
    SkeletonInfo,
    balanced_k_decomposition,
    centroid_split,
    extract_skeleton,
    trivial_decomposition,
)
from .model import (
    Customer,
    Instance,
    PricingScheme,
    RevenueBreakdown,
    Tree,
    ValidationError,
    evaluate_revenue,
    revenue_breakdown,
    tree_path,
)
from .oracle import OracleResult, brute_force_opt, gamma_round
from .single_source import SingleSourceInstance, solve_single_source

__version__ = "0.1.0"
