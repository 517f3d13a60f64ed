"""Geometric multigrid for the 2D/3D Poisson problem with optimized
sparse-approximate-inverse smoothers, plus the local Fourier analysis
machinery that predicts (and verifies) their convergence factors."""

from .grids import Grid
from .lfa import (
    InadmissibleSmootherError,
    LfaResult,
    SingularCoarseSymbolError,
    TheoremSearchResult,
    TwoGridResult,
    eval_J_2d,
    eval_r_3d,
    optimal_smoothing,
    optimize_omega_twogrid,
    smoothing_factor,
    two_grid_factor,
    verify_theorem_2d,
    verify_theorem_3d,
)
from .multigrid import MgConfig, SolveReport, cycle, prolong, restrict, smooth, solve
from .problems import Problem, assemble_rhs, error_inf, example
from .stencils import (
    NAMED_SMOOTHER_IDS,
    Frequency,
    NamedSmoother,
    Stencil,
    StencilSymmetryError,
    laplacian,
    named,
    tee,
    upsilon,
)

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "Stencil",
    "Frequency",
    "NamedSmoother",
    "StencilSymmetryError",
    "laplacian",
    "named",
    "upsilon",
    "tee",
    "NAMED_SMOOTHER_IDS",
    "LfaResult",
    "TwoGridResult",
    "TheoremSearchResult",
    "InadmissibleSmootherError",
    "SingularCoarseSymbolError",
    "smoothing_factor",
    "optimal_smoothing",
    "two_grid_factor",
    "optimize_omega_twogrid",
    "eval_J_2d",
    "verify_theorem_2d",
    "eval_r_3d",
    "verify_theorem_3d",
    "MgConfig",
    "SolveReport",
    "smooth",
    "restrict",
    "prolong",
    "cycle",
    "solve",
    "Problem",
    "example",
    "assemble_rhs",
    "error_inf",
    "__version__",
]
