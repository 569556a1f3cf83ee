"""Riemannian multiplicative updates on the oblique manifold for
sparse-simplex-constrained least squares, with three baseline solvers and a
Monte-Carlo benchmark harness."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegeneratePenalty,
    EmptyTrace,
    InfeasibleSparsity,
    LineSearchFailed,
    NegativeEntry,
    NotOnSimplex,
    RankTooLarge,
    ZeroColumn,
)
from .manifold import (  # noqa: E402
    is_on_manifold,
    normalize_columns,
    project_normal,
    project_tangent,
    retract,
)
from .methods import Method  # noqa: E402
from .model import (  # noqa: E402
    GramCache,
    ProblemInstance,
    SplitGradient,
    euclidean_subgradient,
    hadamard_square,
    lift_to_oblique,
    objective_nssls,
    objective_quartic,
    quasi_norm_half,
    sign_subgradient,
    split_riemannian_subgradient,
)
from .solvers import (  # noqa: E402
    FlopClock,
    RcgState,
    SolverConfig,
    SolverTrace,
    WallClock,
    emu_step,
    emu_update,
    project_simplex_columns,
    rcg_step,
    rmu_step,
    run_solver,
    sparsemu_step,
    sparsemu_update,
)
