"""Projection proximal-point solvers for l1-regularized least squares.

The problem ``min_u 1/2 ||K u - g||^2 + alpha ||u||_1`` is solved by a
proximal-point outer loop whose subproblems are solved inexactly, either by
damped soft-thresholding or by a generalized conditional gradient method,
and whose iterates are corrected by a projection onto a separating
hyperplane.
"""

from .baselines import IstaParams, ista_run
from .estimators import IstaLasso, ProximalPointLasso
from .inner import (
    InnerParams,
    SubproblemResult,
    damped_ista_step,
    gcg_search_direction,
    gcg_step_size,
    sigma_test,
    solve_subproblem,
)
from .operators import (
    CircularConvolution1D,
    CircularConvolution2D,
    Composition,
    DenseOperator,
    DimensionError,
    HatSynthesis,
    LinearOperator,
    NormEstimate,
    ScaledOperator,
    estimate_norm,
    identity,
    make_hat_synthesis,
)
from .oracle import OracleError, kkt_violation, oracle_solve, subproblem_oracle
from .ppp import OuterStep, PppParams, SolverTrace, TraceRow, project_hyperplane, run_ppp
from .problems import (
    DeconvSpec,
    HologramSpec,
    fresnel_kernel,
    make_deconvolution_problem,
    make_hologram_problem,
    make_random_fbi_problem,
    random_particles,
)
from .prox import (
    Certificate,
    Problem,
    certificate,
    objective,
    regularized_objective,
    sign_set_projection,
    soft_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "CircularConvolution1D",
    "CircularConvolution2D",
    "Composition",
    "DeconvSpec",
    "DenseOperator",
    "DimensionError",
    "HatSynthesis",
    "HologramSpec",
    "InnerParams",
    "IstaLasso",
    "IstaParams",
    "LinearOperator",
    "NormEstimate",
    "OracleError",
    "OuterStep",
    "PppParams",
    "Problem",
    "ProximalPointLasso",
    "ScaledOperator",
    "SolverTrace",
    "SubproblemResult",
    "TraceRow",
    "certificate",
    "damped_ista_step",
    "estimate_norm",
    "fresnel_kernel",
    "gcg_search_direction",
    "gcg_step_size",
    "identity",
    "ista_run",
    "kkt_violation",
    "make_deconvolution_problem",
    "make_hat_synthesis",
    "make_hologram_problem",
    "make_random_fbi_problem",
    "objective",
    "oracle_solve",
    "project_hyperplane",
    "random_particles",
    "regularized_objective",
    "run_ppp",
    "sigma_test",
    "sign_set_projection",
    "soft_threshold",
    "solve_subproblem",
    "subproblem_oracle",
]
