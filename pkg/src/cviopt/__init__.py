"""cviopt: first-order methods for convex optimization over Cartesian VI constraints.

The library solves  min f(x)  subject to  x in SOL(X, F)  where X is a
Cartesian product of simple convex sets, F is a monotone mapping, and f
is convex.  The workhorse is a single-loop randomized block method that
combines projected gradient steps on F + eta_k * subgrad(f) with decaying
step sizes, decaying regularization, and weighted iterate averaging; a
classical sequential-regularization baseline and Tikhonov-trajectory
utilities are included for comparison and validation.
"""

from .blocks import (
    BlockStructure,
    SolverState,
    block_distance,
    make_state,
    sample_block,
    sample_blocks,
    update_average,
    weighted_average,
)
from .metrics import (
    BlockMoments,
    GapEstimatorConfig,
    HarmonicCheck,
    PredictedBounds,
    averaging_threshold,
    block_sampling_moments,
    dual_gap_estimate,
    harmonic_bounds_check,
    harmonic_threshold,
    natural_residual,
    predicted_bounds,
    rate_slope,
    suboptimality,
    trace_rate_slope,
)
from .problems import (
    Constants,
    CournotParams,
    ProblemSpec,
    QuadraticConstraint,
    benchmark_cournot,
    benchmark_l1_instance,
    benchmark_unbounded_instance,
    build_cournot,
    build_l1_over_affine_box,
    build_lcp,
    build_penalized_program,
    build_strongly_convex_unbounded,
    scalar_tikhonov_instance,
)
from .schedules import BOUNDED, UNBOUNDED, Schedule, ValidationReport, regparam, stepsize, validate_schedule
from .sets import (
    BalancedBox,
    Ball,
    Box,
    NonnegOrthant,
    SetDescriptor,
    WholeSpace,
    contains,
    project,
    project_balanced,
)
from .solvers import (
    RegularizedMap,
    SolveResult,
    rbirg_step,
    run_rbirg,
    run_sr,
    solve_potential_vi,
    solve_regularized_vi,
    tikhonov_path,
    tikhonov_point,
)
from .trace import RunTrace, TraceRecord

__version__ = "0.1.0"
