"""Sparse regression with the trimmed lasso penalty.

The trimmed lasso charges only the p - k smallest coefficient magnitudes, so
it penalizes distance from k-sparsity instead of shrinking everything.  This
package provides the penalty family, the convex subproblems, three heuristic
solvers, certified exact solvers at desk scale, an adversarial-perturbation
calculus, and a command-line experiment harness (``trimlasso --help``).
"""

from .exact import (
    BudgetExceeded,
    ClippedEquivalence,
    MioModel,
    ObjectiveSequence,
    assignment_from_beta,
    check_clipped_equivalence,
    clipped_lasso_exact,
    exact_solve,
    export_mio,
    objective_sequence,
    parse_mio,
    split_decomposition,
    trimmed_ridge_exact,
    verify_scaling_identity,
)
from .heuristics import (
    AdmmConfig,
    AltMinConfig,
    EnvelopeConfig,
    admm_solve,
    alt_min_solve,
    check_local_optimality,
    envelope_objective,
    envelope_solve,
    select_tilt,
    write_trace_csv,
)
from .model import (
    ProblemInstance,
    Solution,
    SolveStatus,
    SortedMagnitudes,
    TrimmedParams,
    exactness_threshold,
    generate_instance,
    load_instance,
    objective,
    save_instance,
    sorted_abs,
    support_size,
)
from .penalties import (
    ClippedLasso,
    CompositePenalty,
    ConvexEnvelope,
    GFunction,
    LogPenalty,
    Mcp,
    PowerPenalty,
    ProjectedPenalty,
    Scad,
    Slope,
    TrimmedLasso,
    WeightedTrimmed,
    convex_envelope,
    penalty_from_json,
    penalty_to_json,
    projected_penalty,
    separable_penalty,
    slope,
    trimmed_lasso,
    weighted_trimmed,
)
from .robustness import (
    ColumnBounded,
    KColumnBounded,
    SlopeBall,
    max_adversary_value,
    max_adversary_witness,
    membership,
    min_adversary_value,
    min_adversary_witness,
    minmin_constraint_check,
    sample_member,
)
from .subproblems import (
    WeightedLassoProblem,
    ridge_residual_operator,
    soft_threshold,
    solve_weighted_lasso,
    trimmed_prox,
)

__version__ = "0.1.0"
