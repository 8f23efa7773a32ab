"""Heuristic solvers for the trimmed-lasso objective.

Three strategies, all returning a :class:`~trimlasso.model.Solution`:

* :func:`alt_min_solve` alternates between picking a subgradient of the
  concave part (the top-k magnitude sum) and solving the resulting weighted
  lasso, so every step is a convex problem and the objective never increases.
* :func:`admm_solve` splits the smooth-plus-lasso part from the trimmed
  penalty and alternates a tilted lasso step, a trimmed proximal step, and a
  scaled dual update.
* :func:`envelope_solve` minimizes the convex relaxation obtained by
  replacing the trimmed penalty with its convex envelope, by subgradient
  descent with best-iterate tracking.

:func:`check_local_optimality` certifies whether a point is a local minimum
by testing the subdifferential containment that characterizes local optima.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import ProblemInstance, Solution, SolveStatus, TrimmedParams, objective
from .penalties import convex_envelope
from .subproblems import WeightedLassoProblem, solve_weighted_lasso, trimmed_prox

__all__ = [
    "AltMinConfig",
    "AdmmConfig",
    "EnvelopeConfig",
    "select_tilt",
    "check_local_optimality",
    "alt_min_solve",
    "admm_solve",
    "envelope_solve",
    "envelope_objective",
    "write_trace_csv",
]

log = logging.getLogger(__name__)

def _escape_tol(eta: float, lam: float) -> float:
    """Threshold separating 'stationarity residual is zero' from 'is not'.

    At points produced by a converged inner lasso solve the residual tested
    by the escape rules is either near zero (inner tolerance, ~1e-10) or near
    the tilt magnitude lam, so any threshold between those scales classifies
    correctly.
    """
    return 1e-8 * max(1.0, eta + lam)


@dataclass(frozen=True)
class AltMinConfig:
    max_iter: int = 1000
    objective_tol: float = 1e-10
    start: np.ndarray | None = None
    inner_tol: float = 1e-10

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.objective_tol < 0:
            raise ValueError("objective_tol must be nonnegative")


@dataclass(frozen=True)
class AdmmConfig:
    sigma: float = 1.0
    dual_scale: float = 0.9
    max_outer: int = 10000
    max_inner: int = 2000
    primal_tol: float = 1e-8
    dual_tol: float = 1e-8
    inner_tol: float = 1e-10
    start: np.ndarray | None = None
    record_trace: bool = False

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not 0 < self.dual_scale <= 1:
            raise ValueError("dual_scale must lie in (0, 1]")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration limits must be at least 1")
        if self.primal_tol < 0 or self.dual_tol < 0:
            raise ValueError("residual tolerances must be nonnegative")


@dataclass(frozen=True)
class EnvelopeConfig:
    max_iter: int = 20000
    step_scale: float | None = None
    start: np.ndarray | None = None
    record_trace: bool = False

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.step_scale is not None and not self.step_scale > 0:
            raise ValueError("step_scale must be positive")


def _gram(inst: ProblemInstance):
    A = np.ascontiguousarray(inst.X.T @ inst.X)
    b = np.ascontiguousarray(inst.X.T @ inst.y)
    return A, b


def _classify_magnitudes(beta, k: int, tie_tol: float):
    """Split coordinates by position relative to the k-th largest magnitude.

    Returns (above, ties, threshold, m) where ``m`` is the number of tied
    coordinates that must be counted into the top k, and ``threshold`` is the
    k-th largest magnitude (requires k >= 1).
    """
    mags = np.abs(beta)
    p = mags.shape[0]
    thr = float(np.sort(mags)[p - k])
    band = tie_tol * max(1.0, thr)
    if thr <= band:
        # the k-th magnitude is (numerically) zero: every zero entry ties
        ties = np.flatnonzero(mags <= band)
        above = np.flatnonzero(mags > band)
    else:
        ties = np.flatnonzero(np.abs(mags - thr) <= band)
        above = np.flatnonzero(mags > thr + band)
    m = k - above.shape[0]
    return above, ties, thr if thr > band else 0.0, m


def select_tilt(beta, lam: float, k: int, grad, eta: float) -> np.ndarray:
    """Pick a subgradient of lam * (sum of the k largest |beta_i|).

    The returned vector is an extreme point of the subdifferential, with at
    most k entries of magnitude ``lam``.  At points where several coordinates
    tie for the k-th magnitude the choice is steered away from the current
    point whenever the local-optimality containment fails there, so the
    following weighted-lasso step can escape; the construction is
    deterministic (lowest tied index first).
    """
    beta = np.asarray(beta, dtype=float)
    grad = np.asarray(grad, dtype=float)
    p = beta.shape[0]
    if grad.shape != (p,):
        raise ValueError("grad must have the same length as beta")
    if not 0 <= k <= p:
        raise ValueError("k must lie in [0, p]")
    gamma = np.zeros(p)
    if k == 0 or lam == 0.0:
        return gamma
    esc = _escape_tol(eta, lam)
    above, ties, thr, m = _classify_magnitudes(beta, k, tie_tol=1e-9)
    m = min(max(m, 0), ties.shape[0])
    gamma[above] = lam * np.sign(beta[above])
    if ties.shape[0] == 0:
        return gamma
    if thr > 0.0:
        if m == ties.shape[0]:
            gamma[ties] = lam * np.sign(beta[ties])
            return gamma
        # a strict subset of the tied coordinates enters the top k; put the
        # first tied index on whichever extreme breaks stationarity there
        j = int(ties[0])
        rest = ties[1:]
        c_j = grad[j] + (eta + lam) * np.sign(beta[j])
        if abs(c_j) > esc:
            fill = rest[:m]
        else:
            gamma[j] = lam * np.sign(beta[j])
            fill = rest[: m - 1]
        gamma[fill] = lam * np.sign(beta[fill])
        return gamma
    # zero threshold: tied coordinates are exactly the zeros of beta
    chosen = None
    for j in ties:
        if grad[j] > eta + esc:
            gamma[j] = -lam
            chosen = j
            break
        if grad[j] < -(eta + esc):
            gamma[j] = lam
            chosen = j
            break
    budget = m if chosen is None else m - 1
    for j in ties:
        if budget == 0:
            break
        if j == chosen or gamma[j] != 0.0:
            continue
        gamma[j] = lam
        budget -= 1
    return gamma


def check_local_optimality(
    inst: ProblemInstance,
    params: TrimmedParams,
    beta,
    slack: float = 1e-8,
    tie_tol: float = 1e-9,
):
    """Test the subdifferential containment characterizing local minima.

    A point is a local minimum of the trimmed-lasso objective exactly when
    every subgradient of lam*(top-k sum) is also a subgradient of the convex
    part 0.5*||y - X beta||^2 + (eta + lam)*||beta||_1.  Both sets are boxes,
    so the test reduces to per-coordinate interval containment, checked here
    with additive ``slack``.

    Returns ``(ok, violations)`` where ``violations`` lists pairs of
    (coordinate index, containment violation magnitude).
    """
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (inst.p,):
        raise ValueError(f"beta must have shape ({inst.p},)")
    lam, eta, k = params.lam, params.eta, params.k
    if k > inst.p:
        raise ValueError("k exceeds dimension p")
    grad = inst.X.T @ (inst.X @ beta - inst.y)
    wt = eta + lam

    # interval of the concave part's subdifferential, per coordinate
    lo2 = np.zeros(inst.p)
    hi2 = np.zeros(inst.p)
    if k > 0 and lam > 0.0:
        above, ties, thr, m = _classify_magnitudes(beta, k, tie_tol)
        s = np.sign(beta)
        lo2[above] = hi2[above] = lam * s[above]
        if thr > 0.0:
            if m == ties.shape[0]:
                lo2[ties] = hi2[ties] = lam * s[ties]
            else:
                lo2[ties] = np.minimum(0.0, lam * s[ties])
                hi2[ties] = np.maximum(0.0, lam * s[ties])
        else:
            lo2[ties] = -lam
            hi2[ties] = lam
    # interval of the convex part's subdifferential
    nz = beta != 0.0
    lo1 = np.where(nz, grad + wt * np.sign(beta), grad - wt)
    hi1 = np.where(nz, grad + wt * np.sign(beta), grad + wt)

    gap = np.maximum(lo1 - lo2, hi2 - hi1)
    violations = [(int(j), float(gap[j])) for j in np.flatnonzero(gap > slack)]
    return len(violations) == 0, violations


def alt_min_solve(
    inst: ProblemInstance, params: TrimmedParams, config: AltMinConfig | None = None
) -> Solution:
    """Alternating linearize-then-lasso descent on the trimmed objective.

    Each iteration linearizes the concave top-k term at the current point via
    :func:`select_tilt` and solves the resulting tilted lasso warm-started
    from the current iterate, so the objective trace is nonincreasing.  Stops
    when consecutive objectives differ by at most ``objective_tol``.
    """
    cfg = config or AltMinConfig()
    if params.k > inst.p:
        raise ValueError("k exceeds dimension p")
    p = inst.p
    if cfg.start is None:
        beta = np.zeros(p)
    else:
        beta = np.array(cfg.start, dtype=float, copy=True)
        if beta.shape != (p,):
            raise ValueError(f"start must have shape ({p},)")
    Q, xty = _gram(inst)
    weights = np.full(p, params.eta + params.lam)
    f = objective(inst, params, beta)
    trace = [f]
    status = SolveStatus.ITERATION_LIMIT
    seen_tilts = set()
    repeats = 0
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        grad = Q @ beta - xty
        gamma = select_tilt(beta, params.lam, params.k, grad, params.eta)
        key = gamma.tobytes()
        if key in seen_tilts:
            repeats += 1
        else:
            seen_tilts.add(key)
        prob = WeightedLassoProblem(inst, weights=weights, tilt=gamma)
        inner = solve_weighted_lasso(prob, tol=cfg.inner_tol, start=beta)
        beta = inner.beta
        f_new = objective(inst, params, beta)
        trace.append(f_new)
        if abs(f_new - f) <= cfg.objective_tol:
            f = f_new
            status = SolveStatus.CONVERGED
            break
        f = f_new
    if repeats:
        log.debug("tilt vector repeated %d times over %d iterations", repeats, iterations)
    return Solution(beta=beta, objective=f, status=status, iterations=iterations, trace=trace)


def admm_solve(
    inst: ProblemInstance, params: TrimmedParams, config: AdmmConfig | None = None
) -> Solution:
    """Splitting method alternating a tilted lasso step and a trimmed prox.

    The consensus variable carries the trimmed penalty; the dual update is
    scaled by ``dual_scale``.  Returns the primal iterate (lasso-step output
    or consensus point) with the best trimmed objective seen, which need not
    be the final one.  For lam above the exactness threshold the consensus
    candidates win, so the output is then k-sparse.
    """
    cfg = config or AdmmConfig()
    if params.k > inst.p:
        raise ValueError("k exceeds dimension p")
    p = inst.p
    sigma, tau = cfg.sigma, cfg.dual_scale
    if cfg.start is None:
        # start both blocks at the lam=0 solution; the dual then builds up
        # gradually instead of the split starting maximally inconsistent
        init = solve_weighted_lasso(
            WeightedLassoProblem(inst, weights=np.full(p, params.eta)), tol=cfg.inner_tol
        )
        beta = init.beta
    else:
        beta = np.array(cfg.start, dtype=float, copy=True)
        if beta.shape != (p,):
            raise ValueError(f"start must have shape ({p},)")
    consensus = beta.copy()
    dual = np.zeros(p)
    Q, xty = _gram(inst)
    A = np.ascontiguousarray(Q + sigma * np.eye(p))
    weights = np.ascontiguousarray(np.full(p, params.eta))
    prox_step = params.lam / sigma

    best_obj = objective(inst, params, beta)
    best_beta = beta.copy()
    trace = [best_obj] if cfg.record_trace else None
    residuals = [] if cfg.record_trace else None
    status = SolveStatus.ITERATION_LIMIT
    iterations = 0
    for iterations in range(1, cfg.max_outer + 1):
        b = xty - dual + sigma * consensus
        _, _, code = _kernels.cd_weighted_lasso(A, b, weights, beta, cfg.max_inner, cfg.inner_tol)
        if code == _kernels.CD_UNBOUNDED:  # impossible: A has positive diagonal
            raise AssertionError("ridge-regularized inner problem reported unbounded")
        alpha = beta + dual / sigma
        consensus_new = trimmed_prox(alpha, params.k, prox_step)
        primal = float(np.linalg.norm(beta - consensus_new))
        dual_resid = float(sigma * np.linalg.norm(consensus_new - consensus))
        consensus = consensus_new
        dual = dual + tau * sigma * (beta - consensus)
        f = objective(inst, params, beta)
        if f < best_obj:
            best_obj = f
            best_beta[:] = beta
        f_cons = objective(inst, params, consensus)
        if f_cons < best_obj:
            best_obj = f_cons
            best_beta[:] = consensus
        if cfg.record_trace:
            trace.append(f)
            residuals.append((primal, dual_resid))
        if primal <= cfg.primal_tol and dual_resid <= cfg.dual_tol:
            status = SolveStatus.CONVERGED
            break
    return Solution(
        beta=best_beta,
        objective=best_obj,
        status=status,
        iterations=iterations,
        trace=trace,
        residual_trace=np.array(residuals) if cfg.record_trace else None,
    )


def envelope_objective(inst: ProblemInstance, params: TrimmedParams, beta) -> float:
    """Convex relaxation value: squared loss + eta*L1 + lam*hinge(L1 - k)."""
    beta = np.asarray(beta, dtype=float)
    r = inst.y - inst.X @ beta
    return (
        0.5 * float(r @ r)
        + params.eta * float(np.sum(np.abs(beta)))
        + params.lam * convex_envelope(beta, params.k)
    )


def envelope_solve(
    inst: ProblemInstance, params: TrimmedParams, config: EnvelopeConfig | None = None
) -> Solution:
    """Subgradient descent on the convex envelope relaxation.

    Starts from the plain lasso solution unless a start is given (if that
    point already has L1 norm at most k it is optimal for the relaxation and
    is returned unchanged).  Steps shrink as 1/sqrt(t) from an initial scale
    of one over the spectral norm of X'X; the best iterate is returned.  At
    the default iteration count the best objective lands within about 1e-3
    relative of the relaxation optimum on desk-scale problems.

    ``objective`` on the returned solution is the relaxation value;
    ``trimmed_objective`` carries the trimmed-lasso objective of the same
    point.  Status is converged when the best iterate stopped improving over
    the last quarter of the run.
    """
    cfg = config or EnvelopeConfig()
    if params.k > inst.p:
        raise ValueError("k exceeds dimension p")
    p = inst.p
    Q, xty = _gram(inst)
    if cfg.start is None:
        lasso = solve_weighted_lasso(
            WeightedLassoProblem(inst, weights=np.full(p, params.eta)), tol=1e-10
        )
        x0 = lasso.beta
    else:
        x0 = np.array(cfg.start, dtype=float, copy=True)
        if x0.shape != (p,):
            raise ValueError(f"start must have shape ({p},)")
    step = cfg.step_scale
    if step is None:
        step = 1.0 / max(float(np.linalg.norm(Q, 2)), 1e-12)
    const = 0.5 * float(inst.y @ inst.y)
    trace_arr = np.empty(cfg.max_iter + 1) if cfg.record_trace else np.empty(0)
    best, best_obj, t_best = _kernels.envelope_subgradient(
        Q,
        xty,
        const,
        params.eta,
        params.lam,
        float(params.k),
        x0,
        cfg.max_iter,
        step,
        trace_arr,
    )
    plateau = cfg.max_iter - t_best >= max(cfg.max_iter // 4, 1)
    return Solution(
        beta=best,
        objective=float(best_obj),
        status=SolveStatus.CONVERGED if plateau else SolveStatus.ITERATION_LIMIT,
        iterations=cfg.max_iter,
        trace=list(trace_arr) if cfg.record_trace else None,
        trimmed_objective=objective(inst, params, best),
    )


def write_trace_csv(solution: Solution, path: str):
    """Write the per-iteration objective trace (and residuals if present)."""
    if solution.trace is None:
        raise ValueError("solution carries no trace")
    with_resid = solution.residual_trace is not None
    with open(path, "w") as fh:
        if with_resid:
            fh.write("# trimlasso trace v1: iter,objective,primal_residual,dual_residual\n")
        else:
            fh.write("# trimlasso trace v1: iter,objective\n")
        for i, obj in enumerate(solution.trace):
            row = f"{i},{obj:.17g}"
            if with_resid:
                if i == 0:
                    row += ",,"
                else:
                    pr, dr = solution.residual_trace[i - 1]
                    row += f",{pr:.17g},{dr:.17g}"
            fh.write(row + "\n")
