"""Convex building blocks shared by the heuristic and exact solvers.

The workhorse is :func:`solve_weighted_lasso`, a cyclic coordinate-descent
solver for

    0.5*||y - X beta||^2 + sum_j w_j |beta_j| - <c, beta>
    [+ sigma/2 * ||beta - g||^2]

with per-coordinate weights ``w``, an optional linear tilt ``c``, and an
optional proximal ridge term.  All solvers in this package reduce their inner
steps to this problem or to :func:`trimmed_prox`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import ProblemInstance, Solution, SolveStatus

__all__ = [
    "soft_threshold",
    "WeightedLassoProblem",
    "solve_weighted_lasso",
    "trimmed_prox",
    "ridge_residual_operator",
]


def soft_threshold(x, t: float) -> np.ndarray:
    """Shrink toward zero: sign(x) * max(|x| - t, 0)."""
    x = np.asarray(x, dtype=float)
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


@dataclass(frozen=True)
class WeightedLassoProblem:
    """Weighted lasso with optional tilt and proximal ridge term.

    ``weights`` must be nonnegative with length p.  ``tilt`` contributes
    ``-<tilt, beta>`` to the objective.  ``ridge_center`` is a pair
    ``(center, sigma)`` adding ``sigma/2 * ||beta - center||^2``.
    """

    instance: ProblemInstance
    weights: np.ndarray
    tilt: np.ndarray | None = None
    ridge_center: tuple | None = None

    def __post_init__(self):
        p = self.instance.p
        w = np.array(self.weights, dtype=float, copy=True)
        if w.shape != (p,):
            raise ValueError(f"weights must have shape ({p},)")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.tilt is not None:
            c = np.array(self.tilt, dtype=float, copy=True)
            if c.shape != (p,):
                raise ValueError(f"tilt must have shape ({p},)")
            if not np.all(np.isfinite(c)):
                raise ValueError("tilt must be finite")
            c.setflags(write=False)
            object.__setattr__(self, "tilt", c)
        if self.ridge_center is not None:
            center, sigma = self.ridge_center
            center = np.array(center, dtype=float, copy=True)
            if center.shape != (p,):
                raise ValueError(f"ridge center must have shape ({p},)")
            sigma = float(sigma)
            if not sigma > 0:
                raise ValueError("ridge strength must be positive")
            center.setflags(write=False)
            object.__setattr__(self, "ridge_center", (center, sigma))

    def objective_value(self, beta) -> float:
        beta = np.asarray(beta, dtype=float)
        r = self.instance.y - self.instance.X @ beta
        val = 0.5 * float(r @ r) + float(self.weights @ np.abs(beta))
        if self.tilt is not None:
            val -= float(self.tilt @ beta)
        if self.ridge_center is not None:
            center, sigma = self.ridge_center
            d = beta - center
            val += 0.5 * sigma * float(d @ d)
        return val

    def gram(self):
        """Quadratic form (A, b) with objective 0.5 beta'A beta - b'beta + const."""
        X, y = self.instance.X, self.instance.y
        A = np.ascontiguousarray(X.T @ X)
        b = X.T @ y
        if self.tilt is not None:
            b = b + self.tilt
        if self.ridge_center is not None:
            center, sigma = self.ridge_center
            A = A + sigma * np.eye(self.instance.p)
            b = b + sigma * center
        return A, np.ascontiguousarray(b)


def solve_weighted_lasso(
    prob: WeightedLassoProblem,
    tol: float = 1e-8,
    max_iter: int = 10000,
    start=None,
) -> Solution:
    """Solve a :class:`WeightedLassoProblem` by cyclic coordinate descent.

    Terminates when the per-coordinate subgradient (KKT) residual drops to
    ``tol`` in the sup norm; each sweep can only decrease the objective, so
    warm starts are safe.  Raises ValueError when a zero-curvature column
    carries a tilt larger than its weight (unbounded objective).
    """
    p = prob.instance.p
    if start is None:
        beta = np.zeros(p)
    else:
        beta = np.array(start, dtype=float, copy=True)
        if beta.shape != (p,):
            raise ValueError(f"start must have shape ({p},)")
    A, b = prob.gram()
    sweeps, kkt, code = _kernels.cd_weighted_lasso(
        A, b, np.ascontiguousarray(prob.weights), beta, max_iter, tol
    )
    if code == _kernels.CD_UNBOUNDED:
        raise ValueError(
            "objective unbounded: zero-curvature coordinate with |tilt| above its weight"
        )
    status = SolveStatus.CONVERGED if code == _kernels.CD_CONVERGED else SolveStatus.ITERATION_LIMIT
    return Solution(
        beta=beta,
        objective=prob.objective_value(beta),
        status=status,
        iterations=int(sweeps),
        kkt_residual=float(kkt),
    )


def trimmed_prox(alpha, k: int, t: float) -> np.ndarray:
    """Proximal map of t * (sum of the p - k smallest magnitudes).

    Keeps the k largest |alpha_i| untouched and soft-thresholds the rest at
    ``t``.  Ties at the k-th magnitude are resolved by keeping the lower
    index, which makes the map deterministic.
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim != 1:
        raise ValueError("alpha must be a 1-d vector")
    if not 0 <= k <= alpha.shape[0]:
        raise ValueError("k must lie in [0, p]")
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    out = soft_threshold(alpha, t)
    if k > 0:
        keep = np.argsort(-np.abs(alpha), kind="stable")[:k]
        out[keep] = alpha[keep]
    return out


def ridge_residual_operator(X, lam: float) -> np.ndarray:
    """Symmetric PSD square root of I - X (X'X + lam I)^{-1} X'.

    With A the returned matrix, 0.5*||A(y - X phi)||^2 equals the value of
    min over eps of 0.5*||y - X(phi + eps)||^2 + lam/2*||eps||^2, i.e. the
    loss left after an optimal ridge-penalized correction of phi.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be a matrix")
    if not lam > 0:
        raise ValueError("ridge parameter must be positive")
    n, p = X.shape
    middle = np.linalg.solve(X.T @ X + lam * np.eye(p), X.T)
    M = np.eye(n) - X @ middle
    M = 0.5 * (M + M.T)
    vals, vecs = np.linalg.eigh(M)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T
