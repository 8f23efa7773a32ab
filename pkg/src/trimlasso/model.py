"""Problem containers, objective evaluation, and instance generation.

The estimation problem solved throughout this package is

    minimize_beta  0.5 * ||y - X beta||^2
                   + lam * (sum of the p - k smallest |beta_i|)
                   + eta * ||beta||_1

The middle term is the trimmed lasso penalty: it leaves the k largest
magnitudes unpenalized, so for a large enough ``lam`` it drives every
coefficient outside the top k to exactly zero.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "ProblemInstance",
    "TrimmedParams",
    "SolveStatus",
    "Solution",
    "SortedMagnitudes",
    "sorted_abs",
    "objective",
    "exactness_threshold",
    "generate_instance",
    "save_instance",
    "load_instance",
    "support_size",
]

# Zero-snapping threshold used when reporting support sizes.
ZERO_TOL = 1e-8

# Text format used for every float written to CSV; 17 significant digits
# round-trips IEEE doubles exactly.
FLOAT_FMT = "%.17g"


def _frozen_array(a, dtype=float, ndim=1):
    arr = np.array(a, dtype=dtype, order="F", copy=True)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("array entries must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ProblemInstance:
    """Design matrix and response for one regression problem.

    Arrays are validated, stored column-major, and marked read-only so an
    instance can be shared freely across solver calls and threads.
    """

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "X", _frozen_array(self.X, ndim=2))
        object.__setattr__(self, "y", _frozen_array(self.y, ndim=1))
        n, p = self.X.shape
        if n == 0 or p == 0:
            raise ValueError("design matrix must have at least one row and column")
        if self.y.shape[0] != n:
            raise ValueError(
                f"response length {self.y.shape[0]} does not match {n} rows of X"
            )

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class TrimmedParams:
    """Penalty parameters: trimmed weight ``lam``, lasso weight ``eta``, level ``k``.

    ``k`` is the number of largest-magnitude coefficients left out of the
    trimmed penalty; it must satisfy 0 <= k <= p for the instance at hand.
    """

    lam: float
    eta: float = 0.0
    k: int = 0

    def __post_init__(self):
        if not (self.lam >= 0.0 and math.isfinite(self.lam)):
            raise ValueError("lam must be finite and nonnegative")
        if not (self.eta >= 0.0 and math.isfinite(self.eta)):
            raise ValueError("eta must be finite and nonnegative")
        if int(self.k) != self.k or self.k < 0:
            raise ValueError("k must be a nonnegative integer")
        object.__setattr__(self, "k", int(self.k))


class SolveStatus(Enum):
    CONVERGED = "converged"
    ITERATION_LIMIT = "iteration_limit"
    EXACT = "exact"


@dataclass
class Solution:
    """Result of a solver call.

    ``objective`` is always the value of the problem the producing solver
    minimizes, evaluated at ``beta``.  ``iterations`` counts outer iterations,
    or enumerated subsets for exhaustive solvers.  Optional fields are filled
    only by the solvers they apply to.
    """

    beta: np.ndarray
    objective: float
    status: SolveStatus
    iterations: int
    trace: list[float] | None = None
    kkt_residual: float | None = None
    residual_trace: np.ndarray | None = None
    trimmed_objective: float | None = None

    def to_dict(self) -> dict:
        d = {
            "beta": [float(b) for b in self.beta],
            "objective": float(self.objective),
            "status": self.status.value,
            "iterations": int(self.iterations),
        }
        if self.kkt_residual is not None:
            d["kkt_residual"] = float(self.kkt_residual)
        if self.trimmed_objective is not None:
            d["trimmed_objective"] = float(self.trimmed_objective)
        return d


@dataclass(frozen=True)
class SortedMagnitudes:
    """Magnitudes of a vector in nonincreasing order plus the index map.

    ``permutation[i]`` is the original coordinate sitting at sorted position
    ``i``.  Ties are broken by ascending original index, which makes the
    permutation deterministic.
    """

    values: np.ndarray
    permutation: np.ndarray


def sorted_abs(beta) -> SortedMagnitudes:
    """Sort ``|beta|`` in nonincreasing order with a deterministic index map."""
    beta = np.asarray(beta, dtype=float)
    mags = np.abs(beta)
    # stable sort on -|beta| keeps ascending original order within ties
    perm = np.argsort(-mags, kind="stable")
    return SortedMagnitudes(values=mags[perm], permutation=perm)


def _trimmed_tail_sum(beta, k: int) -> float:
    """Sum of the p - k smallest |beta_i| (0 when k >= p)."""
    mags = np.sort(np.abs(np.asarray(beta, dtype=float)))
    p = mags.shape[0]
    if k >= p:
        return 0.0
    return float(np.sum(mags[: p - k]))


def objective(inst: ProblemInstance, params: TrimmedParams, beta) -> float:
    """Evaluate 0.5*||y - X beta||^2 + lam*(trimmed tail) + eta*||beta||_1."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (inst.p,):
        raise ValueError(f"beta has shape {beta.shape}, expected ({inst.p},)")
    if params.k > inst.p:
        raise ValueError(f"k={params.k} exceeds dimension p={inst.p}")
    r = inst.y - inst.X @ beta
    val = 0.5 * float(r @ r)
    val += params.lam * _trimmed_tail_sum(beta, params.k)
    val += params.eta * float(np.sum(np.abs(beta)))
    return val


def exactness_threshold(inst: ProblemInstance) -> float:
    """Weight beyond which the trimmed penalty forces k-sparse optima.

    Returns ``||y||_2 * max_j ||x_j||_2`` over the rows ``x_j`` of X.  For any
    ``lam`` strictly above this value (with ``eta > 0``) every optimum of the
    trimmed-lasso objective has at most k nonzero coefficients.
    """
    row_norms = np.linalg.norm(inst.X, axis=1)
    return float(np.linalg.norm(inst.y) * np.max(row_norms))


def support_size(beta, tol: float = ZERO_TOL) -> int:
    """Number of entries with |beta_i| > tol."""
    return int(np.sum(np.abs(np.asarray(beta, dtype=float)) > tol))


def generate_instance(
    seed: int,
    n: int = 100,
    p: int = 20,
    snr: float = 10.0,
    beta_true=None,
    corr: float = 0.8,
) -> ProblemInstance:
    """Draw a synthetic regression instance with an AR(1)-correlated design.

    Rows of X are i.i.d. N(0, Sigma) with Sigma_ij = corr**|i-j|.  Noise is
    i.i.d. N(0, beta_true' Sigma beta_true / snr); pass ``snr=inf`` for a
    noiseless response.  ``beta_true`` defaults to min(10, p) ones followed by
    zeros.

    Draw order is fixed (X first, then noise) and the generator is PCG64
    seeded with ``seed``, so equal arguments produce bit-identical instances.
    """
    if n <= 0 or p <= 0:
        raise ValueError("n and p must be positive")
    if not 0.0 <= corr < 1.0:
        raise ValueError("corr must lie in [0, 1)")
    if snr <= 0:
        raise ValueError("snr must be positive (math.inf allowed)")
    if beta_true is None:
        beta_true = np.zeros(p)
        beta_true[: min(10, p)] = 1.0
    beta_true = np.asarray(beta_true, dtype=float)
    if beta_true.shape != (p,):
        raise ValueError("beta_true must have length p")

    idx = np.arange(p)
    sigma = corr ** np.abs(idx[:, None] - idx[None, :])
    chol = np.linalg.cholesky(sigma)

    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p)) @ chol.T
    signal = X @ beta_true
    if math.isinf(snr):
        y = signal
    else:
        noise_var = float(beta_true @ sigma @ beta_true) / snr
        y = signal + rng.standard_normal(n) * math.sqrt(noise_var)
    return ProblemInstance(X=X, y=y)


def _format_float(x: float) -> str:
    return FLOAT_FMT % x


def save_instance(inst: ProblemInstance, directory: str, meta: dict | None = None):
    """Write X.csv, y.csv and meta.json into ``directory``.

    Output bytes are deterministic for a given instance and metadata.
    """
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "X.csv"), "w") as fh:
        for row in inst.X:
            fh.write(",".join(_format_float(v) for v in row) + "\n")
    with open(os.path.join(directory, "y.csv"), "w") as fh:
        for v in inst.y:
            fh.write(_format_float(v) + "\n")
    meta = dict(meta or {})
    meta.setdefault("n", inst.n)
    meta.setdefault("p", inst.p)
    with open(os.path.join(directory, "meta.json"), "w") as fh:
        json.dump(_jsonable(meta), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def load_instance(directory: str):
    """Read an instance saved by :func:`save_instance`.

    Returns ``(instance, meta)`` where ``meta`` is the parsed sidecar dict
    (empty when meta.json is absent).
    """
    X = np.loadtxt(os.path.join(directory, "X.csv"), delimiter=",", ndmin=2)
    y = np.loadtxt(os.path.join(directory, "y.csv"), delimiter=",", ndmin=1)
    meta_path = os.path.join(directory, "meta.json")
    meta: dict = {}
    if os.path.exists(meta_path):
        with open(meta_path) as fh:
            meta = json.load(fh)
    return ProblemInstance(X=X, y=y), meta
