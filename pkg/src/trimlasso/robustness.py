"""Adversarial-perturbation calculus for the unsquared regression loss.

The quantity studied is ||y - (X + Delta) beta||_2 as the perturbation Delta
ranges over an uncertainty set of column-wise bounded matrices.  Best and
worst cases both admit closed forms built from the residual norm and sorted
coefficient magnitudes; this module provides those values, explicit
perturbations attaining them, membership tests, and a documented sampler
used to stress the closed forms against random members.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ProblemInstance, sorted_abs
from .penalties import slope as slope_penalty

__all__ = [
    "ColumnBounded",
    "KColumnBounded",
    "SlopeBall",
    "membership",
    "min_adversary_value",
    "min_adversary_witness",
    "max_adversary_value",
    "max_adversary_witness",
    "minmin_constraint_check",
    "sample_member",
]


@dataclass(frozen=True)
class ColumnBounded:
    """All columns of Delta have Euclidean norm at most mu."""

    mu: float

    def __post_init__(self):
        if not self.mu >= 0:
            raise ValueError("mu must be nonnegative")


@dataclass(frozen=True)
class KColumnBounded:
    """At most k nonzero columns, each of Euclidean norm at most lam."""

    k: int
    lam: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise ValueError("k must be a nonnegative integer")
        object.__setattr__(self, "k", int(self.k))
        if not self.lam >= 0:
            raise ValueError("lam must be nonnegative")


@dataclass(frozen=True)
class SlopeBall:
    """Sorted column norms bounded by lam * w elementwise.

    ``w`` must be valid sorted-L1 weights: nonincreasing, nonnegative, with a
    positive leading entry.
    """

    w: tuple
    lam: float

    def __post_init__(self):
        w = tuple(float(v) for v in self.w)
        if not w or w[0] <= 0:
            raise ValueError("leading weight must be positive")
        if any(v < 0 for v in w):
            raise ValueError("weights must be nonnegative")
        if any(b > a for a, b in zip(w, w[1:])):
            raise ValueError("weights must be nonincreasing")
        object.__setattr__(self, "w", w)
        if not self.lam >= 0:
            raise ValueError("lam must be nonnegative")


def _delta_matrix(delta, p: int | None = None) -> np.ndarray:
    delta = np.asarray(delta, dtype=float)
    if delta.ndim != 2:
        raise ValueError("Delta must be a matrix")
    if p is not None and delta.shape[1] != p:
        raise ValueError(f"Delta must have {p} columns")
    return delta


def membership(uset, delta, tol: float = 1e-12) -> bool:
    """Exact test of the defining inequalities, with additive slack ``tol``.

    ``tol`` also serves as the threshold below which a column counts as zero
    for the nonzero-column budget of :class:`KColumnBounded`.
    """
    delta = _delta_matrix(delta)
    norms = np.linalg.norm(delta, axis=0)
    if isinstance(uset, ColumnBounded):
        return bool(np.all(norms <= uset.mu + tol * max(1.0, uset.mu)))
    if isinstance(uset, KColumnBounded):
        if np.any(norms > uset.lam + tol * max(1.0, uset.lam)):
            return False
        return int(np.sum(norms > tol)) <= uset.k
    if isinstance(uset, SlopeBall):
        if len(uset.w) != delta.shape[1]:
            raise ValueError("weight length must match the number of columns")
        caps = uset.lam * np.asarray(uset.w)
        ordered = np.flip(np.sort(norms))
        return bool(np.all(ordered <= caps + tol * max(1.0, caps[0])))
    raise ValueError(f"unknown uncertainty set: {uset!r}")


def _residual(inst: ProblemInstance, beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (inst.p,):
        raise ValueError(f"beta must have shape ({inst.p},)")
    return inst.y - inst.X @ beta


def _top_sum(beta, k: int) -> float:
    mags = np.flip(np.sort(np.abs(np.asarray(beta, dtype=float))))
    return float(np.sum(mags[:k]))


def min_adversary_value(inst: ProblemInstance, beta, uset: KColumnBounded) -> float:
    """Best-case loss: (||r||_2 - lam * top-k magnitude sum) clipped at zero.

    A friendly perturbation can cancel residual at rate lam per unit of the k
    largest coefficient magnitudes, but never push the loss below zero.
    """
    if not isinstance(uset, KColumnBounded):
        raise ValueError("best-case value is defined for KColumnBounded sets")
    r = _residual(inst, beta)
    return max(float(np.linalg.norm(r)) - uset.lam * _top_sum(beta, uset.k), 0.0)


def min_adversary_witness(inst: ProblemInstance, beta, uset: KColumnBounded) -> np.ndarray:
    """A member of the set attaining :func:`min_adversary_value`.

    Aligns each perturbation column with the residual direction on the top-k
    coordinates, at the smallest column norm that already achieves the
    clipped value.
    """
    if not isinstance(uset, KColumnBounded):
        raise ValueError("best-case witness is defined for KColumnBounded sets")
    beta = np.asarray(beta, dtype=float)
    r = _residual(inst, beta)
    rnorm = float(np.linalg.norm(r))
    top = _top_sum(beta, uset.k)
    delta = np.zeros_like(inst.X)
    if rnorm == 0.0 or top == 0.0 or uset.lam == 0.0:
        return delta
    scale = min(uset.lam, rnorm / top)
    direction = r / rnorm
    for i in sorted_abs(beta).permutation[: uset.k]:
        if beta[i] != 0.0:
            delta[:, i] = scale * np.sign(beta[i]) * direction
    return delta


def max_adversary_value(inst: ProblemInstance, beta, uset) -> float:
    """Worst-case loss over the uncertainty set, in closed form."""
    r = _residual(inst, beta)
    rnorm = float(np.linalg.norm(r))
    beta = np.asarray(beta, dtype=float)
    if isinstance(uset, ColumnBounded):
        return rnorm + uset.mu * float(np.sum(np.abs(beta)))
    if isinstance(uset, KColumnBounded):
        return rnorm + uset.lam * _top_sum(beta, uset.k)
    if isinstance(uset, SlopeBall):
        if len(uset.w) != inst.p:
            raise ValueError("weight length must match p")
        return rnorm + uset.lam * slope_penalty(beta, np.asarray(uset.w))
    raise ValueError(f"unknown uncertainty set: {uset!r}")


def max_adversary_witness(inst: ProblemInstance, beta, uset) -> np.ndarray:
    """A member of the set attaining :func:`max_adversary_value`.

    Pushes every relevant column against the residual direction (an arbitrary
    unit direction when the residual vanishes).  Not available for
    :class:`SlopeBall`, whose worst case needs no explicit perturbation here.
    """
    if isinstance(uset, SlopeBall):
        raise NotImplementedError("no witness constructor for SlopeBall sets")
    beta = np.asarray(beta, dtype=float)
    r = _residual(inst, beta)
    rnorm = float(np.linalg.norm(r))
    if rnorm > 0.0:
        direction = r / rnorm
    else:
        direction = np.zeros(inst.n)
        direction[0] = 1.0
    delta = np.zeros_like(inst.X)
    if isinstance(uset, ColumnBounded):
        for i in range(inst.p):
            if beta[i] != 0.0:
                delta[:, i] = -uset.mu * np.sign(beta[i]) * direction
        return delta
    if isinstance(uset, KColumnBounded):
        for i in sorted_abs(beta).permutation[: uset.k]:
            if beta[i] != 0.0:
                delta[:, i] = -uset.lam * np.sign(beta[i]) * direction
        return delta
    raise ValueError(f"unknown uncertainty set: {uset!r}")


def minmin_constraint_check(inst: ProblemInstance, beta, lam: float, k: int) -> bool:
    """Whether lam * (top-k magnitude sum) <= ||r||_2 at this point.

    Optima of the jointly-minimal (friendly perturbation) trimmed problem
    always satisfy this inequality; the comparison is exact, with no slack.
    """
    r = _residual(inst, beta)
    return lam * _top_sum(beta, k) <= float(np.linalg.norm(r))


def _random_unit_columns(n: int, count: int, rng) -> np.ndarray:
    cols = rng.standard_normal((n, count))
    norms = np.linalg.norm(cols, axis=0)
    norms[norms == 0.0] = 1.0
    return cols / norms


def sample_member(uset, n: int, p: int, rng) -> np.ndarray:
    """Draw a random member: uniform direction and uniform radius per column.

    Each active column is an independent uniform direction on the sphere
    scaled by a uniform fraction of its norm cap.  For
    :class:`KColumnBounded` the active columns are a uniform size-k subset;
    for :class:`SlopeBall` the caps lam*w are assigned to columns by a
    uniform random permutation, which keeps the sorted-norm bounds valid.
    """
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    delta = np.zeros((n, p))
    if isinstance(uset, ColumnBounded):
        dirs = _random_unit_columns(n, p, rng)
        radii = rng.uniform(0.0, 1.0, size=p) * uset.mu
        return dirs * radii
    if isinstance(uset, KColumnBounded):
        count = min(uset.k, p)
        if count == 0:
            return delta
        active = rng.choice(p, size=count, replace=False)
        dirs = _random_unit_columns(n, count, rng)
        radii = rng.uniform(0.0, 1.0, size=count) * uset.lam
        delta[:, active] = dirs * radii
        return delta
    if isinstance(uset, SlopeBall):
        if len(uset.w) != p:
            raise ValueError("weight length must match p")
        perm = rng.permutation(p)
        dirs = _random_unit_columns(n, p, rng)
        radii = rng.uniform(0.0, 1.0, size=p) * uset.lam * np.asarray(uset.w)
        delta[:, perm] = dirs * radii
        return delta
    raise ValueError(f"unknown uncertainty set: {uset!r}")
