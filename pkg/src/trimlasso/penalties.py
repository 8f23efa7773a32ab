"""Sparsity-inducing penalty functions and their serializable specs.

Two families live here: order-statistic penalties that act on the sorted
magnitudes of the coefficient vector (trimmed lasso and friends), and
separable penalties applied coordinate-by-coordinate (clipped lasso, MCP,
SCAD, power, log).  Each spec is a small frozen dataclass with an
``evaluate`` method and a JSON round trip via :func:`penalty_to_json` /
:func:`penalty_from_json`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "trimmed_lasso",
    "weighted_trimmed",
    "slope",
    "separable_penalty",
    "projected_penalty",
    "convex_envelope",
    "GFunction",
    "TrimmedLasso",
    "WeightedTrimmed",
    "Slope",
    "ProjectedPenalty",
    "ConvexEnvelope",
    "ClippedLasso",
    "Mcp",
    "Scad",
    "PowerPenalty",
    "LogPenalty",
    "CompositePenalty",
    "penalty_to_json",
    "penalty_from_json",
]


def _as_vector(beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    if beta.ndim != 1:
        raise ValueError("beta must be a 1-d vector")
    return beta


def trimmed_lasso(beta, k: int) -> float:
    """Sum of the p - k smallest |beta_i|; zero when k >= p."""
    beta = _as_vector(beta)
    if k < 0:
        raise ValueError("k must be nonnegative")
    p = beta.shape[0]
    if k >= p:
        return 0.0
    mags = np.sort(np.abs(beta))
    return float(np.sum(mags[: p - k]))


def weighted_trimmed(beta, x) -> float:
    """Weighted sum of sorted magnitudes, small weights on large entries.

    ``x`` must be nonnegative and nondecreasing; entry ``x[i]`` multiplies the
    (i+1)-th largest magnitude, so the largest coefficients receive the
    smallest weights.
    """
    beta = _as_vector(beta)
    x = _as_vector(x)
    if x.shape != beta.shape:
        raise ValueError("weights must have the same length as beta")
    if np.any(x < 0):
        raise ValueError("weights must be nonnegative")
    if np.any(np.diff(x) < 0):
        raise ValueError("weights must be nondecreasing")
    mags = np.flip(np.sort(np.abs(beta)))
    return float(x @ mags)


def slope(beta, w) -> float:
    """Sorted-L1 penalty: nonincreasing weights paired with sorted magnitudes."""
    beta = _as_vector(beta)
    w = _as_vector(w)
    if w.shape != beta.shape:
        raise ValueError("weights must have the same length as beta")
    if w[0] <= 0:
        raise ValueError("leading weight must be positive")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if np.any(np.diff(w) > 0):
        raise ValueError("weights must be nonincreasing")
    mags = np.flip(np.sort(np.abs(beta)))
    return float(w @ mags)


class GFunction(Enum):
    """Scalar transforms available inside the projected penalty."""

    ABSOLUTE_VALUE = "abs"
    HALF_SQUARE = "half_square"

    def apply(self, t: np.ndarray) -> np.ndarray:
        if self is GFunction.ABSOLUTE_VALUE:
            return t
        return 0.5 * t * t


def projected_penalty(beta, k: int, g: GFunction) -> float:
    """Apply ``g`` to the p - k smallest magnitudes and sum the results."""
    beta = _as_vector(beta)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if not isinstance(g, GFunction):
        raise ValueError("g must be a GFunction member")
    p = beta.shape[0]
    if k >= p:
        return 0.0
    mags = np.sort(np.abs(beta))[: p - k]
    return float(np.sum(g.apply(mags)))


def convex_envelope(beta, k: int) -> float:
    """Hinge on the L1 norm: max(||beta||_1 - k, 0).

    This is the tightest convex minorant of the trimmed lasso on the unit
    sup-norm box, and the objective the envelope solver minimizes.
    """
    beta = _as_vector(beta)
    if k < 0:
        raise ValueError("k must be nonnegative")
    return float(max(np.sum(np.abs(beta)) - k, 0.0))


# ---------------------------------------------------------------------------
# order-statistic specs


@dataclass(frozen=True)
class TrimmedLasso:
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise ValueError("k must be a nonnegative integer")
        object.__setattr__(self, "k", int(self.k))

    def evaluate(self, beta) -> float:
        return trimmed_lasso(beta, self.k)


@dataclass(frozen=True)
class WeightedTrimmed:
    x: tuple

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        if any(v < 0 for v in x):
            raise ValueError("weights must be nonnegative")
        if any(b < a for a, b in zip(x, x[1:])):
            raise ValueError("weights must be nondecreasing")
        object.__setattr__(self, "x", x)

    def evaluate(self, beta) -> float:
        return weighted_trimmed(beta, np.array(self.x))


@dataclass(frozen=True)
class Slope:
    w: tuple

    def __post_init__(self):
        w = tuple(float(v) for v in self.w)
        if not w or w[0] <= 0:
            raise ValueError("leading weight must be positive")
        if any(v < 0 for v in w):
            raise ValueError("weights must be nonnegative")
        if any(b > a for a, b in zip(w, w[1:])):
            raise ValueError("weights must be nonincreasing")
        object.__setattr__(self, "w", w)

    def evaluate(self, beta) -> float:
        return slope(beta, np.array(self.w))


@dataclass(frozen=True)
class ProjectedPenalty:
    k: int
    g: GFunction

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise ValueError("k must be a nonnegative integer")
        object.__setattr__(self, "k", int(self.k))
        if not isinstance(self.g, GFunction):
            raise ValueError("g must be a GFunction member")

    def evaluate(self, beta) -> float:
        return projected_penalty(beta, self.k, self.g)


@dataclass(frozen=True)
class ConvexEnvelope:
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise ValueError("k must be a nonnegative integer")
        object.__setattr__(self, "k", int(self.k))

    def evaluate(self, beta) -> float:
        return convex_envelope(beta, self.k)


# ---------------------------------------------------------------------------
# separable specs; each rho() maps a vector of magnitudes to per-entry values


def _check_positive(**kwargs):
    for name, val in kwargs.items():
        if not (val > 0 and math.isfinite(val)):
            raise ValueError(f"{name} must be positive and finite")


@dataclass(frozen=True)
class ClippedLasso:
    """rho(b) = mu * min(gamma*|b|, 1): linear near zero, flat beyond 1/gamma."""

    mu: float
    gamma: float

    def __post_init__(self):
        _check_positive(mu=self.mu, gamma=self.gamma)

    def rho(self, t: np.ndarray) -> np.ndarray:
        return self.mu * np.minimum(self.gamma * t, 1.0)

    def evaluate(self, beta) -> float:
        return float(np.sum(self.rho(np.abs(_as_vector(beta)))))


@dataclass(frozen=True)
class Mcp:
    """Minimax concave penalty, scaled to saturate at mu."""

    mu: float
    gamma: float

    def __post_init__(self):
        _check_positive(mu=self.mu, gamma=self.gamma)

    def rho(self, t: np.ndarray) -> np.ndarray:
        g1 = np.where(t <= 1.0 / self.gamma, 2.0 * self.gamma * t - self.gamma**2 * t * t, 1.0)
        return self.mu * np.minimum(g1, 1.0)

    def evaluate(self, beta) -> float:
        return float(np.sum(self.rho(np.abs(_as_vector(beta)))))


@dataclass(frozen=True)
class Scad:
    """Smoothly clipped absolute deviation, scaled to saturate at mu.

    Requires 2*mu > 3/gamma**2 so the quadratic middle piece is increasing
    on its domain (1/gamma, 2*mu*gamma - 1/gamma].
    """

    mu: float
    gamma: float

    def __post_init__(self):
        _check_positive(mu=self.mu, gamma=self.gamma)
        if not 2.0 * self.mu > 3.0 / self.gamma**2:
            raise ValueError("scad requires 2*mu > 3/gamma**2")

    def rho(self, t: np.ndarray) -> np.ndarray:
        mu, gamma = self.mu, self.gamma
        knee = 1.0 / gamma
        upper = 2.0 * mu * gamma - 1.0 / gamma
        quad = (t * t + (2.0 / gamma - 4.0 * mu * gamma) * t + 1.0 / gamma**2) / (
            4.0 * mu - 4.0 * mu**2 * gamma**2
        )
        g2 = np.where(t <= knee, t / (gamma * mu), np.where(t <= upper, quad, 1.0))
        return mu * np.minimum(g2, 1.0)

    def evaluate(self, beta) -> float:
        return float(np.sum(self.rho(np.abs(_as_vector(beta)))))


@dataclass(frozen=True)
class PowerPenalty:
    """rho(b) = mu * |b|**(1/gamma) with gamma > 1 (concave power)."""

    mu: float
    gamma: float

    def __post_init__(self):
        _check_positive(mu=self.mu)
        if not self.gamma > 1.0:
            raise ValueError("power penalty requires gamma > 1")

    def rho(self, t: np.ndarray) -> np.ndarray:
        return self.mu * t ** (1.0 / self.gamma)

    def evaluate(self, beta) -> float:
        return float(np.sum(self.rho(np.abs(_as_vector(beta)))))


@dataclass(frozen=True)
class LogPenalty:
    """rho(b) = mu * log(gamma*|b| + 1) / log(gamma + 1)."""

    mu: float
    gamma: float

    def __post_init__(self):
        _check_positive(mu=self.mu, gamma=self.gamma)

    def rho(self, t: np.ndarray) -> np.ndarray:
        return self.mu * np.log(self.gamma * t + 1.0) / math.log(self.gamma + 1.0)

    def evaluate(self, beta) -> float:
        return float(np.sum(self.rho(np.abs(_as_vector(beta)))))


@dataclass(frozen=True)
class CompositePenalty:
    """Pointwise minimum of a concave power term and a linear term.

    rho(b) = min(mu * |b|**(1/gamma), lam * |b|).  Near the origin the linear
    branch is active, so the penalty keeps a lasso-like slope there while
    growing sublinearly for large coefficients.
    """

    mu: float
    gamma: float
    lam: float

    def __post_init__(self):
        _check_positive(mu=self.mu, lam=self.lam)
        if not self.gamma > 1.0:
            raise ValueError("composite penalty requires gamma > 1")

    def rho(self, t: np.ndarray) -> np.ndarray:
        return np.minimum(self.mu * t ** (1.0 / self.gamma), self.lam * t)

    def evaluate(self, beta) -> float:
        return float(np.sum(self.rho(np.abs(_as_vector(beta)))))


_SEPARABLE = (ClippedLasso, Mcp, Scad, PowerPenalty, LogPenalty, CompositePenalty)


def separable_penalty(beta, spec) -> float:
    """Evaluate a coordinate-separable penalty spec on a vector."""
    if not isinstance(spec, _SEPARABLE):
        raise ValueError(f"not a separable penalty spec: {spec!r}")
    return spec.evaluate(_as_vector(beta))


# ---------------------------------------------------------------------------
# JSON round trip

_TAGS = {
    TrimmedLasso: "trimmed_lasso",
    WeightedTrimmed: "weighted_trimmed",
    Slope: "slope",
    ProjectedPenalty: "projected",
    ConvexEnvelope: "convex_envelope",
    ClippedLasso: "clipped_lasso",
    Mcp: "mcp",
    Scad: "scad",
    PowerPenalty: "lq",
    LogPenalty: "log",
    CompositePenalty: "composite",
}
_FROM_TAG = {tag: cls for cls, tag in _TAGS.items()}


def penalty_to_json(spec) -> dict:
    """Serialize a penalty spec into a tagged, JSON-ready dict."""
    tag = _TAGS.get(type(spec))
    if tag is None:
        raise ValueError(f"unknown penalty spec type: {type(spec).__name__}")
    d = {"type": tag}
    if isinstance(spec, (TrimmedLasso, ConvexEnvelope)):
        d["k"] = spec.k
    elif isinstance(spec, WeightedTrimmed):
        d["x"] = list(spec.x)
    elif isinstance(spec, Slope):
        d["w"] = list(spec.w)
    elif isinstance(spec, ProjectedPenalty):
        d["k"] = spec.k
        d["g"] = spec.g.value
    elif isinstance(spec, CompositePenalty):
        d["mu"] = spec.mu
        d["gamma"] = spec.gamma
        d["lam"] = spec.lam
    else:
        d["mu"] = spec.mu
        d["gamma"] = spec.gamma
    return d


def penalty_from_json(d: dict):
    """Inverse of :func:`penalty_to_json`."""
    tag = d.get("type")
    cls = _FROM_TAG.get(tag)
    if cls is None:
        raise ValueError(f"unknown penalty tag: {tag!r}")
    if cls in (TrimmedLasso, ConvexEnvelope):
        return cls(k=int(d["k"]))
    if cls is WeightedTrimmed:
        return cls(x=tuple(d["x"]))
    if cls is Slope:
        return cls(w=tuple(d["w"]))
    if cls is ProjectedPenalty:
        return cls(k=int(d["k"]), g=GFunction(d["g"]))
    if cls is CompositePenalty:
        return cls(mu=float(d["mu"]), gamma=float(d["gamma"]), lam=float(d["lam"]))
    return cls(mu=float(d["mu"]), gamma=float(d["gamma"]))
