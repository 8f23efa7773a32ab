"""Tour of the penalty family on one small coefficient vector.

Run with:  python3 demos/penalty_tour.py
"""

import numpy as np

from trimlasso import (
    ClippedLasso,
    LogPenalty,
    Mcp,
    PowerPenalty,
    Scad,
    convex_envelope,
    penalty_from_json,
    penalty_to_json,
    slope,
    trimmed_lasso,
    weighted_trimmed,
)

beta = np.array([3.0, -1.5, 0.6, 0.0, -0.2])
k = 2

print(f"beta = {beta.tolist()},  target sparsity k = {k}\n")

print("trimmed penalty: sum of the p-k smallest magnitudes")
for level in range(len(beta) + 1):
    print(f"  k={level}:  {trimmed_lasso(beta, level):.4f}")
print(f"  zero exactly when beta is k-sparse: T_2 = {trimmed_lasso(beta, 2):.4f} "
      f"(0.6 + 0.2 survive), T_3 = {trimmed_lasso(beta, 3):.4f}")

# the trimmed penalty is the complement of a sorted-L1 (top-k) penalty
w = np.zeros(len(beta))
w[:k] = 1.0
print("\nsplit against the sorted-L1 penalty with 0/1 weights:")
print(f"  ||beta||_1                    = {np.sum(np.abs(beta)):.4f}")
print(f"  top-{k} sum + trimmed remainder = "
      f"{slope(beta, w) + trimmed_lasso(beta, k):.4f}")

print("\nweighted generalization (weights sorted ascending, zeros drop terms):")
x = np.array([0.0, 0.0, 0.5, 1.0, 1.0])
print(f"  weights {x.tolist()} -> {weighted_trimmed(beta, x):.4f}")

# the convex envelope is taken over the unit max-norm box, where it reduces
# to a hinge on ||beta||_1; the minorant property needs ||beta||_inf <= 1
box = beta / np.max(np.abs(beta))
print("\nconvex envelope (hinge on ||.||_1) vs trimmed value inside the unit box:")
for level in (1, 2, 4):
    print(f"  k={level}:  {convex_envelope(box, level):.4f} "
          f"<= {trimmed_lasso(box, level):.4f}")

print("\nseparable cousins evaluated at the same point:")
for spec in (
    ClippedLasso(mu=0.5, gamma=1.0),
    Mcp(mu=0.5, gamma=1.0),
    Scad(mu=0.9, gamma=2.0),
    PowerPenalty(mu=0.5, gamma=2.0),
    LogPenalty(mu=0.5, gamma=1.0),
):
    blob = penalty_to_json(spec)
    again = penalty_from_json(blob)
    print(f"  {spec!r:40s} -> {spec.evaluate(beta):8.4f}   (json tag {blob['type']!r}, "
          f"round trip {'ok' if again == spec else 'FAILED'})")

# clipped penalty as a minimum over sparsity levels of trimmed penalties
mu, gamma = 0.5, 1.0
by_level = min(ell + gamma * trimmed_lasso(beta, ell) for ell in range(len(beta) + 1))
print(f"\nclipped value {ClippedLasso(mu=mu, gamma=gamma).evaluate(beta):.4f} equals "
      f"mu * min over levels of (level + gamma * trimmed) = {mu * by_level:.4f}")
