"""When does the clipped-lasso penalty reproduce a trimmed solution?

The answer is a discrete-convexity property of the objective-by-sparsity-level
sequence: equivalence at level ell holds exactly when the sequence is strictly
convex there, and the certificate is an open interval of valid scale
parameters.  One instance below fails the test (with a violating index
triple), one passes (with the interval).

Run with:  python3 demos/clipped_equivalence.py
"""

import numpy as np

from trimlasso import (
    ProblemInstance,
    check_clipped_equivalence,
    clipped_lasso_exact,
    objective_sequence,
)


def show(name, inst, lam, ell):
    seq = objective_sequence(inst, lam=lam)
    res = check_clipped_equivalence(seq, ell, seq.argmins[ell])
    print(f"{name}: objective by level = "
          f"{[round(float(v), 6) for v in seq.values]}")
    if res.equivalent:
        lo, hi = res.mu_interval
        hi_s = "inf" if np.isinf(hi) else f"{hi:.4f}"
        print(f"  equivalent at level {res.effective_level}: any scale in "
              f"({lo:.4f}, {hi_s}) works")
    elif res.indeterminate:
        print("  verdict indeterminate: a chord is flat to within tolerance")
    else:
        i, e, j = res.witness
        print(f"  NOT equivalent at level {e}: value at {e} sits above the "
              f"chord from level {i} to level {j}")
    return seq, res


square = ProblemInstance(
    X=np.array([[1.0, -1.0], [-1.0, 2.0]]), y=np.array([1.0, 1.0])
)
seq, res = show("worked 2x2, lam = 1/2", square, lam=0.5, ell=1)

# since equivalence fails, every clipped problem with matching product of
# parameters finds something strictly better than the trimmed minimizer
sol = clipped_lasso_exact(square, mu=0.5, gamma=1.0)
print(f"  clipped optimum {np.round(sol.beta, 4).tolist()} at value "
      f"{sol.objective:.4f} (trimmed minimizer would cost 1.25 there)\n")

ortho = ProblemInstance(X=np.eye(2), y=np.array([3.0, 1.0]))
show("orthogonal 2x2, lam = 1", ortho, lam=1.0, ell=1)
sol = clipped_lasso_exact(ortho, mu=1.0, gamma=1.0)
print(f"  with the scale inside the interval the clipped optimum "
      f"{np.round(sol.beta, 4).tolist()} is the trimmed solution")
