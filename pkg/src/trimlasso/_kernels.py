"""Hot numerical loops, compiled with numba.

Everything here works on the Gram formulation: for a quadratic
0.5*b'Ab - b'beta plus separable terms, coordinate updates touch only one
column of A, so a full sweep costs O(p^2) regardless of n.
"""

import numpy as np
from numba import njit

# status codes shared with the python wrappers
CD_CONVERGED = 0
CD_SWEEP_LIMIT = 1
CD_UNBOUNDED = 2

# curvature at or below this is treated as an exactly zero column
_ZERO_CURV = 1e-300


@njit(cache=True)
def cd_weighted_lasso(A, b, w, beta, max_sweeps, tol):
    """Cyclic coordinate descent on 0.5*beta'A beta - b'beta + sum w|beta|.

    Updates ``beta`` in place.  Returns (sweeps, kkt_residual, status).
    ``A`` must be symmetric positive semidefinite with nonnegative diagonal.
    """
    p = beta.shape[0]
    Ab = A @ beta
    sweeps = 0
    kkt = np.inf
    status = CD_SWEEP_LIMIT
    while sweeps < max_sweeps:
        for j in range(p):
            aj = A[j, j]
            rho = b[j] - Ab[j] + aj * beta[j]
            if aj <= _ZERO_CURV:
                # flat direction: only feasible stationary value is zero,
                # and a tilt that beats the weight makes the problem unbounded
                if abs(rho) > w[j]:
                    return sweeps, np.inf, CD_UNBOUNDED
                new = 0.0
            else:
                z = abs(rho) - w[j]
                if z > 0.0:
                    new = np.sign(rho) * z / aj
                else:
                    new = 0.0
            if new != beta[j]:
                d = new - beta[j]
                for t in range(p):
                    Ab[t] += A[t, j] * d
                beta[j] = new
        sweeps += 1
        kkt = 0.0
        for j in range(p):
            g = Ab[j] - b[j]
            if beta[j] != 0.0:
                r = abs(g + w[j] * np.sign(beta[j]))
            else:
                r = abs(g) - w[j]
                if r < 0.0:
                    r = 0.0
            if r > kkt:
                kkt = r
        if kkt <= tol:
            status = CD_CONVERGED
            break
    return sweeps, kkt, status


@njit(cache=True)
def envelope_subgradient(Q, q, const, eta, lam, k, beta, max_iter, step_scale, trace):
    """Subgradient descent on the convex envelope relaxation.

    Objective: 0.5*beta'Q beta - q'beta + const + eta*||beta||_1
               + lam*max(||beta||_1 - k, 0).

    Steps are step_scale/sqrt(t); the best iterate seen is kept.  ``beta`` is
    the starting point and is left untouched.  Returns (best point, its
    objective, iteration at which it was last improved).  When ``trace`` has
    length >= max_iter + 1 the objective of each iterate is recorded into it.
    """
    p = beta.shape[0]
    x = beta.copy()
    record = trace.shape[0] >= max_iter + 1

    def _obj(v):
        quad = 0.5 * v @ (Q @ v) - q @ v + const
        l1 = 0.0
        for i in range(p):
            l1 += abs(v[i])
        hinge = l1 - k
        if hinge < 0.0:
            hinge = 0.0
        return quad + eta * l1 + lam * hinge

    best = x.copy()
    best_obj = _obj(x)
    t_best = 0
    if record:
        trace[0] = best_obj
    for t in range(1, max_iter + 1):
        l1 = 0.0
        for i in range(p):
            l1 += abs(x[i])
        weight = eta
        if l1 > k:
            weight += lam
        g = Q @ x - q
        for i in range(p):
            if x[i] > 0.0:
                g[i] += weight
            elif x[i] < 0.0:
                g[i] -= weight
        step = step_scale / np.sqrt(t)
        for i in range(p):
            x[i] -= step * g[i]
        val = _obj(x)
        if record:
            trace[t] = val
        if val < best_obj:
            best_obj = val
            best[:] = x
            t_best = t
    return best, best_obj, t_best
