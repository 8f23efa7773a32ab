"""Exact solvers by support enumeration, equivalence checks, and MIO export.

For fixed k the trimmed-lasso objective equals the minimum over all keep-sets
S of size k of a weighted lasso that charges ``eta`` on S and ``eta + lam``
off S.  Enumerating the C(p, k) keep-sets therefore yields a certified global
optimum at desk scale.  This module also hosts the discrete-convexity test
linking the trimmed problem to the clipped lasso, a text export of the
mixed-integer formulation, and exact solvers for two penalty variants used in
cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _kernels
from .model import (
    ProblemInstance,
    Solution,
    SolveStatus,
    TrimmedParams,
    objective,
    support_size,
)
from .penalties import ClippedLasso
from .subproblems import ridge_residual_operator

__all__ = [
    "BudgetExceeded",
    "exact_solve",
    "ObjectiveSequence",
    "objective_sequence",
    "ClippedEquivalence",
    "check_clipped_equivalence",
    "clipped_lasso_exact",
    "verify_scaling_identity",
    "split_decomposition",
    "trimmed_ridge_exact",
    "export_mio",
    "parse_mio",
    "MioModel",
    "assignment_from_beta",
]

_INNER_TOL = 1e-10
_INNER_SWEEPS = 10000


class BudgetExceeded(Exception):
    """Raised when an enumeration would exceed the caller's subset budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"enumeration needs {required} subset solves, budget is {budget}")


def _check_budget(required: int, budget: int):
    if required > budget:
        raise BudgetExceeded(required, budget)


def exact_solve(inst: ProblemInstance, params: TrimmedParams, budget: int = 10**6) -> Solution:
    """Globally minimize the trimmed-lasso objective by keep-set enumeration.

    Every size-k keep-set gets a coordinate-descent solve of the matching
    weighted lasso (warm-started from the previous keep-set); the best value
    wins, with ties resolved in favor of the first keep-set in lexicographic
    order.  ``iterations`` on the result counts enumerated keep-sets, which
    doubles as the optimality certificate.
    """
    p = inst.p
    if params.k > p:
        raise ValueError("k exceeds dimension p")
    total = math.comb(p, params.k)
    _check_budget(total, budget)
    Q = np.ascontiguousarray(inst.X.T @ inst.X)
    xty = np.ascontiguousarray(inst.X.T @ inst.y)
    ynorm2 = float(inst.y @ inst.y)
    heavy = params.eta + params.lam

    beta = np.zeros(p)
    best_val = np.inf
    best_beta = np.zeros(p)
    for keep in combinations(range(p), params.k):
        w = np.full(p, heavy)
        for j in keep:
            w[j] = params.eta
        _, _, code = _kernels.cd_weighted_lasso(Q, xty, w, beta, _INNER_SWEEPS, _INNER_TOL)
        if code == _kernels.CD_UNBOUNDED:
            raise ValueError("subset problem unbounded: zero column with zero weight")
        val = (
            0.5 * float(beta @ (Q @ beta)) - float(xty @ beta) + 0.5 * ynorm2
            + float(w @ np.abs(beta))
        )
        if val < best_val:
            best_val = val
            best_beta[:] = beta
    return Solution(
        beta=best_beta,
        objective=objective(inst, params, best_beta),
        status=SolveStatus.EXACT,
        iterations=total,
    )


@dataclass(frozen=True)
class ObjectiveSequence:
    """Optimal objective values across every sparsity level k = 0..p."""

    lam: float
    eta: float
    values: np.ndarray
    argmins: tuple

    def write_csv(self, path: str):
        with open(path, "w") as fh:
            fh.write("# trimlasso objective-sequence v1: k,objective,nnz\n")
            for k, val in enumerate(self.values):
                fh.write(f"{k},{val:.17g},{support_size(self.argmins[k])}\n")


def objective_sequence(
    inst: ProblemInstance, lam: float, eta: float = 0.0, budget: int = 10**6
) -> ObjectiveSequence:
    """Run :func:`exact_solve` at every level k from 0 to p.

    The returned values are nonincreasing in k; the last entry is the plain
    lasso optimum at weight ``eta``.  Requires 2**p within ``budget``.
    """
    p = inst.p
    _check_budget(2**p, budget)
    values = np.empty(p + 1)
    argmins = []
    for k in range(p + 1):
        sol = exact_solve(inst, TrimmedParams(lam=lam, eta=eta, k=k), budget=budget)
        values[k] = sol.objective
        argmins.append(sol.beta)
    return ObjectiveSequence(lam=lam, eta=eta, values=values, argmins=tuple(argmins))


@dataclass(frozen=True)
class ClippedEquivalence:
    """Outcome of the discrete-convexity test at a given level.

    ``equivalent`` means some clipped-lasso parameter pair reproduces the
    trimmed solution; ``mu_interval`` then holds the open interval of valid
    scale parameters (upper bound may be inf).  ``witness`` is a violating
    index triple (i, level, j) when the test fails decisively.  Knife-edge
    sequences where no strict verdict is safe set ``indeterminate``.
    """

    equivalent: bool
    indeterminate: bool
    effective_level: int
    mu_interval: tuple | None
    witness: tuple | None


def check_clipped_equivalence(
    seq: ObjectiveSequence, ell: int, beta_star, slack: float = 1e-7
) -> ClippedEquivalence:
    """Decide clipped-lasso equivalence at level ell via discrete convexity.

    The effective level is min(ell, nnz of ``beta_star``).  Equivalence holds
    exactly when the objective sequence is strictly convex at that level:
    every chord over it stays strictly above.  Chord gaps within ``slack`` of
    zero make the verdict indeterminate.
    """
    z = np.asarray(seq.values, dtype=float)
    p = z.shape[0] - 1
    if not 0 <= ell <= p:
        raise ValueError("ell must lie in [0, p]")
    ell_e = min(ell, support_size(beta_star))
    worst = -np.inf
    witness = None
    borderline = False
    for i in range(ell_e):
        for j in range(ell_e + 1, p + 1):
            chord = ((j - ell_e) * z[i] + (ell_e - i) * z[j]) / (j - i)
            v = z[ell_e] - chord
            if v >= slack:
                if v > worst:
                    worst = v
                    witness = (i, ell_e, j)
            elif v > -slack:
                borderline = True
    if witness is not None:
        return ClippedEquivalence(False, False, ell_e, None, witness)
    if borderline:
        return ClippedEquivalence(False, True, ell_e, None, None)
    lower = 0.0
    for j in range(ell_e + 1, p + 1):
        lower = max(lower, (z[ell_e] - z[j]) / (j - ell_e))
    upper = math.inf
    for i in range(ell_e):
        upper = min(upper, (z[i] - z[ell_e]) / (ell_e - i))
    return ClippedEquivalence(True, False, ell_e, (lower, upper), None)


def clipped_lasso_exact(
    inst: ProblemInstance, mu: float, gamma: float, budget: int = 10**6
) -> Solution:
    """Globally minimize squared loss plus the clipped-lasso penalty.

    Uses the reduction of the clipped penalty to a minimum over levels of
    trimmed problems at weight mu*gamma plus a per-level charge of mu, each
    solved exactly.  Needs 2**p enumerations within ``budget``.
    """
    pen = ClippedLasso(mu=mu, gamma=gamma)
    p = inst.p
    _check_budget(2**p, budget)
    lam = mu * gamma
    best_val = np.inf
    best_beta = None
    for ell in range(p + 1):
        sol = exact_solve(inst, TrimmedParams(lam=lam, eta=0.0, k=ell), budget=budget)
        val = sol.objective + mu * ell
        if val < best_val:
            best_val = val
            best_beta = sol.beta
    r = inst.y - inst.X @ best_beta
    return Solution(
        beta=best_beta,
        objective=0.5 * float(r @ r) + pen.evaluate(best_beta),
        status=SolveStatus.EXACT,
        iterations=2**p,
    )


def verify_scaling_identity(
    inst: ProblemInstance, params: TrimmedParams, beta_star, tol: float = 1e-8
) -> bool:
    """Check that the optimal value equals (||y||^2 - ||X beta*||^2) / 2.

    This identity holds at any optimum of the trimmed-lasso objective because
    scaling the optimum must be stationary at one; it is a cheap consistency
    certificate for candidate optima.
    """
    beta_star = np.asarray(beta_star, dtype=float)
    claimed = 0.5 * (float(inst.y @ inst.y) - float(np.sum((inst.X @ beta_star) ** 2)))
    actual = objective(inst, params, beta_star)
    return abs(claimed - actual) <= tol * max(1.0, abs(actual))


def split_decomposition(inst: ProblemInstance, lam: float, k: int, budget: int = 10**6):
    """Optimal split of the fit into a k-sparse part and an L1-charged part.

    Solves  min over (phi, eps) of 0.5*||y - X(phi + eps)||^2 + lam*||eps||_1
    with ||phi||_0 <= k, by enumerating the support of phi and eliminating
    phi analytically on each support.  Returns ``(phi, eps)`` with disjoint
    supports (overlapping mass is shifted into phi, which never hurts the
    objective).
    """
    p = inst.p
    if not 0 <= k <= p:
        raise ValueError("k must lie in [0, p]")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    Q = np.ascontiguousarray(inst.X.T @ inst.X)
    xty = np.ascontiguousarray(inst.X.T @ inst.y)

    def _objective(phi, eps):
        r = inst.y - inst.X @ (phi + eps)
        return 0.5 * float(r @ r) + lam * float(np.sum(np.abs(eps)))

    if lam == 0.0:
        # any least-squares fit works; put it all in eps and leave phi empty
        eps = np.zeros(p)
        _kernels.cd_weighted_lasso(Q, xty, np.zeros(p), eps, _INNER_SWEEPS, _INNER_TOL)
        return np.zeros(p), eps

    total = math.comb(p, k)
    _check_budget(total, budget)
    best = (np.inf, np.zeros(p), np.zeros(p))
    for keep in combinations(range(p), k):
        S = list(keep)
        # eliminate phi: with phi_S optimal for given eps, the residual sees
        # only the projection away from the span of the kept columns
        Qs = Q[np.ix_(S, S)]
        pinv = np.linalg.pinv(Qs) if S else None
        if S:
            cross = Q[:, S] @ pinv
            A = Q - cross @ Q[S, :]
            b = xty - cross @ xty[S]
            A[S, :] = 0.0
            A[:, S] = 0.0
            b[S] = 0.0
            A = np.ascontiguousarray(0.5 * (A + A.T))
        else:
            A, b = Q, xty.copy()
        eps = np.zeros(p)
        _, _, code = _kernels.cd_weighted_lasso(
            A, np.ascontiguousarray(b), np.full(p, lam), eps, _INNER_SWEEPS, _INNER_TOL
        )
        if code == _kernels.CD_UNBOUNDED:
            raise ValueError("split subproblem unbounded")
        phi = np.zeros(p)
        if S:
            phi[S] = pinv @ (xty[S] - (Q @ eps)[S])
        # disjointness cleanup: overlap moves into phi at equal fit
        overlap = (phi != 0.0) & (eps != 0.0)
        phi[overlap] += eps[overlap]
        eps[overlap] = 0.0
        val = _objective(phi, eps)
        if val < best[0]:
            best = (val, phi, eps)
    return best[1], best[2]


def trimmed_ridge_exact(inst: ProblemInstance, lam: float, k: int, budget: int = 10**6):
    """Exact minimum of squared loss plus half-square trimmed penalty.

    Solves  min_beta 0.5*||y - X beta||^2 + lam * sum over the p - k smallest
    of beta_i^2 / 2  by enumerating which k coordinates go unpenalized and
    eliminating the penalized ones in closed form (ridge residual operator).
    Returns ``(phi, value)`` where phi is the unpenalized part on the winning
    support.
    """
    p = inst.p
    if not 0 <= k <= p:
        raise ValueError("k must lie in [0, p]")
    if not lam > 0:
        raise ValueError("lam must be positive")
    A = ridge_residual_operator(inst.X, lam)
    W = A @ A
    y = inst.y
    total = math.comb(p, k)
    _check_budget(total, budget)
    best_val = np.inf
    best_phi = np.zeros(p)
    for keep in combinations(range(p), k):
        S = list(keep)
        if S:
            Xs = inst.X[:, S]
            G = Xs.T @ W @ Xs
            rhs = Xs.T @ (W @ y)
            phi_s, *_ = np.linalg.lstsq(G, rhs, rcond=None)
            r = y - Xs @ phi_s
        else:
            phi_s, r = None, y
        val = 0.5 * float(r @ (W @ r))
        if val < best_val:
            best_val = val
            best_phi = np.zeros(p)
            if S:
                best_phi[S] = phi_s
    return best_phi, best_val


# ---------------------------------------------------------------------------
# mixed-integer model text format
#
# The emitted file has four sections.  OBJECTIVE holds one CONST line, LIN
# lines (coefficient on one variable) and QUAD lines (coefficient on a
# product of two variables, each unordered pair written once).  BOUNDS holds
# simple lower bounds "var >= value".  CONSTRAINTS holds one linear
# constraint per line as "name: c1*v1 c2*v2 ... op rhs" with op one of
# <=, >=, =.  BINARIES lists variables restricted to {0, 1}.  Variables are
# declared implicitly in order b1..bp, z1..zp, a1..ap, t1..tp.


def export_mio(inst: ProblemInstance, params: TrimmedParams, big_m: float = 20.0) -> str:
    """Emit the big-M mixed-integer formulation as model text.

    Variables: coefficients b_i, trim indicators z_i (z_i = 1 means i is
    penalized), trimmed magnitudes a_i >= |b_i| - M*(1 - z_i), and L1
    magnitudes t_i >= |b_i|.  The objective is the quadratic loss plus
    eta*sum(t) + lam*sum(a); exactly p - k indicators are on.  Valid whenever
    every optimal |b_i| is at most ``big_m``.
    """
    p = inst.p
    if params.k > p:
        raise ValueError("k exceeds dimension p")
    if not big_m > 0:
        raise ValueError("big_m must be positive")
    Q = inst.X.T @ inst.X
    xty = inst.X.T @ inst.y
    M = big_m
    lines = ["# trimlasso mixed-integer model v1"]
    lines.append(f"# p={p} k={params.k} lam={params.lam:.17g} eta={params.eta:.17g} bigM={M:.17g}")
    lines.append("OBJECTIVE")
    lines.append(f"CONST {0.5 * float(inst.y @ inst.y):.17g}")
    for i in range(p):
        lines.append(f"LIN b{i + 1} {-xty[i]:.17g}")
    for i in range(p):
        lines.append(f"LIN a{i + 1} {params.lam:.17g}")
    for i in range(p):
        lines.append(f"LIN t{i + 1} {params.eta:.17g}")
    for i in range(p):
        for j in range(i, p):
            coeff = 0.5 * Q[i, i] if i == j else Q[i, j]
            lines.append(f"QUAD b{i + 1} b{j + 1} {coeff:.17g}")
    lines.append("BOUNDS")
    for i in range(p):
        lines.append(f"a{i + 1} >= 0")
    for i in range(p):
        lines.append(f"t{i + 1} >= 0")
    lines.append("CONSTRAINTS")
    zsum = " ".join(f"1*z{i + 1}" for i in range(p))
    lines.append(f"zsum: {zsum} = {p - params.k}")
    for i in range(p):
        lines.append(f"apos{i + 1}: 1*a{i + 1} -1*b{i + 1} {-M:.17g}*z{i + 1} >= {-M:.17g}")
        lines.append(f"aneg{i + 1}: 1*a{i + 1} 1*b{i + 1} {-M:.17g}*z{i + 1} >= {-M:.17g}")
    for i in range(p):
        lines.append(f"tpos{i + 1}: 1*t{i + 1} -1*b{i + 1} >= 0")
        lines.append(f"tneg{i + 1}: 1*t{i + 1} 1*b{i + 1} >= 0")
    lines.append("BINARIES")
    lines.append(" ".join(f"z{i + 1}" for i in range(p)))
    lines.append("END")
    return "\n".join(lines) + "\n"


@dataclass
class MioModel:
    """Parsed form of the model text emitted by :func:`export_mio`."""

    const: float
    lin: dict
    quad: dict
    bounds: dict
    constraints: list
    binaries: set

    def objective_value(self, assignment: dict) -> float:
        val = self.const
        for var, c in self.lin.items():
            val += c * assignment[var]
        for (u, v), c in self.quad.items():
            val += c * assignment[u] * assignment[v]
        return val

    def violations(self, assignment: dict, tol: float = 1e-9) -> list:
        """Names of violated constraints, bounds, and binary conditions."""
        bad = []
        for name, terms, op, rhs in self.constraints:
            lhs = sum(c * assignment[v] for v, c in terms.items())
            if op == "<=" and lhs > rhs + tol:
                bad.append(name)
            elif op == ">=" and lhs < rhs - tol:
                bad.append(name)
            elif op == "=" and abs(lhs - rhs) > tol:
                bad.append(name)
        for var, lo in self.bounds.items():
            if assignment[var] < lo - tol:
                bad.append(f"bound:{var}")
        for var in self.binaries:
            x = assignment[var]
            if min(abs(x), abs(x - 1.0)) > tol:
                bad.append(f"binary:{var}")
        return bad

    def feasible(self, assignment: dict, tol: float = 1e-9) -> bool:
        return not self.violations(assignment, tol)


def parse_mio(text: str) -> MioModel:
    """Parse model text produced by :func:`export_mio`."""
    const = 0.0
    lin: dict = {}
    quad: dict = {}
    bounds: dict = {}
    constraints: list = []
    binaries: set = set()
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("OBJECTIVE", "BOUNDS", "CONSTRAINTS", "BINARIES", "END"):
            section = line
            continue
        if section == "OBJECTIVE":
            parts = line.split()
            if parts[0] == "CONST":
                const += float(parts[1])
            elif parts[0] == "LIN":
                lin[parts[1]] = lin.get(parts[1], 0.0) + float(parts[2])
            elif parts[0] == "QUAD":
                key = (parts[1], parts[2])
                quad[key] = quad.get(key, 0.0) + float(parts[3])
            else:
                raise ValueError(f"bad objective line: {raw!r}")
        elif section == "BOUNDS":
            var, op, val = line.split()
            if op != ">=":
                raise ValueError(f"bad bound line: {raw!r}")
            bounds[var] = float(val)
        elif section == "CONSTRAINTS":
            name, rest = line.split(":", 1)
            tokens = rest.split()
            op_idx = next(i for i, t in enumerate(tokens) if t in ("<=", ">=", "="))
            terms: dict = {}
            for tok in tokens[:op_idx]:
                c, var = tok.split("*")
                terms[var] = terms.get(var, 0.0) + float(c)
            constraints.append((name.strip(), terms, tokens[op_idx], float(tokens[op_idx + 1])))
        elif section == "BINARIES":
            binaries.update(line.split())
        else:
            raise ValueError(f"content outside any section: {raw!r}")
    return MioModel(
        const=const, lin=lin, quad=quad, bounds=bounds, constraints=constraints, binaries=binaries
    )


def assignment_from_beta(beta, k: int) -> dict:
    """Feasible model assignment matching a coefficient vector.

    Indicators mark the p - k trimmed coordinates (ties at the k-th magnitude
    keep the lower index untrimmed), magnitudes fill a and t accordingly.
    """
    beta = np.asarray(beta, dtype=float)
    p = beta.shape[0]
    if not 0 <= k <= p:
        raise ValueError("k must lie in [0, p]")
    keep = set(np.argsort(-np.abs(beta), kind="stable")[:k].tolist())
    assignment = {}
    for i in range(p):
        z = 0.0 if i in keep else 1.0
        assignment[f"b{i + 1}"] = float(beta[i])
        assignment[f"z{i + 1}"] = z
        assignment[f"a{i + 1}"] = abs(float(beta[i])) * z
        assignment[f"t{i + 1}"] = abs(float(beta[i]))
    return assignment
