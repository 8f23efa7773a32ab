"""Command-line experiment harness.

Subcommands:

* ``gen``        write synthetic instances (X.csv, y.csv, meta.json) per seed
* ``solve``      run one solver on one instance, emit solution.json
* ``path``       sweep an ascending lambda grid, emit coefficient paths
* ``gaps``       compare heuristic objectives against the exact solver
* ``clcheck``    objective sequence + clipped-lasso equivalence verdict
* ``export-mio`` write the mixed-integer model text for an instance

Exit codes: 0 success, 2 usage error, 3 solver failure (budget exceeded or
iteration limit); failures also print a JSON error body to stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .exact import (
    BudgetExceeded,
    check_clipped_equivalence,
    exact_solve,
    export_mio,
    objective_sequence,
)
from .heuristics import (
    AdmmConfig,
    AltMinConfig,
    EnvelopeConfig,
    admm_solve,
    alt_min_solve,
    envelope_solve,
    write_trace_csv,
)
from .model import (
    ProblemInstance,
    SolveStatus,
    TrimmedParams,
    exactness_threshold,
    generate_instance,
    load_instance,
    objective,
    save_instance,
    support_size,
)

__all__ = ["ExperimentConfig", "default_lambda_grid", "run_gaps", "run_path", "main", "entry"]

HEURISTIC_SOLVERS = ("altmin", "admm", "envelope")
ALL_SOLVERS = ("exact",) + HEURISTIC_SOLVERS

# relative gaps within this of zero are reported as exactly zero; well inside
# the tolerance the heuristic comparisons are read at
GAP_SNAP = 1e-12


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    """Shared knobs for ``gen`` and ``gaps``; JSON keys match field names."""

    seeds: list = field(default_factory=lambda: list(range(1, 101)))
    n: int = 100
    p: int = 20
    k: int = 2
    snr: float = 10.0
    corr: float = 0.8
    eta: float = 0.01
    lambda_grid: list | None = None
    grid_points: int = 50
    solvers: list = field(default_factory=lambda: list(ALL_SOLVERS))
    budget: int = 10**6

    def __post_init__(self):
        if not self.seeds:
            raise UsageError("at least one seed is required")
        if self.n <= 0 or self.p <= 0:
            raise UsageError("n and p must be positive")
        if not 0 <= self.k <= self.p:
            raise UsageError("k must lie in [0, p]")
        unknown = [s for s in self.solvers if s not in ALL_SOLVERS]
        if unknown:
            raise UsageError(f"unknown solvers: {unknown}; choose from {list(ALL_SOLVERS)}")


def default_lambda_grid(
    inst: ProblemInstance, points: int = 50, lo_frac: float = 1e-3, hi_frac: float = 10.0
) -> np.ndarray:
    """Log-spaced grid spanning [lo_frac, hi_frac] times the exactness threshold."""
    bar = exactness_threshold(inst)
    if bar <= 0:
        raise UsageError("instance has a zero exactness threshold; pass --lambda-grid")
    return np.geomspace(lo_frac * bar, hi_frac * bar, points)


def _run_solver(name, inst, params, warm_start=None, budget=10**6, record_trace=False):
    if name == "exact":
        return exact_solve(inst, params, budget=budget)
    if name == "altmin":
        return alt_min_solve(inst, params, AltMinConfig(start=warm_start))
    if name == "admm":
        return admm_solve(inst, params, AdmmConfig(start=warm_start, record_trace=record_trace))
    if name == "envelope":
        return envelope_solve(
            inst, params, EnvelopeConfig(start=warm_start, record_trace=record_trace)
        )
    raise UsageError(f"unknown solver: {name}")


def run_path(inst, k, eta, grid, solvers, budget=10**6):
    """Sweep an ascending lambda grid; heuristics warm-start from the last fit.

    Yields rows (lam, solver, coord, value, objective, nnz) in deterministic
    order.
    """
    grid = [float(v) for v in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise UsageError("lambda grid must be strictly ascending")
    warm = {s: None for s in solvers}
    rows = []
    for lam in grid:
        params = TrimmedParams(lam=lam, eta=eta, k=k)
        for solver in solvers:
            sol = _run_solver(solver, inst, params, warm_start=warm.get(solver), budget=budget)
            if solver in HEURISTIC_SOLVERS:
                warm[solver] = sol.beta
            obj = objective(inst, params, sol.beta)
            nnz = support_size(sol.beta)
            for coord, value in enumerate(sol.beta):
                rows.append((lam, solver, coord, float(value), obj, nnz))
    return rows


def run_gaps(cfg: ExperimentConfig, out_dir: str | None = None):
    """Gap experiment: heuristic objective vs exact optimum per seed and lambda.

    The grid defaults to the log grid of the first seed's instance and is
    shared across seeds so per-lambda aggregation is well defined.  Returns
    (rows, summary); when ``out_dir`` is given also writes gaps.csv and
    summary.json there.
    """
    solvers = list(cfg.solvers)
    if "exact" not in solvers:
        solvers.insert(0, "exact")
    instances = {
        seed: generate_instance(seed, n=cfg.n, p=cfg.p, snr=cfg.snr, corr=cfg.corr)
        for seed in cfg.seeds
    }
    if cfg.lambda_grid is not None:
        grid = [float(v) for v in cfg.lambda_grid]
    else:
        grid = list(default_lambda_grid(instances[cfg.seeds[0]], points=cfg.grid_points))
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise UsageError("lambda grid must be strictly ascending")

    rows = []
    for seed in cfg.seeds:
        inst = instances[seed]
        warm = {s: None for s in solvers}
        for lam in grid:
            params = TrimmedParams(lam=lam, eta=cfg.eta, k=cfg.k)
            results = {}
            for solver in solvers:
                t0 = time.perf_counter()
                sol = _run_solver(
                    solver, inst, params, warm_start=warm.get(solver), budget=cfg.budget
                )
                wall = time.perf_counter() - t0
                if solver in HEURISTIC_SOLVERS:
                    warm[solver] = sol.beta
                results[solver] = (objective(inst, params, sol.beta), sol, wall)
            f_exact = results["exact"][0]
            for solver in solvers:
                f_s, sol, wall = results[solver]
                gap = (f_s - f_exact) / f_exact
                if abs(gap) <= GAP_SNAP:
                    gap = 0.0
                rows.append(
                    {
                        "seed": seed,
                        "lambda": lam,
                        "solver": solver,
                        "objective": f_s,
                        "gap": gap,
                        "nnz": support_size(sol.beta),
                        "status": sol.status.value,
                        "iterations": sol.iterations,
                        "wall_time_s": wall,
                    }
                )

    summary = []
    for lam in grid:
        for solver in solvers:
            gaps = [
                r["gap"] for r in rows if r["solver"] == solver and r["lambda"] == lam
            ]
            log_mean = float(np.mean(np.log1p(gaps)))
            summary.append(
                {
                    "lambda": lam,
                    "solver": solver,
                    "geomean_gap_pct": 100.0 * math.expm1(log_mean),
                }
            )

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "gaps.csv"), "w") as fh:
            fh.write(
                "# trimlasso gaps v1: seed,lambda,solver,objective,gap,nnz,status,"
                "iterations,wall_time_s\n"
            )
            for r in rows:
                fh.write(
                    f"{r['seed']},{r['lambda']:.17g},{r['solver']},{r['objective']:.17g},"
                    f"{r['gap']:.17g},{r['nnz']},{r['status']},{r['iterations']},"
                    f"{r['wall_time_s']:.17g}\n"
                )
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    return rows, summary


# ---------------------------------------------------------------------------
# argument plumbing


def _seed_list(spec: str):
    """Parse '1,2,5' or '1-25' (inclusive) or a mix of both."""
    seeds = []
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if "-" in chunk[1:]:
            lo, hi = chunk.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        elif chunk:
            seeds.append(int(chunk))
    if not seeds:
        raise UsageError(f"empty seed list: {spec!r}")
    return seeds


def _float_list(spec: str):
    vals = [float(v) for v in spec.split(",") if v.strip()]
    if not vals:
        raise UsageError(f"empty float list: {spec!r}")
    return vals


def _load_config(args) -> ExperimentConfig:
    data = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
    overrides = {
        "seeds": _seed_list(args.seeds) if args.seeds else None,
        "n": args.n,
        "p": args.p,
        "k": getattr(args, "k", None),
        "snr": args.snr,
        "corr": args.corr,
        "eta": getattr(args, "eta", None),
        "lambda_grid": _float_list(args.lambda_grid) if getattr(args, "lambda_grid", None) else None,
        "grid_points": getattr(args, "grid_points", None),
        "solvers": args.solvers.split(",") if getattr(args, "solvers", None) else None,
        "budget": getattr(args, "budget", None),
    }
    for key, val in overrides.items():
        if val is not None:
            data[key] = val
    if "snr" in data and data["snr"] == "inf":
        data["snr"] = math.inf
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**data)


def _load_instance_arg(path: str) -> ProblemInstance:
    if not os.path.isdir(path):
        raise UsageError(f"instance directory not found: {path}")
    inst, _ = load_instance(path)
    return inst


def _interval_json(interval):
    if interval is None:
        return None
    lo, hi = interval
    return [lo, "inf" if math.isinf(hi) else hi]


def cmd_gen(args) -> int:
    cfg = _load_config(args)
    for seed in cfg.seeds:
        inst = generate_instance(seed, n=cfg.n, p=cfg.p, snr=cfg.snr, corr=cfg.corr)
        beta_true = np.zeros(cfg.p)
        beta_true[: min(10, cfg.p)] = 1.0
        meta = {
            "n": cfg.n,
            "p": cfg.p,
            "seed": seed,
            "snr": cfg.snr,
            "corr": cfg.corr,
            "beta_true": beta_true,
        }
        save_instance(inst, os.path.join(args.out, f"seed_{seed:03d}"), meta)
    print(f"wrote {len(cfg.seeds)} instance(s) under {args.out}")
    return 0


def cmd_solve(args) -> int:
    inst = _load_instance_arg(args.instance)
    params = TrimmedParams(lam=args.lam, eta=args.eta, k=args.k)
    record_trace = args.trace is not None
    t0 = time.perf_counter()
    try:
        sol = _run_solver(
            args.solver, inst, params,
            budget=args.budget, record_trace=record_trace,
        )
    except BudgetExceeded as exc:
        print(json.dumps({"error": "budget_exceeded", "required": exc.required,
                          "budget": exc.budget}))
        return 3
    wall = time.perf_counter() - t0
    body = sol.to_dict()
    body.update(
        {
            "solver": args.solver,
            "lam": args.lam,
            "eta": args.eta,
            "k": args.k,
            "wall_time_s": wall,
            "nnz": support_size(sol.beta),
        }
    )
    if args.solver == "exact":
        body["certificate"] = {"subsets_enumerated": sol.iterations}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(body, fh, indent=2)
            fh.write("\n")
    else:
        print(json.dumps(body, indent=2))
    if args.trace:
        if sol.trace is None:
            raise UsageError(f"solver {args.solver} does not produce a trace")
        write_trace_csv(sol, args.trace)
    if sol.status is SolveStatus.ITERATION_LIMIT:
        print(json.dumps({"error": "iteration_limit", "iterations": sol.iterations}))
        return 3
    return 0


def cmd_path(args) -> int:
    inst = _load_instance_arg(args.instance)
    if args.lambda_grid:
        grid = _float_list(args.lambda_grid)
    else:
        grid = list(default_lambda_grid(inst, points=args.grid_points))
    solvers = args.solvers.split(",") if args.solvers else list(ALL_SOLVERS)
    unknown = [s for s in solvers if s not in ALL_SOLVERS]
    if unknown:
        raise UsageError(f"unknown solvers: {unknown}")
    rows = run_path(inst, args.k, args.eta, grid, solvers, budget=args.budget)
    with open(args.out, "w") as fh:
        fh.write("# trimlasso path v1: lambda,solver,coord,value,objective,nnz\n")
        for lam, solver, coord, value, obj, nnz in rows:
            fh.write(f"{lam:.17g},{solver},{coord},{value:.17g},{obj:.17g},{nnz}\n")
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_gaps(args) -> int:
    cfg = _load_config(args)
    try:
        rows, summary = run_gaps(cfg, out_dir=args.out)
    except BudgetExceeded as exc:
        print(json.dumps({"error": "budget_exceeded", "required": exc.required,
                          "budget": exc.budget}))
        return 3
    print(f"wrote gaps.csv and summary.json under {args.out}")
    return 0


def cmd_clcheck(args) -> int:
    inst = _load_instance_arg(args.instance)
    if not 0 <= args.ell <= inst.p:
        raise UsageError(f"--ell must lie in [0, {inst.p}]")
    try:
        seq = objective_sequence(inst, args.lam, args.eta, budget=args.budget)
    except BudgetExceeded as exc:
        print(json.dumps({"error": "budget_exceeded", "required": exc.required,
                          "budget": exc.budget}))
        return 3
    beta_star = seq.argmins[args.ell]
    res = check_clipped_equivalence(seq, args.ell, beta_star)
    if res.equivalent:
        verdict = "equivalent"
    elif res.indeterminate:
        verdict = "indeterminate"
    else:
        verdict = "not_equivalent"
    report = {
        "lam": args.lam,
        "eta": args.eta,
        "ell": args.ell,
        "effective_level": res.effective_level,
        "verdict": verdict,
        "mu_interval": _interval_json(res.mu_interval),
        "witness": list(res.witness) if res.witness else None,
        "objective_sequence": [float(v) for v in seq.values],
        "nnz": [support_size(b) for b in seq.argmins],
    }
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    print(f"verdict: {verdict}")
    return 0


def cmd_export_mio(args) -> int:
    inst = _load_instance_arg(args.instance)
    params = TrimmedParams(lam=args.lam, eta=args.eta, k=args.k)
    text = export_mio(inst, params, big_m=args.big_m)
    with open(args.out, "w") as fh:
        fh.write(text)
    print(f"wrote model to {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trimlasso", description="trimmed-lasso solvers and experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(sp, with_k=True):
        sp.add_argument("--config", help="JSON file with ExperimentConfig fields")
        sp.add_argument("--seeds", help="seed list like '1,2,3' or '1-25'")
        sp.add_argument("--n", type=int)
        sp.add_argument("--p", type=int)
        if with_k:
            sp.add_argument("--k", type=int)
            sp.add_argument("--eta", type=float)
        sp.add_argument("--snr", type=float)
        sp.add_argument("--corr", type=float)

    sp = sub.add_parser("gen", help="write synthetic instances")
    add_config_flags(sp, with_k=False)
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("solve", help="run one solver on one instance")
    sp.add_argument("--instance", required=True, help="directory with X.csv and y.csv")
    sp.add_argument("--solver", required=True, choices=ALL_SOLVERS)
    sp.add_argument("--lam", type=float, required=True)
    sp.add_argument("--eta", type=float, default=0.0)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--budget", type=int, default=10**6)
    sp.add_argument("--out", help="solution JSON path (default: stdout)")
    sp.add_argument("--trace", help="per-iteration trace CSV path")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("path", help="coefficient paths over a lambda grid")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--eta", type=float, default=0.0)
    sp.add_argument("--lambda-grid", dest="lambda_grid", help="ascending comma list")
    sp.add_argument("--grid-points", dest="grid_points", type=int, default=50)
    sp.add_argument("--solvers", help="comma list from exact,altmin,admm,envelope")
    sp.add_argument("--budget", type=int, default=10**6)
    sp.add_argument("--out", required=True, help="path CSV output")
    sp.set_defaults(func=cmd_path)

    sp = sub.add_parser("gaps", help="heuristic-vs-exact objective gaps")
    add_config_flags(sp)
    sp.add_argument("--lambda-grid", dest="lambda_grid", help="ascending comma list")
    sp.add_argument("--grid-points", dest="grid_points", type=int)
    sp.add_argument("--solvers", help="comma list from exact,altmin,admm,envelope")
    sp.add_argument("--budget", type=int)
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_gaps)

    sp = sub.add_parser("clcheck", help="clipped-lasso equivalence report")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--lam", type=float, required=True)
    sp.add_argument("--eta", type=float, default=0.0)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--budget", type=int, default=10**6)
    sp.add_argument("--out", required=True, help="report JSON path")
    sp.set_defaults(func=cmd_clcheck)

    sp = sub.add_parser("export-mio", help="write mixed-integer model text")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--lam", type=float, required=True)
    sp.add_argument("--eta", type=float, default=0.0)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--big-m", dest="big_m", type=float, default=20.0)
    sp.add_argument("--out", required=True, help="model text path")
    sp.set_defaults(func=cmd_export_mio)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
