import json

import numpy as np
import pytest

from trimlasso import ProblemInstance, save_instance
from trimlasso.cli import ExperimentConfig, UsageError, default_lambda_grid, main
from trimlasso.exact import assignment_from_beta, parse_mio


@pytest.fixture
def square_dir(tmp_path, small_square):
    d = tmp_path / "inst"
    save_instance(small_square, str(d))
    return str(d)


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


class TestGen:
    def test_deterministic_files(self, tmp_path):
        args = ["gen", "--seeds", "1", "--n", "10", "--p", "4", "--out"]
        d1, d2 = tmp_path / "a", tmp_path / "b"
        assert main(args + [str(d1)]) == 0
        assert main(args + [str(d2)]) == 0
        for name in ("X.csv", "y.csv", "meta.json"):
            b1 = (d1 / "seed_001" / name).read_bytes()
            assert b1 == (d2 / "seed_001" / name).read_bytes()
        meta = read_json(d1 / "seed_001" / "meta.json")
        assert meta["n"] == 10 and meta["p"] == 4 and meta["seed"] == 1

    def test_seed_range(self, tmp_path):
        out = tmp_path / "multi"
        assert main(["gen", "--seeds", "2-4", "--n", "8", "--p", "3", "--out", str(out)]) == 0
        assert sorted(d.name for d in out.iterdir()) == ["seed_002", "seed_003", "seed_004"]

    def test_shape_matches_flags(self, tmp_path):
        out = tmp_path / "g"
        assert main(["gen", "--seeds", "1", "--n", "6", "--p", "5", "--out", str(out)]) == 0
        rows = (out / "seed_001" / "X.csv").read_text().strip().splitlines()
        assert len(rows) == 6
        assert all(len(r.split(",")) == 5 for r in rows)

    def test_zero_p_usage_error(self, tmp_path):
        assert main(["gen", "--seeds", "1", "--p", "0", "--out", str(tmp_path / "x")]) == 2


class TestSolve:
    def test_exact_square_solution(self, square_dir, tmp_path):
        out = tmp_path / "sol.json"
        rc = main([
            "solve", "--instance", square_dir, "--solver", "exact",
            "--lam", "0.5", "--k", "1", "--out", str(out),
        ])
        assert rc == 0
        body = read_json(out)
        assert body["objective"] == pytest.approx(0.75, abs=1e-8)
        assert body["beta"] == pytest.approx([1.5, 1.0], abs=1e-8)
        assert body["status"] == "exact"
        assert body["nnz"] == 2
        assert body["certificate"]["subsets_enumerated"] == 2

    def test_lam_zero_solver_agreement(self, square_dir, tmp_path):
        objs = {}
        for solver in ("exact", "altmin", "admm", "envelope"):
            out = tmp_path / f"{solver}.json"
            rc = main([
                "solve", "--instance", square_dir, "--solver", solver,
                "--lam", "0", "--eta", "0.05", "--k", "1", "--out", str(out),
            ])
            assert rc == 0
            objs[solver] = read_json(out)["objective"]
        assert max(objs.values()) - min(objs.values()) <= 1e-6

    def test_altmin_gap_nonnegative(self, square_dir, tmp_path):
        vals = {}
        for solver in ("exact", "altmin"):
            out = tmp_path / f"{solver}.json"
            assert main([
                "solve", "--instance", square_dir, "--solver", solver,
                "--lam", "0.5", "--k", "1", "--out", str(out),
            ]) == 0
            vals[solver] = read_json(out)["objective"]
        assert vals["altmin"] >= vals["exact"] - 1e-9

    def test_budget_exceeded_exit_code(self, square_dir, capsys):
        rc = main([
            "solve", "--instance", square_dir, "--solver", "exact",
            "--lam", "0.5", "--k", "1", "--budget", "1",
        ])
        assert rc == 3
        body = json.loads(capsys.readouterr().out)
        assert body["error"] == "budget_exceeded"
        assert body["required"] == 2
        assert body["budget"] == 1

    def test_trace_file(self, square_dir, tmp_path):
        trace = tmp_path / "trace.csv"
        assert main([
            "solve", "--instance", square_dir, "--solver", "altmin",
            "--lam", "0.5", "--k", "1", "--out", str(tmp_path / "s.json"),
            "--trace", str(trace),
        ]) == 0
        assert trace.read_text().startswith("# trimlasso trace v1:")

    def test_trace_unsupported_for_exact(self, square_dir, tmp_path):
        rc = main([
            "solve", "--instance", square_dir, "--solver", "exact",
            "--lam", "0.5", "--k", "1", "--out", str(tmp_path / "s.json"),
            "--trace", str(tmp_path / "t.csv"),
        ])
        assert rc == 2

    def test_missing_instance_dir(self, tmp_path):
        rc = main([
            "solve", "--instance", str(tmp_path / "nope"), "--solver", "exact",
            "--lam", "1", "--k", "1",
        ])
        assert rc == 2


def read_path_rows(path):
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "# trimlasso path v1: lambda,solver,coord,value,objective,nnz"
    rows = []
    for line in lines[1:]:
        lam, solver, coord, value, obj, nnz = line.split(",")
        rows.append((float(lam), solver, int(coord), float(value), float(obj), int(nnz)))
    return rows


class TestPath:
    def test_rows_and_exact_sparsity(self, square_dir, tmp_path):
        out = tmp_path / "path.csv"
        rc = main([
            "path", "--instance", square_dir, "--k", "1",
            "--lambda-grid", "0.1,0.5,2,5", "--solvers", "exact,altmin",
            "--out", str(out),
        ])
        assert rc == 0
        rows = read_path_rows(out)
        assert len(rows) == 4 * 2 * 2
        # above the exactness threshold sqrt(10) the exact fit is 1-sparse
        assert all(r[5] <= 1 for r in rows if r[1] == "exact" and r[0] > np.sqrt(10.0))

    def test_single_point_matches_solve(self, square_dir, tmp_path):
        out = tmp_path / "path.csv"
        assert main([
            "path", "--instance", square_dir, "--k", "1",
            "--lambda-grid", "0.5", "--solvers", "exact", "--out", str(out),
        ]) == 0
        rows = read_path_rows(out)
        assert [r[3] for r in rows] == pytest.approx([1.5, 1.0], abs=1e-8)
        assert rows[0][4] == pytest.approx(0.75, abs=1e-8)

    def test_k_equals_p_constant_in_lam(self, square_dir, tmp_path):
        out = tmp_path / "path.csv"
        assert main([
            "path", "--instance", square_dir, "--k", "2", "--eta", "0.05",
            "--lambda-grid", "0.5,1,2", "--solvers", "exact", "--out", str(out),
        ]) == 0
        rows = read_path_rows(out)
        by_coord = {c: [r[3] for r in rows if r[2] == c] for c in (0, 1)}
        for vals in by_coord.values():
            assert np.ptp(vals) <= 1e-8
        assert np.ptp([r[4] for r in rows]) <= 1e-8

    def test_descending_grid_rejected(self, square_dir, tmp_path):
        rc = main([
            "path", "--instance", square_dir, "--k", "1",
            "--lambda-grid", "2,1", "--out", str(tmp_path / "p.csv"),
        ])
        assert rc == 2

    def test_unknown_solver_rejected(self, square_dir, tmp_path):
        rc = main([
            "path", "--instance", square_dir, "--k", "1",
            "--lambda-grid", "1", "--solvers", "bogus", "--out", str(tmp_path / "p.csv"),
        ])
        assert rc == 2


def read_gap_rows(path):
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("# trimlasso gaps v1:")
    rows = []
    for line in lines[1:]:
        seed, lam, solver, obj, gap, nnz, status, iters, wall = line.split(",")
        rows.append({
            "seed": int(seed), "lambda": float(lam), "solver": solver,
            "objective": float(obj), "gap": float(gap), "nnz": int(nnz),
            "status": status, "iterations": int(iters), "wall": float(wall),
        })
    return rows


class TestGaps:
    def test_smoke_properties(self, tmp_path):
        out = tmp_path / "gaps"
        rc = main([
            "gaps", "--seeds", "1,2", "--n", "12", "--p", "5", "--k", "1",
            "--grid-points", "4", "--out", str(out),
        ])
        assert rc == 0
        rows = read_gap_rows(out / "gaps.csv")
        assert len(rows) == 2 * 4 * 4
        assert all(r["gap"] == 0.0 for r in rows if r["solver"] == "exact")
        assert all(r["gap"] >= -1e-7 for r in rows)
        summary = read_json(out / "summary.json")
        assert len(summary) == 4 * 4
        for entry in summary:
            assert set(entry) == {"lambda", "solver", "geomean_gap_pct"}
        assert all(
            e["geomean_gap_pct"] == 0.0 for e in summary if e["solver"] == "exact"
        )

    def test_rerun_identical_up_to_timing(self, tmp_path):
        args = [
            "gaps", "--seeds", "5", "--n", "10", "--p", "4", "--k", "1",
            "--grid-points", "3", "--out",
        ]
        d1, d2 = tmp_path / "r1", tmp_path / "r2"
        assert main(args + [str(d1)]) == 0
        assert main(args + [str(d2)]) == 0

        def payload(d):
            lines = (d / "gaps.csv").read_text().strip().splitlines()
            return [line.rsplit(",", 1)[0] for line in lines]

        assert payload(d1) == payload(d2)
        assert (d1 / "summary.json").read_bytes() == (d2 / "summary.json").read_bytes()

    def test_config_file_with_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"seeds": [3], "n": 10, "p": 4, "k": 1, "grid_points": 3}))
        out = tmp_path / "out"
        assert main(["gaps", "--config", str(cfg), "--solvers", "exact,altmin",
                     "--out", str(out)]) == 0
        rows = read_gap_rows(out / "gaps.csv")
        assert {r["seed"] for r in rows} == {3}
        assert {r["solver"] for r in rows} == {"exact", "altmin"}

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"seeds": [1], "bogus": 1}))
        assert main(["gaps", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2

    def test_unknown_solver(self, tmp_path):
        rc = main([
            "gaps", "--seeds", "1", "--n", "8", "--p", "3", "--k", "1",
            "--solvers", "exact,bogus", "--out", str(tmp_path / "o"),
        ])
        assert rc == 2


class TestClcheck:
    def test_square_not_equivalent(self, square_dir, tmp_path, capsys):
        out = tmp_path / "report.json"
        rc = main([
            "clcheck", "--instance", square_dir, "--lam", "0.5", "--ell", "1",
            "--out", str(out),
        ])
        assert rc == 0
        assert "verdict: not_equivalent" in capsys.readouterr().out
        report = read_json(out)
        assert report["verdict"] == "not_equivalent"
        assert report["witness"] == [0, 1, 2]
        assert report["effective_level"] == 1
        assert report["mu_interval"] is None
        assert report["objective_sequence"] == pytest.approx([0.975, 0.75, 0.0], abs=1e-8)

    def test_zero_lam_flat_sequence_indeterminate(self, square_dir, tmp_path):
        out = tmp_path / "report.json"
        rc = main([
            "clcheck", "--instance", square_dir, "--lam", "0", "--eta", "0.1",
            "--ell", "1", "--out", str(out),
        ])
        assert rc == 0
        assert read_json(out)["verdict"] == "indeterminate"

    def test_orthogonal_design_equivalent(self, tmp_path):
        d = tmp_path / "ortho"
        save_instance(ProblemInstance(X=np.eye(2), y=np.array([3.0, 1.0])), str(d))
        out = tmp_path / "report.json"
        rc = main([
            "clcheck", "--instance", str(d), "--lam", "1", "--ell", "1",
            "--out", str(out),
        ])
        assert rc == 0
        report = read_json(out)
        assert report["verdict"] == "equivalent"
        lo, hi = report["mu_interval"]
        assert lo == pytest.approx(0.5, abs=1e-8)
        assert hi == pytest.approx(2.5, abs=1e-8)

    def test_ell_out_of_range(self, square_dir, tmp_path):
        rc = main([
            "clcheck", "--instance", square_dir, "--lam", "1", "--ell", "9",
            "--out", str(tmp_path / "r.json"),
        ])
        assert rc == 2

    def test_budget_exit_code(self, square_dir, tmp_path, capsys):
        rc = main([
            "clcheck", "--instance", square_dir, "--lam", "1", "--ell", "1",
            "--budget", "3", "--out", str(tmp_path / "r.json"),
        ])
        assert rc == 3
        assert json.loads(capsys.readouterr().out)["error"] == "budget_exceeded"


class TestExportMio:
    def test_round_trip(self, square_dir, tmp_path):
        out = tmp_path / "model.txt"
        rc = main([
            "export-mio", "--instance", square_dir, "--lam", "0.5", "--k", "1",
            "--out", str(out),
        ])
        assert rc == 0
        text = out.read_text()
        assert text.splitlines()[0] == "# trimlasso mixed-integer model v1"
        model = parse_mio(text)
        asn = assignment_from_beta(np.array([1.5, 1.0]), 1)
        assert model.feasible(asn)
        assert model.objective_value(asn) == pytest.approx(0.75, abs=1e-8)

    def test_big_m_flag(self, square_dir, tmp_path):
        out = tmp_path / "model.txt"
        assert main([
            "export-mio", "--instance", square_dir, "--lam", "0.5", "--k", "1",
            "--big-m", "7", "--out", str(out),
        ]) == 0
        assert "bigM=7" in out.read_text().splitlines()[1]


class TestConfigObjects:
    def test_default_grid_endpoints(self, small_square):
        grid = default_lambda_grid(small_square, points=5)
        bar = np.sqrt(10.0)
        assert len(grid) == 5
        assert grid[0] == pytest.approx(1e-3 * bar, rel=1e-12)
        assert grid[-1] == pytest.approx(10.0 * bar, rel=1e-12)
        assert np.all(np.diff(grid) > 0)

    def test_zero_threshold_rejected(self):
        inst = ProblemInstance(X=np.eye(2), y=np.zeros(2))
        with pytest.raises(UsageError):
            default_lambda_grid(inst)

    def test_experiment_config_validation(self):
        with pytest.raises(UsageError):
            ExperimentConfig(seeds=[])
        with pytest.raises(UsageError):
            ExperimentConfig(k=30, p=20)
        with pytest.raises(UsageError):
            ExperimentConfig(solvers=["bogus"])

    def test_no_subcommand_is_usage_error(self):
        assert main([]) == 2
