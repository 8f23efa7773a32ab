import json

import numpy as np
import pytest

from trimlasso import (
    ProblemInstance,
    TrimmedParams,
    exactness_threshold,
    generate_instance,
    load_instance,
    objective,
    save_instance,
    sorted_abs,
    support_size,
)


def test_sorted_abs_basic():
    sm = sorted_abs(np.array([1.0, -2.0, 3.0]))
    assert np.allclose(sm.values, [3, 2, 1])
    assert list(sm.permutation) == [2, 1, 0]


def test_sorted_abs_tie_breaks_by_index():
    sm = sorted_abs(np.array([0.0, 0.0]))
    assert np.allclose(sm.values, [0, 0])
    assert list(sm.permutation) == [0, 1]


def test_sorted_abs_example_point():
    sm = sorted_abs(np.array([1.5, 1.0]))
    assert np.allclose(sm.values, [1.5, 1.0])


def test_sorted_abs_sign_invariant():
    rng = np.random.default_rng(0)
    for _ in range(20):
        b = rng.normal(size=7)
        flips = rng.choice([-1.0, 1.0], size=7)
        assert np.allclose(sorted_abs(b).values, sorted_abs(b * flips).values)
        # idempotent under re-sorting
        assert np.allclose(sorted_abs(sorted_abs(b).values).values, sorted_abs(b).values)


def test_objective_worked_example(small_square):
    params = TrimmedParams(lam=0.5, eta=0.0, k=1)
    assert objective(small_square, params, np.array([1.5, 1.0])) == pytest.approx(0.75, abs=1e-12)


def test_objective_at_zero(small_square):
    params = TrimmedParams(lam=2.0, eta=3.0, k=1)
    assert objective(small_square, params, np.zeros(2)) == pytest.approx(
        0.5 * float(small_square.y @ small_square.y)
    )


def test_objective_exact_fit(small_square):
    params = TrimmedParams(lam=0.5, eta=0.0, k=2)
    assert objective(small_square, params, np.array([3.0, 2.0])) == pytest.approx(0.0, abs=1e-12)


def test_objective_reduces_to_least_squares():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(6, 4))
    y = rng.normal(size=6)
    inst = ProblemInstance(X=X, y=y)
    params = TrimmedParams(lam=0.0, eta=0.0, k=2)
    for _ in range(10):
        b = rng.normal(size=4)
        r = y - X @ b
        assert objective(inst, params, b) == pytest.approx(0.5 * float(r @ r))


def test_objective_dimension_mismatch(small_square):
    with pytest.raises(ValueError):
        objective(small_square, TrimmedParams(lam=1.0, eta=0.0, k=1), np.zeros(3))


def test_exactness_threshold_small_square(small_square):
    assert exactness_threshold(small_square) == pytest.approx(np.sqrt(10.0), abs=1e-12)


def test_exactness_threshold_degenerate():
    X = np.array([[1.0, 2.0]])
    assert exactness_threshold(ProblemInstance(X=X, y=np.array([0.0]))) == 0.0
    Z = np.zeros((2, 2))
    assert exactness_threshold(ProblemInstance(X=Z, y=np.array([1.0, 1.0]))) == 0.0


def test_params_validation():
    with pytest.raises(ValueError):
        TrimmedParams(lam=-1.0, eta=0.0, k=0)
    with pytest.raises(ValueError):
        TrimmedParams(lam=0.0, eta=-0.1, k=0)
    with pytest.raises(ValueError):
        TrimmedParams(lam=0.0, eta=0.0, k=-1)


def test_instance_validation():
    with pytest.raises(ValueError):
        ProblemInstance(X=np.array([[np.inf, 0.0]]), y=np.array([1.0]))
    with pytest.raises(ValueError):
        ProblemInstance(X=np.ones((2, 2)), y=np.ones(3))


class TestGenerateInstance:
    def test_shape_and_default_signal(self):
        inst = generate_instance(seed=1, n=100, p=20, snr=10.0, corr=0.8)
        assert inst.n == 100 and inst.p == 20
        assert inst.X.shape == (100, 20)

    def test_determinism(self):
        a = generate_instance(seed=7, n=40, p=6)
        b = generate_instance(seed=7, n=40, p=6)
        assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)
        c = generate_instance(seed=8, n=40, p=6)
        assert not np.array_equal(a.y, c.y)

    def test_noiseless_limit(self):
        beta = np.array([1.0, 0.0, -2.0])
        inst = generate_instance(seed=3, n=25, p=3, snr=np.inf, beta_true=beta)
        assert np.allclose(inst.y, inst.X @ beta)

    def test_empirical_covariance(self):
        # rows should follow the AR(1) covariance corr^|i-j|
        corr = 0.8
        inst = generate_instance(seed=11, n=10**4, p=5, corr=corr, beta_true=np.zeros(5))
        emp = inst.X.T @ inst.X / inst.n
        target = corr ** np.abs(np.subtract.outer(np.arange(5), np.arange(5)))
        assert np.max(np.abs(emp - target)) < 0.05


def test_save_load_round_trip(tmp_path):
    inst = generate_instance(seed=5, n=12, p=4, snr=5.0, corr=0.3)
    save_instance(inst, tmp_path, meta={"seed": 5, "snr": 5.0, "corr": 0.3})
    back, meta = load_instance(tmp_path)
    assert np.array_equal(back.X, inst.X)
    assert np.array_equal(back.y, inst.y)
    assert meta["n"] == 12 and meta["p"] == 4 and meta["seed"] == 5
    on_disk = json.loads((tmp_path / "meta.json").read_text())
    assert on_disk == meta


def test_support_size_snapping():
    assert support_size(np.array([1.0, 1e-9, 0.0])) == 1
    assert support_size(np.array([1.0, 1e-7])) == 2
