import json

import numpy as np
import pytest
from scipy.optimize import linprog

from trimlasso.penalties import (
    ClippedLasso,
    CompositePenalty,
    ConvexEnvelope,
    GFunction,
    LogPenalty,
    Mcp,
    PowerPenalty,
    ProjectedPenalty,
    Scad,
    Slope,
    TrimmedLasso,
    WeightedTrimmed,
    convex_envelope,
    penalty_from_json,
    penalty_to_json,
    projected_penalty,
    separable_penalty,
    slope,
    trimmed_lasso,
    weighted_trimmed,
)

from _reference import relaxation_by_sorting, trimmed_lasso_bruteforce


def test_trimmed_lasso_values():
    assert trimmed_lasso(np.array([1.5, 1.0]), 1) == pytest.approx(1.0)
    assert trimmed_lasso(np.array([1.0, -2.0, 3.0]), 0) == pytest.approx(6.0)
    assert trimmed_lasso(np.array([4.0, -5.0, 6.0]), 3) == 0.0


def test_trimmed_lasso_zero_iff_sparse():
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = int(rng.integers(1, 8))
        k = int(rng.integers(0, p + 1))
        b = rng.normal(size=p)
        b[rng.random(p) < 0.5] = 0.0
        assert (trimmed_lasso(b, k) == 0.0) == (np.count_nonzero(b) <= k)
        g = GFunction.HALF_SQUARE
        assert (projected_penalty(b, k, g) == 0.0) == (np.count_nonzero(b) <= k)


def test_weighted_trimmed_recovers_trimmed():
    rng = np.random.default_rng(3)
    for _ in range(25):
        p = int(rng.integers(1, 9))
        k = int(rng.integers(0, p + 1))
        b = rng.normal(size=p)
        x = np.concatenate([np.zeros(k), np.ones(p - k)])
        assert weighted_trimmed(b, x) == pytest.approx(trimmed_lasso(b, k), abs=1e-12)


def test_weighted_trimmed_two_level_weights():
    # k leading weights tau - lam, the rest tau
    b = np.array([1.5, 1.0])
    x = np.array([0.5, 1.0])
    assert weighted_trimmed(b, x) == pytest.approx(1.75)
    assert weighted_trimmed(np.zeros(4), np.arange(4.0)) == 0.0


def test_weighted_trimmed_rejects_unsorted():
    with pytest.raises(ValueError):
        weighted_trimmed(np.ones(2), np.array([1.0, 0.5]))


def test_slope_values():
    assert slope(np.array([1.0, -2.0, 3.0]), np.array([3.0, 2.0, 1.0])) == pytest.approx(14.0)
    assert slope(np.zeros(3), np.array([2.0, 1.0, 0.0])) == 0.0
    with pytest.raises(ValueError):
        slope(np.ones(2), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        slope(np.ones(2), np.array([0.0, 0.0]))


def test_slope_complement_identity():
    """0/1 sorted weights split the l1 norm into head and trimmed tail."""
    rng = np.random.default_rng(4)
    for _ in range(50):
        p = int(rng.integers(1, 9))
        k = int(rng.integers(1, p + 1))
        b = rng.normal(size=p) * rng.choice([1, 10, 100])
        w = np.concatenate([np.ones(k), np.zeros(p - k)])
        total = slope(b, w) + trimmed_lasso(b, k)
        assert total == pytest.approx(np.sum(np.abs(b)), abs=1e-12)


def test_trimmed_lasso_matches_bruteforce_subsets():
    rng = np.random.default_rng(5)
    for _ in range(60):
        p = int(rng.integers(1, 9))
        k = int(rng.integers(0, p + 1))
        b = rng.normal(size=p)
        assert trimmed_lasso(b, k) == pytest.approx(trimmed_lasso_bruteforce(b, k), abs=1e-12)


def test_relaxation_tightness_by_sorting():
    rng = np.random.default_rng(6)
    for _ in range(60):
        p = int(rng.integers(1, 9))
        k = int(rng.integers(0, p + 1))
        b = rng.normal(size=p)
        assert trimmed_lasso(b, k) == pytest.approx(relaxation_by_sorting(b, k), abs=1e-12)


def test_relaxation_tightness_by_lp():
    # independent cross-check of the continuous relaxation with an LP solver
    rng = np.random.default_rng(7)
    for _ in range(10):
        p = int(rng.integers(2, 8))
        k = int(rng.integers(0, p + 1))
        b = rng.normal(size=p)
        res = linprog(
            c=np.abs(b),
            A_eq=np.ones((1, p)),
            b_eq=[p - k],
            bounds=[(0.0, 1.0)] * p,
            method="highs",
        )
        assert res.success
        assert res.fun == pytest.approx(trimmed_lasso(b, k), abs=1e-7)


def test_separable_table_values():
    assert separable_penalty(np.array([0.5, 2.0]), ClippedLasso(mu=1.0, gamma=1.0)) == pytest.approx(1.5)
    assert separable_penalty(np.array([0.5]), Mcp(mu=1.0, gamma=1.0)) == pytest.approx(0.75)
    assert separable_penalty(np.array([4.0]), PowerPenalty(mu=1.0, gamma=2.0)) == pytest.approx(2.0)
    assert separable_penalty(np.array([1.0]), LogPenalty(mu=1.0, gamma=1.0)) == pytest.approx(1.0)


def test_separable_rejects_non_separable():
    with pytest.raises(ValueError):
        separable_penalty(np.ones(2), TrimmedLasso(k=1))


def test_mcp_saturates_beyond_knee():
    # the quadratic branch would decrease past 1/gamma; the penalty must
    # stay flat at mu instead
    spec = Mcp(mu=2.0, gamma=4.0)
    ts = np.linspace(0.0, 2.0, 400)
    vals = spec.rho(ts)
    assert np.all(np.diff(vals) >= -1e-12)
    assert vals[-1] == pytest.approx(2.0)
    assert spec.rho(np.array([10.0]))[0] == pytest.approx(2.0)


def test_scad_guard_and_shape():
    with pytest.raises(ValueError):
        Scad(mu=1.0, gamma=1.0)
    spec = Scad(mu=2.0, gamma=1.5)
    ts = np.linspace(0.0, 3 * (2 * spec.mu * spec.gamma), 2000)
    vals = spec.rho(ts)
    assert vals[0] == 0.0
    assert np.all(np.diff(vals) >= -1e-10)
    assert np.max(np.abs(np.diff(vals))) < 0.05  # no jump: continuous pieces
    assert vals[-1] == pytest.approx(spec.mu)


def test_projected_penalty_values():
    rng = np.random.default_rng(8)
    b = rng.normal(size=6)
    assert projected_penalty(b, 2, GFunction.ABSOLUTE_VALUE) == pytest.approx(trimmed_lasso(b, 2))
    assert projected_penalty(np.array([3.0, 1.0, 2.0]), 1, GFunction.HALF_SQUARE) == pytest.approx(2.5)
    assert projected_penalty(b, 6, GFunction.HALF_SQUARE) == 0.0


def test_convex_envelope_values():
    assert convex_envelope(np.array([0.5, 0.5]), 1) == 0.0
    assert convex_envelope(np.array([1.0, 1.0]), 1) == pytest.approx(1.0)
    assert convex_envelope(np.zeros(3), 2) == 0.0


def test_composite_rho_values():
    spec = CompositePenalty(mu=1.0, gamma=2.0, lam=1.0)
    assert spec.evaluate(np.array([0.0])) == 0.0
    assert spec.evaluate(np.array([4.0])) == pytest.approx(2.0)
    assert spec.evaluate(np.array([0.25])) == pytest.approx(0.25)


def test_clipped_min_over_level_identity():
    """The clipped penalty equals a minimum of shifted trimmed penalties."""
    rng = np.random.default_rng(9)
    for _ in range(60):
        p = int(rng.integers(1, 9))
        gamma = float(rng.uniform(0.2, 3.0))
        mu = float(rng.uniform(0.5, 2.0))
        b = rng.normal(size=p) * rng.choice([0.1, 1, 10])
        clipped = ClippedLasso(mu=mu, gamma=gamma).evaluate(b)
        by_level = min(
            mu * ell + mu * gamma * trimmed_lasso(b, ell) for ell in range(p + 1)
        )
        assert clipped == pytest.approx(by_level, abs=1e-12)


def test_penalty_symmetries():
    rng = np.random.default_rng(10)
    specs = [
        TrimmedLasso(k=2),
        WeightedTrimmed(x=(0.0, 0.5, 1.0, 1.0, 2.0)),
        Slope(w=(3.0, 2.0, 1.0, 0.5, 0.0)),
        ProjectedPenalty(k=1, g=GFunction.HALF_SQUARE),
        ConvexEnvelope(k=2),
        ClippedLasso(mu=1.2, gamma=0.7),
        Mcp(mu=1.0, gamma=2.0),
        Scad(mu=3.0, gamma=1.0),
        PowerPenalty(mu=1.0, gamma=3.0),
        LogPenalty(mu=2.0, gamma=5.0),
        CompositePenalty(mu=1.0, gamma=2.0, lam=0.5),
    ]
    for spec in specs:
        for _ in range(10):
            b = rng.normal(size=5)
            flipped = b * rng.choice([-1.0, 1.0], size=5)
            perm = rng.permutation(5)
            assert spec.evaluate(flipped) == pytest.approx(spec.evaluate(b), rel=1e-12)
            assert spec.evaluate(b[perm]) == pytest.approx(spec.evaluate(b), rel=1e-12)


def test_json_round_trip():
    specs = [
        TrimmedLasso(k=3),
        WeightedTrimmed(x=(0.0, 1.0, 2.0)),
        Slope(w=(2.0, 1.0)),
        ProjectedPenalty(k=2, g=GFunction.ABSOLUTE_VALUE),
        ConvexEnvelope(k=1),
        ClippedLasso(mu=0.5, gamma=2.0),
        Mcp(mu=1.5, gamma=0.5),
        Scad(mu=2.0, gamma=2.0),
        PowerPenalty(mu=1.0, gamma=1.5),
        LogPenalty(mu=0.1, gamma=9.0),
        CompositePenalty(mu=1.0, gamma=4.0, lam=2.0),
    ]
    for spec in specs:
        blob = json.dumps(penalty_to_json(spec))
        back = penalty_from_json(json.loads(blob))
        assert back == spec
    with pytest.raises(ValueError):
        penalty_from_json({"type": "nope"})
