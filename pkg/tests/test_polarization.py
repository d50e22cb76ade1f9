"""Maximin solver: exact laws, oracle agreement, determinism."""

import math

import numpy as np
import pytest

import rieszpol as rp
from rieszpol import geometry, polarization
from rieszpol.polarization import (
    equally_spaced_value,
    oracle_solve,
    softmin_surrogate,
    solve,
)


def test_equally_spaced_value_quadratic_law():
    # s = 2 on the unit circle: exactly n^2/4 for every n
    for n in range(1, 65):
        assert equally_spaced_value(n, 2.0) == pytest.approx(n * n / 4.0, rel=1e-12), n


def test_equally_spaced_value_scales_by_radius_power():
    v1 = equally_spaced_value(6, 1.0, radius=1.0)
    v3 = equally_spaced_value(6, 1.0, radius=3.0)
    assert v3 == pytest.approx(v1 / 3.0, rel=1e-12)


def test_solver_attains_circle_law_small_n():
    for n in (2, 3):
        rep = solve(rp.circle(), n, s=2.0, seed=42, restarts=8)
        assert rep.value == pytest.approx(n * n / 4.0, rel=1e-9), n
        assert rep.converged


def test_solver_collapse_on_ball_low_s():
    # s <= d - 2 on the ball: all points at the center, value exactly n
    rep = solve(rp.ball(3), 2, s=1.0, seed=7, restarts=4)
    assert rep.value == pytest.approx(2.0, abs=1e-9)
    assert np.linalg.norm(rep.config) < 1e-9


def test_oracle_single_point_examples():
    c = rp.circle()
    grid = geometry.sample(c, 12)
    assert oracle_solve(c, 1, 1.0, grid).value == pytest.approx(0.5, rel=1e-12)
    assert oracle_solve(c, 1, 2.0, grid).value == pytest.approx(0.25, rel=1e-12)


def test_oracle_two_point_example():
    c = rp.circle()
    grid = geometry.sample(c, 12)
    rep = oracle_solve(c, 2, 2.0, grid)
    assert rep.value == pytest.approx(1.0, rel=1e-12)


def test_oracle_counts_duplicates_per_copy():
    c = rp.circle()
    grid = geometry.sample(c, 4)
    rep = oracle_solve(c, 2, 2.0, grid)
    # best pair on a 4-node grid is antipodal, not duplicated
    assert not np.allclose(rep.config[0], rep.config[1])


def test_oracle_rejects_oversized_instances():
    c = rp.circle()
    with pytest.raises(ValueError, match="grid"):
        oracle_solve(c, 2, 1.0, geometry.sample(c, 128))
    with pytest.raises(ValueError, match="n"):
        oracle_solve(c, 5, 1.0, geometry.sample(c, 12))


def test_grid_restricted_solver_matches_oracle_exactly():
    c = rp.circle()
    for gsize in (12, 24):
        grid = geometry.sample(c, gsize)
        for n in (1, 2, 3):
            for s in (1.0, 2.0):
                want = oracle_solve(c, n, s, grid)
                got = solve(c, n, s=s, seed=0, restarts=4, grid=grid)
                assert got.value == want.value, (gsize, n, s)
                assert got.grid_restricted


def test_softmin_gradient_matches_finite_differences():
    rng = np.random.default_rng(8)
    s2 = rp.sphere(2)
    X = geometry.random_points(s2, 4, rng)
    Y = geometry.sample(s2, 256)
    s, t = 2.0, 5.0
    F, G = softmin_surrogate(X, Y, s, t)
    h = 1e-6
    for i in range(4):
        for k in range(3):
            d = np.zeros_like(X)
            d[i, k] = h
            fp = softmin_surrogate(X + d, Y, s, t, want_grad=False)
            fm = softmin_surrogate(X - d, Y, s, t, want_grad=False)
            assert G[i, k] == pytest.approx((fp - fm) / (2 * h), rel=1e-4, abs=1e-8)


def test_softmin_value_lower_bounds_the_true_minimum():
    rng = np.random.default_rng(4)
    c = rp.circle()
    X = geometry.random_points(c, 3, rng)
    Y = geometry.sample(c, 512)
    from rieszpol.potentials import potential_grid

    exact = potential_grid(Y, X, 2.0).min()
    for t in (1.0, 10.0, 100.0):
        assert softmin_surrogate(X, Y, 2.0, t, want_grad=False) <= exact + 1e-9


def test_solve_scaling_equivariance():
    base = solve(rp.circle(), 4, s=2.0, seed=3, restarts=2)
    big = solve(rp.scaled(rp.circle(), 2.0), 4, s=2.0, seed=3, restarts=2)
    assert big.value == base.value * 2.0**-2.0


def test_warm_start_never_loses_ground():
    c = rp.sphere(2)
    first = solve(c, 12, s=2.0, seed=9, restarts=2)
    again = solve(c, 12, s=2.0, seed=10, restarts=1, init=first.config)
    assert again.value >= first.value - 1e-12


def test_solve_reports_are_reproducible():
    a = solve(rp.circle(), 5, s=2.0, seed=21, restarts=4)
    b = solve(rp.circle(), 5, s=2.0, seed=21, restarts=4)
    assert a.value == b.value
    assert np.array_equal(a.config, b.config)
    assert a.restart_values == b.restart_values


def test_solve_is_thread_count_invariant(monkeypatch):
    monkeypatch.setenv("RIESZPOL_THREADS", "1")
    a = solve(rp.circle(), 5, s=2.0, seed=21, restarts=4)
    monkeypatch.setenv("RIESZPOL_THREADS", "4")
    b = solve(rp.circle(), 5, s=2.0, seed=21, restarts=4)
    assert a.value == b.value
    assert np.array_equal(a.config, b.config)
    assert a.restart_values == b.restart_values


def test_restart_values_track_the_best():
    rep = solve(rp.circle(), 4, s=2.0, seed=1, restarts=4)
    assert len(rep.restart_values) == 4
    assert max(rep.restart_values) == rep.value


def test_witness_realizes_the_value():
    from rieszpol.potentials import Configuration, potential

    rep = solve(rp.sphere(2), 6, s=2.0, seed=2, restarts=2)
    cfg = Configuration(rep.config, rep.home, validate=False)
    at_witness = potential(rep.witness, cfg, 2.0).value
    assert at_witness == pytest.approx(rep.value, rel=1e-9)
    assert geometry.contains(rep.home, rep.witness, tol=1e-9)


def test_solve_rejects_bad_arguments():
    with pytest.raises(ValueError):
        solve(rp.circle(), 0, s=1.0)
    with pytest.raises(ValueError):
        solve(rp.circle(), 2, s=1.0, restarts=0)
    with pytest.raises(ValueError, match="strategy"):
        solve(rp.circle(), 2, s=1.0, strategy="gradient_descent")


def test_alternate_strategies_reach_the_small_circle_law():
    for strategy in ("exchange", "anneal"):
        rep = solve(rp.circle(), 2, s=2.0, seed=5, restarts=2, strategy=strategy)
        assert rep.value >= 0.99 * 1.0, strategy


def test_default_s_is_the_intrinsic_dimension():
    rep = solve(rp.circle(), 2, seed=0, restarts=2)
    assert rep.s == 1.0
