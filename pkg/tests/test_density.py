"""Covering density, singular-kernel integrals, cell counting."""

import math

import numpy as np
import pytest

import rieszpol as rp
from rieszpol import density, geometry
from rieszpol.density import (
    alpha,
    alpha_exact,
    alpha_limit_check,
    empirical_counts,
    equidistribution_report,
    lemma_bound_check,
    lemma_bound_suite,
    riesz_integral,
)
from rieszpol.potentials import Configuration


def circle_points(n, phase=0.0, radius=1.0):
    th = phase + 2 * math.pi * np.arange(n) / n
    return radius * np.column_stack([np.cos(th), np.sin(th)])


def test_alpha_exact_circle_closed_form():
    # worst ratio of arc measure to 2r on a circle: 2 arcsin(r/2) / r at r = eps
    for eps in (1.0, 0.5, 0.1, 0.01):
        want = 2.0 * math.asin(eps / 2.0) / eps
        assert alpha_exact(rp.circle(), eps) == pytest.approx(want, rel=1e-12), eps
    assert alpha_exact(rp.circle(), 1.0) == pytest.approx(math.pi / 3.0, rel=1e-12)


def test_alpha_exact_circle_frozen_schedule():
    vals = [alpha_exact(rp.circle(), e) for e in (0.5, 0.1, 0.01)]
    assert vals == pytest.approx(
        [1.0107210205683146, 1.0004171361154002, 1.0000041667135424], rel=1e-13)


def test_alpha_exact_sphere_is_one():
    # caps have area exactly pi r^2, so every ratio is 1
    for eps in (1.0, 0.3):
        assert alpha_exact(rp.sphere(2), eps) == pytest.approx(1.0, rel=1e-12)


def test_alpha_exact_nondecreasing_in_eps():
    vals = [alpha_exact(rp.circle(), e) for e in (0.01, 0.1, 0.5, 1.0, 1.9)]
    for a, b in zip(vals, vals[1:]):
        assert b >= a - 1e-12


def test_alpha_grid_estimate_lower_bounds_the_supremum():
    for eps in (0.5, 0.1):
        est = alpha(rp.circle(), eps, x_samples=48, r_samples=48)
        exact = alpha_exact(rp.circle(), eps)
        assert est.value <= exact + 1e-12
        assert est.value == pytest.approx(exact, abs=1e-3)


def test_alpha_estimate_records_argmax():
    est = alpha(rp.circle(), 0.5, x_samples=16, r_samples=16)
    assert 0 < est.argmax_r <= 0.5
    assert geometry.contains(rp.circle(), est.argmax_x, tol=1e-9)


def test_alpha_schedule_ends_near_one_for_catalog(catalog):
    for name, desc in catalog:
        out = alpha_limit_check(desc, schedule=(0.5, 0.1, 0.01), x_samples=32,
                                r_samples=32)
        assert out["passes"], (name, out["values"])
        assert out["values"][-1] <= 1.02, name


def test_tangent_circles_need_the_intersection_exclusion():
    tangent = rp.union(
        rp.placed(rp.circle(), offset=(-1.0, 0.0)),
        rp.placed(rp.circle(), offset=(1.0, 0.0)),
    )
    # at the touch point both branches contribute: density doubles
    raw = alpha(tangent, 0.2, x_points=[np.zeros(2)], r_samples=32)
    assert raw.value > 1.5
    out = alpha_limit_check(tangent, schedule=(0.5, 0.1, 0.01), x_samples=32,
                            r_samples=32)
    assert out["passes"]
    assert out["excluded_points"]
    assert out["values"][-1] <= 1.02


def test_riesz_integral_full_circle_closed_form():
    # integral of |x-y|^-1 over the circle minus a chord-R ball around y
    c = rp.circle()
    y = geometry.project(c, (1.0, 0.0))
    for R in (0.25, 0.5, 1.0):
        theta = 2.0 * math.asin(R / 2.0)
        want = -2.0 * math.log(math.tan(theta / 4.0))
        assert riesz_integral(c, y, R) == pytest.approx(want, rel=1e-6), R


def test_riesz_integral_sphere_closed_form():
    s2 = rp.sphere(2)
    y = geometry.project(s2, (0.0, 0.0, 1.0))
    for R in (0.3, 1.0, 1.5):
        want = 2.0 * math.pi * math.log(2.0 / R)
        assert riesz_integral(s2, y, R) == pytest.approx(want, rel=1e-6), R
    assert riesz_integral(s2, y, 2.0) == pytest.approx(0.0, abs=1e-9)


def test_riesz_integral_cap_centered_closed_form():
    s2 = rp.sphere(2)
    north = np.array([0.0, 0.0, 1.0])
    beta = 1.0
    cap = geometry._cap_cell(s2, north, beta, "cap")
    R = 0.2
    want = 2.0 * math.pi * (math.log(math.sin(beta / 2.0)) - math.log(R / 2.0))
    assert riesz_integral(cap, north, R) == pytest.approx(want, rel=1e-6)


def test_riesz_integral_converges_with_details():
    c = rp.circle()
    y = geometry.project(c, (1.0, 0.0))
    value, converged, levels = riesz_integral(c, y, 0.5, details=True)
    assert converged
    assert levels >= 1
    assert value == pytest.approx(riesz_integral(c, y, 0.5), rel=1e-12)


def test_lemma_bound_single_instance_holds():
    c = rp.circle()
    y = geometry.project(c, (1.0, 0.0))
    out = lemma_bound_check(c, y, R=0.05, r=0.5)
    assert out["holds"]
    assert out["lhs"] <= out["rhs"] + 1e-9


def test_lemma_bound_small_randomized_suite():
    out = lemma_bound_suite(count=25, seed=3)
    assert out["count"] == 25
    assert out["all_hold"]
    assert out["all_converged"]
    assert out["worst_slack"] <= 1e-9
    assert len(out["results"]) == 25


def test_counts_on_quarter_arc_partition():
    c = rp.circle()
    cfg = Configuration(circle_points(4, phase=0.1), c)
    rep = empirical_counts(cfg, geometry.make_test_cells(c, "partition:4"))
    for label, count, frac, target, dev in rep.rows:
        assert count == 1, label
        assert frac == 0.25
        assert target == pytest.approx(0.25, rel=1e-12)
    assert rep.max_deviation == pytest.approx(0.0, abs=1e-12)


def test_counts_duplicates_per_copy():
    c = rp.circle()
    cfg = Configuration(np.tile([[1.0, 0.0]], (3, 1)), c)
    cells = geometry.make_test_cells(c, "partition:2")
    rep = empirical_counts(cfg, cells)
    assert sum(r[1] for r in rep.rows) == 3
    assert sorted(r[2] for r in rep.rows) == [0.0, 1.0]


def test_partition_fractions_sum_to_one_even_on_boundaries():
    c = rp.circle()
    # points placed exactly on the partition cut angles
    pts = circle_points(8)
    cfg = Configuration(pts, c)
    rep = empirical_counts(cfg, geometry.make_test_cells(c, "partition:8"))
    assert sum(r[2] for r in rep.rows) == 1.0


def test_cap_cells_count_boundary_points_inside():
    c = rp.circle()
    cell = geometry._cap_cell(c, np.array([1.0, 0.0]), math.pi / 2.0, "cap")
    boundary = circle_points(4)[1]  # (0, 1), exactly on the cap rim
    cfg = Configuration([boundary], c)
    rep = empirical_counts(cfg, [cell])
    assert rep.rows[0][1] == 1


def test_counting_is_invariant_under_an_exact_rotation():
    # quarter-turn rotations are exact in floats, so counts must agree bitwise
    c = rp.circle()
    R = np.array([[0.0, -1.0], [1.0, 0.0]])
    rc = rp.placed(rp.circle(), frame=R)
    pts = circle_points(7, phase=0.2)
    a = empirical_counts(Configuration(pts, c),
                         geometry.make_test_cells(c, "partition:5"))
    b = empirical_counts(Configuration(pts @ R.T, rc, validate=False),
                         geometry.make_test_cells(rc, "partition:5"))
    assert [r[1] for r in a.rows] == [r[1] for r in b.rows]


def test_equally_spaced_deviation_is_at_most_two_over_n():
    c = rp.circle()
    for n in (10, 100, 1000):
        cfg = Configuration(circle_points(n, phase=0.05), c)
        rep = empirical_counts(cfg, geometry.make_test_cells(c, "partition:16"))
        assert rep.max_deviation <= 2.0 / n + 1e-12, n


def test_equidistribution_report_shape():
    c = rp.circle()
    reports = [Configuration(circle_points(n), c) for n in (8, 16, 32)]
    out = equidistribution_report(reports, family="partition:8")
    assert out["cells"] == 8
    assert [row[0] for row in out["rows"]] == [8, 16, 32]
    assert out["decreasing"]
    assert len(out["counts"]) == 3


def test_equidistribution_report_rejects_mixed_homes():
    c = rp.circle()
    s = rp.sphere(2)
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError, match="home"):
        equidistribution_report([
            Configuration(circle_points(4), c),
            Configuration(geometry.random_points(s, 4, rng), s),
        ])
