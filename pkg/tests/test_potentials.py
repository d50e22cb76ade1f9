"""Point potentials, energies, and the exact inner minimizer."""

import math

import numpy as np
import pytest

import rieszpol as rp
from rieszpol import geometry
from rieszpol.potentials import (
    Configuration,
    energy,
    energy_gradient,
    min_potential,
    potential,
)


def equally_spaced_circle(n, phase=0.0):
    th = phase + 2 * math.pi * np.arange(n) / n
    return np.column_stack([np.cos(th), np.sin(th)])


def test_configuration_validates_membership():
    c = rp.circle()
    Configuration([[1.0, 0.0]], c)
    with pytest.raises(ValueError, match="off the set"):
        Configuration([[1.1, 0.0]], c)


def test_configuration_allows_duplicates():
    c = rp.circle()
    cfg = Configuration([[1.0, 0.0], [1.0, 0.0]], c)
    assert cfg.n == 2


def test_potential_sums_inverse_power_distances():
    c = rp.circle()
    cfg = Configuration([[1.0, 0.0], [-1.0, 0.0]], c)
    pv = potential((0.0, 1.0), cfg, 2.0)
    # both points at squared distance 2
    assert pv.value == pytest.approx(1.0, rel=1e-15)


def test_potential_at_configuration_point_is_infinite():
    c = rp.circle()
    cfg = Configuration([[1.0, 0.0]], c)
    assert potential((1.0, 0.0), cfg, 1.0).value == math.inf


def test_single_point_min_potential_at_antipode():
    c = rp.circle()
    cfg = Configuration([[1.0, 0.0]], c)
    pv = min_potential(c, cfg, 2.0)
    assert pv.value == pytest.approx(0.25, rel=1e-12)
    assert np.allclose(pv.witness, (-1.0, 0.0), atol=1e-6)


def test_four_equally_spaced_points_min_potential():
    # the gap midpoint realizes the minimum and the value is n^2/4
    c = rp.circle()
    cfg = Configuration(equally_spaced_circle(4), c)
    pv = min_potential(c, cfg, 2.0)
    assert pv.value == pytest.approx(4.0, rel=1e-12)
    theta = math.atan2(pv.witness[1], pv.witness[0]) % (math.pi / 2)
    assert theta == pytest.approx(math.pi / 4, abs=1e-6)


def test_coincident_points_on_ball_min_at_boundary():
    b = rp.ball(3)
    cfg = Configuration(np.zeros((5, 3)), b)
    pv = min_potential(b, cfg, 1.0)
    assert pv.value == pytest.approx(5.0, rel=1e-10)
    assert np.linalg.norm(pv.witness) == pytest.approx(1.0, abs=1e-9)


def test_min_potential_is_a_lower_bound_on_sampled_potentials():
    rng = np.random.default_rng(0)
    s2 = rp.sphere(2)
    pts = geometry.random_points(s2, 6, rng)
    cfg = Configuration(pts, s2)
    pv = min_potential(s2, cfg, 2.0)
    probes = geometry.sample(s2, 2000)
    for y in probes[::97]:
        assert pv.value <= potential(y, cfg, 2.0).value + 1e-9


def test_potential_is_monotone_in_configuration_size():
    c = rp.circle()
    small = Configuration(equally_spaced_circle(3), c)
    large = Configuration(equally_spaced_circle(6), c)
    y = geometry.project(c, (0.2, -0.9))
    assert potential(y, large, 1.0).value > potential(y, small, 1.0).value


def test_potential_permutation_invariance():
    c = rp.circle()
    pts = equally_spaced_circle(5, phase=0.3)
    a = Configuration(pts, c)
    b = Configuration(pts[::-1], c)
    y = geometry.project(c, (-0.4, 0.8))
    # summation order may differ by an ulp
    assert potential(y, a, 1.5).value == pytest.approx(
        potential(y, b, 1.5).value, rel=1e-14)


def test_potential_scaling_equivariance():
    # doubling all lengths multiplies an s-potential by 2^-s exactly
    c = rp.circle()
    c2 = rp.scaled(c, 2.0)
    pts = equally_spaced_circle(5, phase=0.1)
    y = geometry.project(c, (0.6, -0.6))
    for s in (1.0, 2.0):
        v1 = potential(y, Configuration(pts, c), s).value
        v2 = potential(2.0 * y, Configuration(2.0 * pts, c2), s).value
        assert v2 == v1 * 2.0**-s


def test_energy_ordered_pair_convention():
    c = rp.circle()
    antipodal = Configuration([[1.0, 0.0], [-1.0, 0.0]], c)
    assert energy(antipodal, 1.0) == pytest.approx(1.0, rel=1e-15)
    triangle = Configuration(equally_spaced_circle(3), c)
    # squared side length 3, six ordered pairs
    assert energy(triangle, 2.0) == pytest.approx(2.0, rel=1e-14)


def test_energy_of_duplicate_points_is_infinite():
    c = rp.circle()
    cfg = Configuration([[1.0, 0.0], [1.0, 0.0]], c)
    assert energy(cfg, 1.0) == math.inf


def test_energy_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    s2 = rp.sphere(2)
    pts = geometry.random_points(s2, 5, rng)
    cfg = Configuration(pts, s2)
    G = energy_gradient(cfg, 2.0)
    h = 1e-6
    for i in (0, 3):
        for k in range(3):
            d = np.zeros((5, 3))
            d[i, k] = h
            fp = energy(Configuration(pts + d, s2, validate=False), 2.0)
            fm = energy(Configuration(pts - d, s2, validate=False), 2.0)
            fd = (fp - fm) / (2 * h)
            assert G[i, k] == pytest.approx(fd, rel=2e-5, abs=1e-7)


def test_min_potential_respects_grid_argument():
    c = rp.circle()
    cfg = Configuration(equally_spaced_circle(2), c)
    coarse = min_potential(c, cfg, 2.0, grid_n=64)
    fine = min_potential(c, cfg, 2.0, grid_n=4096)
    assert coarse.value == pytest.approx(fine.value, rel=1e-9)
