"""Energy minimization and the polarization-energy inequality."""

import math

import numpy as np
import pytest

import rieszpol as rp
from rieszpol import energymin, geometry
from rieszpol.energymin import (
    circle_energy,
    minimize,
    polarization_energy_inequality,
    tetrahedron_points,
)
from rieszpol.potentials import energy


def test_circle_energy_closed_forms():
    assert circle_energy(2, 1.0) == pytest.approx(1.0, rel=1e-14)
    assert circle_energy(3, 2.0) == pytest.approx(2.0, rel=1e-14)


def test_two_point_minimum_energy_is_two_over_diameter():
    cfg, value = minimize(rp.circle(), 2, s=1.0, seed=0, restarts=2)
    assert value == pytest.approx(1.0, rel=1e-9)
    q, vq = minimize(rp.cube(2), 2, s=1.0, seed=0, restarts=4)
    assert vq == pytest.approx(2.0 / math.sqrt(2.0), rel=1e-6)


def test_minimize_circle_attains_equally_spaced_energy():
    for n, s in ((3, 2.0), (5, 1.0)):
        rep = minimize(rp.circle(), n, s=s, seed=1, restarts=4)
        assert rep.value == pytest.approx(circle_energy(n, s), rel=1e-8), (n, s)


def test_minimize_sphere_recovers_tetrahedron_energy():
    tet = tetrahedron_points()
    target = energy(rp.Configuration(tet, rp.sphere(2)), 1.0)
    assert target == pytest.approx(7.3484692283495345, rel=1e-12)
    rep = minimize(rp.sphere(2), 4, s=1.0, seed=2, restarts=4)
    assert rep.value == pytest.approx(target, rel=1e-7)


def test_report_value_matches_its_configuration():
    rep = minimize(rp.sphere(2), 5, s=2.0, seed=4, restarts=2)
    assert energy(rep.config, 2.0) == pytest.approx(rep.value, rel=1e-12)
    assert min(rep.restart_values) == rep.value


def test_minimize_is_reproducible():
    a = minimize(rp.circle(), 4, s=1.0, seed=11, restarts=3)
    b = minimize(rp.circle(), 4, s=1.0, seed=11, restarts=3)
    assert a.value == b.value
    assert np.array_equal(a.config.points, b.config.points)


def test_energy_scaling_power_law():
    rep1 = minimize(rp.circle(), 3, s=2.0, seed=5, restarts=2)
    rep2 = minimize(rp.scaled(rp.circle(), 2.0), 3, s=2.0, seed=5, restarts=2)
    assert rep2.value == pytest.approx(rep1.value * 2.0**-2.0, rel=1e-12)


def test_inequality_on_exact_circle_instances():
    # M_N >= E_N / (N - 1) with both sides from closed forms
    from rieszpol.polarization import equally_spaced_value

    for n in range(2, 13):
        for s in (1.0, 2.0):
            chk = polarization_energy_inequality(
                rp.circle(), n, s,
                pol_value=equally_spaced_value(n, s),
                energy_value=circle_energy(n, s),
            )
            assert chk["holds"], (n, s)
            assert chk["lhs"] >= chk["rhs"] - 1e-9


def test_inequality_on_ball_tetrahedron_instance():
    # collapsed optimum gives M = 4 on the ball at s = 1; the rhs uses the
    # boundary tetrahedron, the minimal 4-point arrangement
    tet_energy = energy(rp.Configuration(tetrahedron_points(), rp.sphere(2)), 1.0)
    chk = polarization_energy_inequality(rp.ball(3), 4, 1.0, 4.0, tet_energy)
    assert chk["holds"]
    assert chk["rhs"] == pytest.approx(tet_energy / 3.0, rel=1e-12)


def test_inequality_requires_two_points():
    with pytest.raises(ValueError):
        polarization_energy_inequality(rp.circle(), 1, 1.0, 1.0, 1.0)
