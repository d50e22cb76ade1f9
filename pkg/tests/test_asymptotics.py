"""Ratio tables, extrapolation, divergence flags, serialization."""

import math

import numpy as np
import pytest

import rieszpol as rp
from rieszpol import asymptotics, geometry
from rieszpol.asymptotics import (
    AsymptoticsTable,
    assemble_table,
    chebyshev_ratio_table,
    extrapolate,
    lower_bound_report,
    polarization_ratio_table,
    table_target,
    to_csv,
    write_plotdata,
)


def synthetic_table(a, b, n_list, desc=None):
    desc = desc or rp.circle()
    entries = [(n, (a + b / math.log(n)) * n * math.log(n)) for n in n_list]
    return assemble_table(desc, 1.0, "n_log_n", entries, "analytic_circle",
                          None, lower_bound=False)


def test_targets_from_ball_volume_over_measure():
    assert table_target(rp.circle(), "n_log_n") == pytest.approx(1 / math.pi, rel=1e-12)
    assert table_target(rp.segment(2.0), "n_log_n") == pytest.approx(1.0, rel=1e-12)
    assert table_target(rp.ball(2), "n_log_n") == pytest.approx(1.0, rel=1e-12)
    assert table_target(rp.sphere(2), "n_log_n") == pytest.approx(0.25, rel=1e-12)
    two = rp.union(
        rp.placed(rp.circle(), offset=(-2.0, 0.0)),
        rp.placed(rp.circle(), offset=(2.0, 0.0)),
    )
    assert table_target(two, "n_log_n") == pytest.approx(1 / (2 * math.pi), rel=1e-12)


def test_plain_n_normalization_has_no_finite_target():
    assert math.isinf(table_target(rp.circle(), "n"))


def test_extrapolate_recovers_exact_model():
    tab = synthetic_table(1 / math.pi, 1.0, [16, 32, 64, 128, 256])
    fit = extrapolate(tab)
    assert fit["a"] == pytest.approx(1 / math.pi, abs=1e-12)
    assert fit["b"] == pytest.approx(1.0, abs=1e-12)
    assert fit["residual"] < 1e-12


def test_extrapolate_constant_ratios_gives_zero_slope():
    tab = synthetic_table(0.4, 0.0, [8, 16, 32, 64])
    fit = extrapolate(tab)
    assert fit["a"] == pytest.approx(0.4, abs=1e-13)
    assert fit["b"] == pytest.approx(0.0, abs=1e-12)


def test_extrapolate_is_row_order_invariant():
    tab = synthetic_table(0.3, 0.7, [8, 16, 32, 64])
    fit1 = extrapolate(tab)
    fit2 = extrapolate(tuple(reversed(tab.rows)))
    assert fit1["a"] == pytest.approx(fit2["a"], rel=1e-13)
    assert fit1["b"] == pytest.approx(fit2["b"], rel=1e-13)


def test_extrapolate_needs_three_rows():
    with pytest.raises(ValueError, match="3 rows"):
        extrapolate(synthetic_table(0.3, 0.7, [8, 16]).rows)


def test_assemble_table_rejects_unsorted_n():
    with pytest.raises(ValueError, match="increasing"):
        assemble_table(rp.circle(), 1.0, "n_log_n", [(8, 1.0), (8, 1.0)],
                       "analytic_circle", None, lower_bound=False)


def test_analytic_circle_table_fits_the_limit():
    n_list = [2**k for k in range(6, 14)]
    tab = polarization_ratio_table(rp.circle(), n_list, source="analytic_circle")
    assert tab.target == pytest.approx(1 / math.pi, rel=1e-12)
    fit = tab.extrapolated
    assert abs(fit["a"] - 1 / math.pi) <= 0.02 / math.pi
    ratios = [r[2] for r in tab.rows]
    assert all(b < a for a, b in zip(ratios, ratios[1:]))


def test_normalization_consistency():
    # value / (n log n) recomputed from the raw value column
    tab = polarization_ratio_table(rp.circle(), [64, 128, 256],
                                   source="analytic_circle")
    for n, v, ratio in tab.rows:
        assert ratio == pytest.approx(v / (n * math.log(n)), rel=1e-12)


def test_chebyshev_segment_single_point_value():
    tab = chebyshev_ratio_table(rp.segment(2.0), 0.5, [1, 2, 4],
                                source="solver", seed=0,
                                solver_opts={"restarts": 2})
    n1 = tab.rows[0]
    # one point on [-1, 1] sits at the midpoint; the minimum is at either
    # end, distance 1, so the value is exactly 1
    assert n1[1] == pytest.approx(1.0, rel=1e-5)
    assert math.isinf(tab.target)


def test_solver_table_rows_independent_of_list_shape():
    full = polarization_ratio_table(rp.circle(), [4, 8], seed=5,
                                    solver_opts={"restarts": 2})
    only8 = polarization_ratio_table(rp.circle(), [8], seed=5,
                                     solver_opts={"restarts": 2})
    assert full.rows[1] == only8.rows[0]


def test_lower_bound_report_consistent_on_circle():
    tab = polarization_ratio_table(rp.circle(), [2**k for k in range(6, 12)],
                                   source="analytic_circle")
    rep = lower_bound_report(tab)
    assert rep["flag"] == "consistent"
    assert rep["target"] == pytest.approx(1 / math.pi, rel=1e-12)
    assert rep["a"] is not None


def test_lower_bound_report_flags_divergence_on_degenerate_part():
    # a union with a measure-zero extra part in its dimension class keeps
    # the n log n ratios growing without bound
    aug = rp.augmented_arc()
    tab = polarization_ratio_table(aug, [4, 8, 16], seed=1,
                                   solver_opts={"restarts": 2})
    assert math.isinf(tab.target)
    rep = lower_bound_report(tab)
    ratios = [r[2] for r in tab.rows]
    assert ratios[-1] >= 2.0 * ratios[0]
    assert rep["flag"] == "diverging"


def test_csv_round_trip_digits():
    tab = synthetic_table(1 / math.pi, 1.0, [16, 32, 64])
    text = to_csv(tab)
    lines = [l for l in text.strip().splitlines() if not l.startswith("#")]
    header, *rows = lines
    assert header.split(",") == ["N", "value", "ratio", "target", "model_fit"]
    assert len(rows) == 3
    for (n, v, ratio), line in zip(tab.rows, rows):
        cells = line.split(",")
        assert int(cells[0]) == n
        assert float(cells[1]) == v  # 17 significant digits round-trip
        assert float(cells[2]) == ratio


def test_csv_header_names_set_and_seed():
    tab = polarization_ratio_table(rp.circle(), [4, 8], seed=9,
                                   solver_opts={"restarts": 2})
    head = to_csv(tab).splitlines()[0]
    assert head.startswith("#")
    assert geometry.descriptor_hash(rp.circle()) in head
    assert "seed=9" in head


def test_plotdata_has_target_row():
    from rieszpol.cli import emit_plotdata

    tab = synthetic_table(0.5, 0.2, [8, 16, 32])
    lines = emit_plotdata(tab).strip().splitlines()
    assert len(lines) == 4  # three rows plus the target row
    assert lines[-1].startswith("target ")
    assert float(lines[-1].split()[1]) == pytest.approx(tab.target, rel=1e-15)


def test_plotdata_omits_infinite_target_with_comment():
    from rieszpol.cli import emit_plotdata

    tab = chebyshev_ratio_table(rp.circle(), 1.0, [4, 8, 16],
                                source="analytic_circle")
    lines = emit_plotdata(tab).strip().splitlines()
    assert len(lines) == 4
    assert lines[-1].startswith("#")
    assert "target" in lines[-1]
    assert not any(l.startswith("target ") for l in lines)


def test_gnuplot_table_includes_model_fit_column():
    tab = synthetic_table(0.5, 0.2, [8, 16, 32])
    lines = write_plotdata(tab).strip().splitlines()
    assert lines[0].startswith("# N ratio target model_fit")
    n, ratio, target, model = lines[1].split()
    assert int(n) == 8
    assert float(model) == pytest.approx(0.5 + 0.2 / math.log(8), rel=1e-12)
