"""Maximin Riesz potentials on compact sets.

Solvers and analysis tools for the polarization (Chebyshev-type) problem:
place N points in a compact set A to maximize the minimum, over A, of the
summed Riesz s-potential.  Includes exact small-case oracles, closed-form
circle values, minimum-energy comparisons, covering-density and singular
integral checks, equidistribution tests, and N -> infinity ratio tables.
"""

__version__ = "0.1.0"

from .geometry import (
    SetDescriptor,
    arc,
    augmented_arc,
    ball,
    circle,
    cube,
    descriptor_hash,
    format_set_spec,
    make_test_cells,
    measure,
    parse_set_spec,
    placed,
    scaled,
    segment,
    sphere,
    union,
    unit_ball_volume,
)
from .potentials import Configuration, energy, min_potential, potential
from .polarization import SolveReport, equally_spaced_value, oracle_solve, solve
from .energymin import (
    EnergyReport,
    circle_energy,
    minimize,
    polarization_energy_inequality,
)
from .asymptotics import (
    AsymptoticsTable,
    chebyshev_ratio_table,
    extrapolate,
    lower_bound_report,
    polarization_ratio_table,
    table_target,
)
from .density import (
    alpha,
    alpha_exact,
    alpha_limit_check,
    empirical_counts,
    equidistribution_report,
    lemma_bound_check,
    lemma_bound_suite,
    riesz_integral,
)
from .seeds import derive_seed

__all__ = [
    "__version__",
    "SetDescriptor", "circle", "arc", "segment", "ball", "cube", "sphere",
    "union", "augmented_arc", "placed", "scaled", "measure",
    "unit_ball_volume", "parse_set_spec", "format_set_spec",
    "descriptor_hash", "make_test_cells",
    "Configuration", "potential", "energy", "min_potential",
    "SolveReport", "solve", "oracle_solve", "equally_spaced_value",
    "EnergyReport", "minimize", "circle_energy",
    "polarization_energy_inequality",
    "AsymptoticsTable", "polarization_ratio_table", "chebyshev_ratio_table",
    "extrapolate", "lower_bound_report", "table_target",
    "alpha", "alpha_exact", "alpha_limit_check", "riesz_integral",
    "lemma_bound_check", "lemma_bound_suite", "empirical_counts",
    "equidistribution_report",
    "derive_seed",
]
