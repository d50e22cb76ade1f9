"""
Do optimal configurations spread like the measure?
==================================================

Maximin configurations at the critical exponent equidistribute: the
fraction of points landing in a cell tends to the cell's normalized
measure.  Three views of that here, cheap to expensive:

  1. equally spaced circle points vs closed arcs (deviation <= 2/N),
  2. a solver run on two disjoint circles: half the points per circle,
  3. solver points on S^2 counted against random spherical caps.
"""

import math

import numpy as np

from rieszpol import (
    circle,
    empirical_counts,
    make_test_cells,
    placed,
    solve,
    sphere,
    union,
)
from rieszpol.potentials import Configuration


def circle_points(n, phase=0.0):
    th = phase + 2 * math.pi * np.arange(n) / n
    return np.column_stack([np.cos(th), np.sin(th)])


home = circle()

print("equally spaced points vs 32 closed arcs:")
for n in (10, 100, 1000):
    cfg = Configuration(circle_points(n, phase=0.05), home)
    rep = empirical_counts(cfg, make_test_cells(home, "partition:32"))
    print(f"  N={n:5d}:  max |count/N - measure fraction| = "
          f"{rep.max_deviation:.6f}   (2/N = {2.0 / n:.6f})")

print()
print("two disjoint circles, N=64 (this takes a few seconds):")
two = union(placed(circle(), offset=(-2.0, 0.0)),
            placed(circle(), offset=(2.0, 0.0)))
srep = solve(two, 64, s=1.0, seed=11, restarts=2)
counts = empirical_counts(Configuration(srep.config, two),
                          make_test_cells(two, "parts"))
fracs = [row[2] for row in counts.rows]
print(f"  per-circle mass: {fracs}   (measure says [0.5, 0.5])")

print()
print("S^2, N=48, random caps:")
s2 = sphere(2)
srep = solve(s2, 48, s=2.0, seed=11, restarts=2)
caps = make_test_cells(s2, "caps:40", seed=23)
counts = empirical_counts(Configuration(srep.config, s2), caps)
print(f"  worst cap deviation over 40 caps: {counts.max_deviation:.4f}")
