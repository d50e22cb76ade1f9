"""
The circle is the one case we can grade exactly.
================================================

At s = 2 the optimal N-point configuration on the unit circle is any
rotation of the N-th roots of unity and the maximin value is exactly
N^2 / 4.  So the stochastic solver can be scored against a closed form:
run it, compare the value, and look at the angular gaps of the witness.
"""

import math

import numpy as np

from rieszpol import circle, equally_spaced_value, solve

desc = circle()

for n in (2, 3, 5, 8):
    rep = solve(desc, n, s=2.0, seed=42, restarts=8)
    exact = equally_spaced_value(n, 2.0)
    rel = rep.value / exact - 1.0
    print(f"N={n}:  solver {rep.value:.12f}   exact {exact:.12f}   "
          f"rel err {rel:+.2e}   converged={rep.converged}")

    # optimal points are equally spaced: sorted angular gaps all 2*pi/N
    ang = np.sort(np.arctan2(rep.config[:, 1], rep.config[:, 0]))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
    print(f"       gap spread {gaps.max() - gaps.min():.2e} "
          f"(uniform gap is {2 * math.pi / n:.4f})")

# the exact value is also available without running anything
print()
print("closed-form table, N^2/4:")
for n in (16, 64, 256):
    print(f"  N={n:4d}  ->  {equally_spaced_value(n, 2.0):.4f}")
