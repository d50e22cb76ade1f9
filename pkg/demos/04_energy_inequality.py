"""
Polarization never drops below average pair energy.
===================================================

For any compact A and any N >= 2,

    M_s(A, N)  >=  E_s(A, N) / (N - 1),

because at the energy-minimizing configuration some point already sees at
least the average of the others' potentials.  This script minimizes pair
energy on the circle and on B^3 (where N=4 lands on the regular
tetrahedron), then evaluates both sides.
"""

import numpy as np

from rieszpol import (
    ball,
    circle,
    circle_energy,
    equally_spaced_value,
    minimize,
    polarization_energy_inequality,
    solve,
)

print("circle, s = 2 (both sides in closed form):")
for n in (3, 5, 9):
    lhs = equally_spaced_value(n, 2.0)          # exact maximin value
    energy = circle_energy(n, 2.0)              # exact minimum energy
    chk = polarization_energy_inequality(circle(), n, 2.0, lhs, energy)
    print(f"  N={n}:  M_N = {chk['lhs']:.6f}   E/(N-1) = {chk['rhs']:.6f}   "
          f"holds={chk['holds']}")
    assert chk["holds"]

print()
print("B^3, s = 1, N = 4 (minimum-energy points form a regular tetrahedron):")
erep = minimize(ball(3), 4, s=1.0, seed=5, restarts=6)
pts = erep.config.points
d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
off = np.sqrt(d2[~np.eye(4, dtype=bool)])
print(f"  energy {erep.value:.12f}, pairwise distances "
      f"{off.min():.6f}..{off.max():.6f} (tetrahedron edge is 1.632993)")

prep = solve(ball(3), 4, s=1.0, seed=5, restarts=8)
chk = polarization_energy_inequality(ball(3), 4, 1.0, prep.value, erep.value,
                                     advisory=not erep.converged)
print(f"  M_4 = {chk['lhs']:.6f} >= E/3 = {chk['rhs']:.6f}: {chk['holds']}"
      f"   (advisory={chk['advisory']})")
