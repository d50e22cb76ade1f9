"""
Collapse on the ball: when spreading out is wrong.
==================================================

On the solid ball B^d with a subcritical exponent s <= d - 2 the Riesz
kernel is superharmonic, and the best move is to stack every point at the
center.  The maximin value is then exactly N (each of the N points
contributes potential 1 at the worst boundary point).  Counterintuitive,
and a sharp test: any solver that insists on spreading points out will
land strictly below N.
"""

from rieszpol import ball, oracle_solve, solve
from rieszpol.geometry import sample

desc = ball(3)

for n in (2, 4, 8):
    rep = solve(desc, n, s=1.0, seed=7, restarts=8)
    radii = (rep.config ** 2).sum(axis=1) ** 0.5
    print(f"N={n}:  value {rep.value:.12f}  (exact {float(n):.1f})   "
          f"max |x| of witness {radii.max():.2e}")

# tiny cases have an independent grid oracle
small = oracle_solve(desc, 2, s=1.0, grid=sample(desc, 24))
print()
print(f"grid oracle, N=2: {small.value:.12f} at", small.config.round(6).tolist())
