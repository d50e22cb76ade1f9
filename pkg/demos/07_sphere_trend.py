"""
Chasing the sphere constant.
============================

No closed form is known for maximin values on S^2 at s = 2, but the
normalized ratio M_N / (N ln N) should drift toward
beta_2 / H_2(S^2) = 1/4.  Build a short solver table, extrapolate the
finite-N model ratio = a + b / ln N, and write the gnuplot-ready table.

Convergence from above is slow; with this tiny budget the point is the
trend, not the digits.  Expect a couple of minutes of compute.
"""

from rieszpol import extrapolate, polarization_ratio_table, sphere
from rieszpol.asymptotics import to_csv, write_plotdata

table = polarization_ratio_table(
    sphere(2), [32, 64, 128], seed=11,
    solver_opts={"restarts": 2},
)

print(f"target beta_2 / H_2 = {table.target:.6f}")
for n, value, ratio in table.rows:
    print(f"  N={n:4d}:  M_N = {value:12.4f}   ratio {ratio:.4f}")

fit = extrapolate(table)
print(f"model ratio = a + b/ln N:  a = {fit['a']:.4f}  b = {fit['b']:.4f}  "
      f"residual {fit['residual']:.2e}")

print()
print(write_plotdata(table))
print("(best-found values are lower bounds; ratios approach 1/4 from above)")
