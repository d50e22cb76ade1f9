"""
Covering density: how much of a ball does the set fill?
=======================================================

alpha_d(A; eps) is the largest ratio H_d(A cap B(y, eps)) / (v_d eps^d)
over centers y in A.  For the unit circle it has the closed form
2 arcsin(eps/2) / eps, which tends to 1 as eps -> 0; on the sphere every
cap gives exactly 1.  The eps -> 0 schedule ending near 1 is what the
N ln N law needs from a set.

Singular-integral tail bounds ride on the same geometry: for y in A and
R < r the integral of |y - x|^{-d} over A \ B(y, R) is controlled by
alpha and log(r / R).
"""

import math

from rieszpol import (
    alpha,
    alpha_exact,
    alpha_limit_check,
    circle,
    lemma_bound_suite,
    riesz_integral,
    sphere,
)

print("circle, closed form 2*arcsin(eps/2)/eps:")
for eps in (1.0, 0.5, 0.1):
    got = alpha_exact(circle(), eps)
    want = 2.0 * math.asin(eps / 2.0) / eps
    print(f"  eps={eps:4.2f}:  {got:.12f}   (formula {want:.12f})")

print()
print("sphere caps are flat: alpha =", alpha_exact(sphere(2), 0.3))

# the grid estimator lower-bounds the sup and converges to it
est = alpha(circle(), 0.5, x_samples=64, r_samples=64)
print(f"grid estimate at eps=0.5: {est.value:.6f} "
      f"(argmax near x={tuple(round(c, 3) for c in est.argmax_x)}, "
      f"r={est.argmax_r:.4f})")

# schedule check: alpha(eps) must settle near 1 as eps shrinks
chk = alpha_limit_check(circle(), schedule=(0.5, 0.1, 0.02))
print("schedule:", [round(v, 6) for v in chk["values"]],
      "-> final <= 1.02:", chk["passes"])

# the singular integral itself has closed forms to check the quadrature
# against: on the unit circle, int |x-y|^{-1} over the part farther than
# R from y equals -2 ln tan(theta/4) with theta = 2 arcsin(R/2)
print()
R = 0.3
theta = 2.0 * math.asin(R / 2.0)
got = riesz_integral(circle(), (1.0, 0.0), R)
want = -2.0 * math.log(math.tan(theta / 4.0))
print(f"circle tail integral at R={R}: {got:.10f}   (closed form {want:.10f})")

print()
print("randomized tail-bound suite (40 instances):")
suite = lemma_bound_suite(count=40, seed=17)
print(f"  all hold: {suite['all_hold']}   all quadratures converged: "
      f"{suite['all_converged']}   worst slack {suite['worst_slack']:.2e}")
