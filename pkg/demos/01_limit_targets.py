"""
Where should N ln N normalization land?
=======================================

For a d-rectifiable set of positive measure, max-min polarization at the
critical exponent s = d grows like (beta_d / H_d(A)) * N ln N.  The package
exposes that constant as the "target" of a ratio table; this script prints
it for the whole catalog and checks the two closed forms everyone
remembers: 1/pi for the unit circle and 1/4 for the unit sphere.
"""

import math

from rieszpol import parse_set_spec, table_target

CATALOG = [
    "circle",
    "segment(length=2)",
    "arc(radius=1;extent=2)",
    "ball(d=2)",
    "sphere(d=2)",
    "union(parts=[circle(center=-2,0), circle(center=2,0)])",
]

for spec in CATALOG:
    desc = parse_set_spec(spec)
    target = table_target(desc, "n_log_n")
    print(f"{spec:62s}  ->  {target:.12f}")

# the two textbook values
circle = table_target(parse_set_spec("circle"), "n_log_n")
sphere = table_target(parse_set_spec("sphere(d=2)"), "n_log_n")
assert abs(circle - 1.0 / math.pi) < 1e-15
assert abs(sphere - 0.25) < 1e-15
print()
print("circle target equals 1/pi, sphere target equals 1/4: checked.")
