"""
Gauge duals of two small sparse-recovery problems
==================================================

Build the gauge dual of a minimum-norm problem and of a basis pursuit
denoising problem, solve both sides and check that the optimal values
multiply to one.
"""

import numpy as np

from gaugedual.duality import build_gauge_dual, build_lagrange_dual, certify
from gaugedual.instances import bpdn, min_norm
from gaugedual.solvers import solve_gauge_dual, solve_lagrange_dual, solve_primal_oracle

# min ||x||_1 s.t. x1 + x2 = 2: the primal optimum is 2
p = min_norm().problem
d = build_gauge_dual(p)
print(d.description)

x = solve_primal_oracle(p)
y = solve_gauge_dual(d)
print("primal", x.value, "gauge dual", y.value, "product", x.value * y.value)

# the certificate recomputes both objectives from the points themselves
print(certify(p, x.x, y.x).as_dict())

# the Lagrange dual optimum equals the primal optimum instead
print("lagrange dual", solve_lagrange_dual(build_lagrange_dual(p)).value)

# BPDN: min ||x||_1 s.t. ||b - x||_2 <= sigma
q = bpdn().problem
xq = solve_primal_oracle(q)
yq = solve_gauge_dual(build_gauge_dual(q))
print("bpdn primal", xq.value, "x =", np.round(xq.x, 6))
print("bpdn dual", yq.value, "via", yq.method, "product", xq.value * yq.value)
