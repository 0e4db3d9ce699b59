"""
How the optimal value reacts to perturbing b and sigma
=======================================================

A dual optimum y gives the subgradient (y, -rho_polar(y)) of the value
function v(h, k) of the problem with data b + h and sigma + k.
"""

from gaugedual.instances import bpdn
from gaugedual.sensitivity import (
    ValueFunctionProbe,
    check_subgradient_inequality,
    sigma_sweep,
    value_subgradient,
)

p = bpdn().problem
g = value_subgradient(p)
print("subgradient y =", g.y, "tau =", g.tau)

probe = ValueFunctionProbe(p, steps=(-0.1, 0.0, 0.1), interior_declared=True)
r = check_subgradient_inequality(probe, g)
print("inequality holds at", r.pass_rate * 100, "% of", len(r.rows), "grid points")
for d in r.derivatives:
    print(d)

# larger sigma means a looser constraint and a smaller optimal value
print(sigma_sweep(probe))
