"""
Semidefinite examples: max-cut on a triangle and a phase toy
=============================================================

Both primal problems minimize a trace-like gauge over PSD matrices.  Their
gauge duals minimize a largest generalized eigenvalue, which the projected
subgradient method handles directly.
"""

import numpy as np

from gaugedual.duality import build_gauge_dual
from gaugedual.instances import complete_graph, maxcut, maxcut_summary, phase_toy
from gaugedual.solvers import SubgradConfig, solve_gauge_dual, solve_primal_oracle

W = complete_graph(3)
p = maxcut(W).problem
x = solve_primal_oracle(p)
print("oracle <D+A, X> =", round(x.value, 6))
print(maxcut_summary(W, x.x))
print("X =\n", np.round(x.x.reshape(3, 3), 4))

r = solve_gauge_dual(build_gauge_dual(p), SubgradConfig(max_iters=2000))
print("gauge dual", r.value, "after", r.iterations, "iterations; product", r.value * x.value)

q = phase_toy().problem
xq = solve_primal_oracle(q)
rq = solve_gauge_dual(build_gauge_dual(q))
print("phase toy: trace", xq.value, "dual", rq.value, "product", xq.value * rq.value)
