"""
Watching the Lyapunov function along a trajectory.

V adds the dual Bregman divergence to the equilibrium and a Laplacian
pseudo-inverse energy of the integral state. It never increases, and its
finite-difference rate tracks the closed-form derivative.
"""

import numpy as np

from dmdif import diagnostics, dynamics, graph, harness, mirror, objective

p = objective.generate_paper_instance(42)
net = graph.cycle(10)
mm = mirror.NegativeEntropy(p.d)
ctx = diagnostics.build_context(p, net, mm)

x0 = harness.random_feasible_init(mm, p.n, p.d, [42, 1])
s0 = dynamics.init_state(p, mm, x0)
spec = dynamics.AlgorithmSpec("dmd-if", 1e-3, integrator="rk4")
rec = dynamics.run(p, net, mm, spec, s0, 5000, record_every=500, ctx=ctx)

for row in rec.rows:
    print(f"t={row['t']:4.1f}  V={row['lyapunov']:11.5g}  gap={row['gap_agent1']:10.4g}")

v = rec.column("lyapunov")
print("monotone:", bool(np.all(np.diff(v) <= 0)))

s = dynamics.advance(p, net, mm, spec, s0, 100)
h = 1e-6
s_h = dynamics.advance(p, net, mm, dynamics.AlgorithmSpec("dmd-if", h, integrator="rk4"), s, 1)
fd = (diagnostics.lyapunov(ctx, mm, s_h) - diagnostics.lyapunov(ctx, mm, s)) / h
print(f"dV/dt finite difference {fd:.6g}, closed form {diagnostics.lyapunov_rate_expression(p, ctx, s):.6g}")
