"""
Mirror maps and their Bregman divergences.

The negative-entropy map sends the positive orthant onto all of R^d, so a
mirror step taken in the dual space always lands back at a positive point.
"""

import numpy as np

from dmdif import mirror

rng = np.random.default_rng(0)
ent = mirror.NegativeEntropy(5)
euc = mirror.Euclidean(5)

x = rng.uniform(0.5, 3.0, 5)
z = ent.grad(x)
print("x            ", np.round(x, 4))
print("grad phi(x)  ", np.round(z, 4))
print("round trip   ", np.max(np.abs(ent.conj_grad(z) - x)))

# a large gradient step in the dual still maps to a positive primal point
z_step = z - 25.0 * np.ones(5)
print("after step   ", ent.conj_grad(z_step))

# D_phi(x, x') is the generalized KL divergence and equals the dual divergence
# with its arguments swapped
xp = rng.uniform(0.5, 3.0, 5)
print("D_phi(x, x')      ", ent.bregman_primal(x, xp))
print("D_phi*(z', z)     ", ent.bregman_dual(ent.grad(xp), ent.grad(x)))
print("euclidean D(x, x')", euc.bregman_primal(x, xp), "=", 0.5 * np.sum((x - xp) ** 2))
print("entropy modulus on the sampling box:", ent.modulus)
