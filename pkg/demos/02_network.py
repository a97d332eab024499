"""
Agent networks and their Laplacian spectra.

Connectivity is what lets the integral state cancel the local gradient
disagreement; it shows up as a positive second Laplacian eigenvalue.
"""

import numpy as np

from dmdif import graph

ring = graph.cycle(10)
print("cycle(10) eigenvalues:", np.round(ring.eigenvalues, 6))
print("closed form          :", np.round(np.sort(2 - 2 * np.cos(2 * np.pi * np.arange(10) / 10)), 6))
print("algebraic connectivity", ring.algebraic_connectivity)

# a path with a chord, built from a 1-indexed edge list
net = graph.from_edge_list(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 4)])
print("degrees", net.degrees, "neighbors of agent 1:", net.neighbors[0])

# -L x is the per-agent sum of neighbor differences
x = np.arange(5.0)
print("-L x                ", -(net.laplacian @ x) + 0.0)
print("neighbor_sum(net, x)", graph.neighbor_sum(net, x) + 0.0)

try:
    graph.from_edge_list(4, [(1, 2), (3, 4)])
except graph.DisconnectedGraphError as exc:
    print("rejected:", exc)
