"""
Undirected connected agent networks and their Laplacians.

Agents are 0-indexed inside the library; the edge-list text format and the
CLI use 1-indexed agents.
"""

from dataclasses import dataclass, field
import hashlib

import numpy as np

from .linalg import RANK_TOL, sym_eigen


class DisconnectedGraphError(ValueError):
    """The network violates the undirected-and-connected assumption."""


@dataclass(frozen=True)
class Network:
    """
    Static undirected network of ``n`` agents.

    Use :func:`cycle` or :func:`from_edge_list` rather than the constructor;
    those validate the edge set and connectivity.

    Attributes
    ----------
    n : int
        Number of agents.
    edges : tuple of (int, int)
        Sorted 0-indexed pairs ``(i, j)`` with ``i < j``.
    laplacian : ndarray
        ``n x n`` graph Laplacian (degree minus adjacency).
    eigenvalues : ndarray
        Laplacian spectrum, ascending.
    """

    n: int
    edges: tuple
    laplacian: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    neighbors: tuple = field(repr=False)

    @property
    def degrees(self):
        return np.diag(self.laplacian).copy()

    @property
    def algebraic_connectivity(self):
        """Second-smallest Laplacian eigenvalue (0 for a single agent)."""
        return float(self.eigenvalues[1]) if self.n > 1 else 0.0

    def digest(self):
        """SHA-256 of the edge set, for manifests."""
        h = hashlib.sha256(f"{self.n}:".encode())
        h.update(repr(self.edges).encode())
        return h.hexdigest()


def _build(n, pairs):
    if n < 1:
        raise ValueError("a network needs at least one agent")
    seen = set()
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i + 1}, {j + 1}) has an agent outside [1, {n}]")
        if i == j:
            raise ValueError(f"self-loop at agent {i + 1}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ValueError(f"duplicate edge ({key[0] + 1}, {key[1] + 1})")
        seen.add(key)
    edges = tuple(sorted(seen))

    lap = np.zeros((n, n))
    nbrs = [[] for _ in range(n)]
    for i, j in edges:
        lap[i, j] = lap[j, i] = -1.0
        lap[i, i] += 1.0
        lap[j, j] += 1.0
        nbrs[i].append(j)
        nbrs[j].append(i)
    lap.setflags(write=False)

    w = sym_eigen(lap).eigenvalues
    if n > 1 and not w[1] > RANK_TOL * w[-1]:
        raise DisconnectedGraphError(
            "graph is disconnected (algebraic connectivity is zero); "
            "the network must be undirected and connected")
    w.setflags(write=False)
    return Network(n, edges, lap, w, tuple(tuple(sorted(v)) for v in nbrs))


def cycle(n):
    """Ring network: agent ``i`` talks to ``i - 1`` and ``i + 1`` (mod ``n``)."""
    if n < 3:
        raise ValueError(f"a cycle needs n >= 3 agents, got {n}")
    return _build(n, [(i, (i + 1) % n) for i in range(n)])


def from_edge_list(n, edges):
    """
    Network from 1-indexed agent pairs.

    Raises
    ------
    ValueError
        On out-of-range indices, self-loops or duplicate edges.
    DisconnectedGraphError
        If the graph is not connected.
    """
    return _build(n, [(int(i) - 1, int(j) - 1) for i, j in edges])


def read_edge_list(path):
    """Parse the edge-list text format: ``n`` on the first line, then ``i j`` pairs."""
    with open(path) as fh:
        tokens = [line.split() for line in fh if line.strip() and not line.lstrip().startswith("#")]
    if not tokens or len(tokens[0]) != 1:
        raise ValueError(f"{path}: first line must hold the agent count")
    n = int(tokens[0][0])
    pairs = []
    for lineno, tok in enumerate(tokens[1:], start=2):
        if len(tok) != 2:
            raise ValueError(f"{path}: entry {lineno} is not an 'i j' pair")
        pairs.append((int(tok[0]), int(tok[1])))
    return from_edge_list(n, pairs)


def write_edge_list(net, path):
    with open(path, "w") as fh:
        fh.write(f"{net.n}\n")
        for i, j in net.edges:
            fh.write(f"{i + 1} {j + 1}\n")


def neighbor_sum(net, x, d=None):
    """
    Per-agent disagreement ``sum_{j in N_i} (x_j - x_i)``.

    Equals ``-(laplacian kron I_d) x`` without forming the Kronecker product.

    Parameters
    ----------
    net : Network
    x : ndarray
        Stacked vector of length ``n * d`` or an ``(n, d)`` array.
    d : int, optional
        Block size; required only to validate a flat ``x``.

    Returns
    -------
    ndarray
        Same shape as ``x``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        if d is None:
            d = x.shape[0] // net.n if net.n else 0
        if x.shape[0] != net.n * d:
            raise ValueError(f"stacked vector has length {x.shape[0]}, expected {net.n * d}")
        return -(net.laplacian @ x.reshape(net.n, d)).reshape(-1)
    if x.shape[0] != net.n or (d is not None and x.shape[1] != d):
        raise ValueError(f"block array has shape {x.shape}, expected ({net.n}, {d})")
    return -(net.laplacian @ x)
