"""
Local least-squares objectives, the global sum and the benchmark generator.

Each agent holds ``f_i(x) = 0.5 ||A_i x - b_i||^2``; the network minimizes
``F(x) = sum_i f_i(x)``. Local matrices are stored as one ``(n, m, d)``
array so stacked gradients are a pair of ``einsum`` calls.

Random instances draw from ``numpy.random.default_rng(seed)`` (PCG64) in a
fixed stream order: the centre vector ``u``, then the perturbations
``w_1 .. w_n``, then for each agent the two Gaussian factors ``G1`` (rows x
rank) and ``G2`` (rank x d).
"""

from dataclasses import dataclass, field
import hashlib
import json

import numpy as np

from .linalg import min_norm_lstsq, sym_eigen

FORMAT = "dmdif-problem/1"


class CertificateError(ValueError):
    """Generated instance fails a required property; try another seed."""


@dataclass(frozen=True)
class QuadraticObjective:
    """``f(x) = 0.5 ||a x - b||^2``."""

    a: np.ndarray
    b: np.ndarray

    def value(self, x):
        r = self.a @ x - self.b
        return 0.5 * float(r @ r)

    def grad(self, x):
        return self.a.T @ (self.a @ x - self.b)


@dataclass(frozen=True)
class ProblemInstance:
    """
    ``n`` local quadratics with the precomputed global optimum.

    Attributes
    ----------
    a : ndarray, shape (n, m, d)
    b : ndarray, shape (n, m)
    x_star : ndarray, shape (d,)
        Minimum-norm least-squares solution of the stacked system.
    f_star : float
        ``F(x_star)``.
    eig_min, eig_max : float
        Extreme eigenvalues of ``A^T A``; ``eig_min > 0`` certifies strong
        convexity of ``F``.
    meta : dict
        Generator parameters (seed, dims, ...), echoed into JSON.
    """

    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    x_star: np.ndarray = field(repr=False)
    f_star: float
    eig_min: float
    eig_max: float
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.a.shape[0]

    @property
    def d(self):
        return self.a.shape[2]

    @property
    def stacked_a(self):
        return self.a.reshape(-1, self.d)

    @property
    def stacked_b(self):
        return self.b.reshape(-1)

    @property
    def locals(self):
        return [QuadraticObjective(self.a[i], self.b[i]) for i in range(self.n)]

    def value(self, x):
        """Global objective ``F(x)``."""
        r = self.stacked_a @ x - self.stacked_b
        return 0.5 * float(r @ r)

    def grad(self, x):
        """Global gradient ``sum_i grad f_i(x)``."""
        return self.stacked_a.T @ (self.stacked_a @ x - self.stacked_b)

    def local_grad(self, i, x):
        """Gradient of agent ``i`` (0-indexed) at ``x``."""
        if not 0 <= i < self.n:
            raise IndexError(f"agent index {i} out of range for {self.n} agents")
        return self.a[i].T @ (self.a[i] @ x - self.b[i])

    def stacked_grad(self, x):
        """
        Blockwise local gradients ``col{grad f_1(x_1), ..., grad f_n(x_n)}``.

        ``x`` is either a stacked ``n * d`` vector or an ``(n, d)`` array; the
        result has the same shape.
        """
        x = np.asarray(x, dtype=float)
        flat = x.ndim == 1
        if flat:
            if x.shape[0] != self.n * self.d:
                raise ValueError(f"stacked vector has length {x.shape[0]}, expected {self.n * self.d}")
            x = x.reshape(self.n, self.d)
        elif x.shape != (self.n, self.d):
            raise ValueError(f"block array has shape {x.shape}, expected {(self.n, self.d)}")
        r = np.einsum("kij,kj->ki", self.a, x) - self.b
        g = np.einsum("kij,ki->kj", self.a, r)
        return g.reshape(-1) if flat else g

    def global_gap(self, x):
        """
        ``F(x) - F*``, evaluated as ``<grad F(x*), e> + 0.5 ||A e||^2``
        with ``e = x - x*`` to avoid cancellation between two large values.
        """
        e = np.asarray(x, dtype=float) - self.x_star
        ae = self.stacked_a @ e
        return float(self.grad(self.x_star) @ e + 0.5 * (ae @ ae))

    def digest(self):
        h = hashlib.sha256()
        for arr in (self.a, self.b):
            h.update(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        return h.hexdigest()

    def to_dict(self):
        return {
            "format": FORMAT,
            "meta": dict(self.meta),
            "certificate": {"eig_min": self.eig_min, "eig_max": self.eig_max},
            "x_star": self.x_star.tolist(),
            "f_star": self.f_star,
            "locals": [{"a": self.a[i].tolist(), "b": self.b[i].tolist()} for i in range(self.n)],
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)


def build_instance(a_list, b_list, meta=None):
    """
    Assemble a :class:`ProblemInstance` from per-agent ``(A_i, b_i)``.

    Agents with fewer rows are zero-padded, which leaves every ``f_i``
    unchanged. The optimum and the strong-convexity certificate are computed
    here.

    Raises
    ------
    CertificateError
        If ``A^T A`` is numerically singular.
    """
    a_list = [np.atleast_2d(np.asarray(a, dtype=float)) for a in a_list]
    b_list = [np.atleast_1d(np.asarray(b, dtype=float)) for b in b_list]
    if not a_list or len(a_list) != len(b_list):
        raise ValueError("need one (A_i, b_i) pair per agent")
    d = a_list[0].shape[1]
    m = max(a.shape[0] for a in a_list)
    a = np.zeros((len(a_list), m, d))
    b = np.zeros((len(a_list), m))
    for i, (ai, bi) in enumerate(zip(a_list, b_list)):
        if ai.shape[1] != d or bi.shape != (ai.shape[0],):
            raise ValueError(f"agent {i + 1}: A_i is {ai.shape}, b_i is {bi.shape}, d = {d}")
        a[i, :ai.shape[0]] = ai
        b[i, :ai.shape[0]] = bi
    a.setflags(write=False)
    b.setflags(write=False)

    big_a, big_b = a.reshape(-1, d), b.reshape(-1)
    w = sym_eigen(big_a.T @ big_a).eigenvalues
    if not w[0] > 1e-8 * w[-1]:
        raise CertificateError(
            f"global objective is not strongly convex (eig ratio {w[0] / w[-1]:.2e}); reseed")
    x_star = min_norm_lstsq(big_a, big_b)
    x_star.setflags(write=False)
    r = big_a @ x_star - big_b
    return ProblemInstance(a, b, x_star, 0.5 * float(r @ r), float(w[0]), float(w[-1]),
                           dict(meta or {}))


def generate_paper_instance(seed, n=10, d=100, rows=20, rank=15, center=10.0,
                            spectral_norm=3.5):
    """
    Random rank-deficient least-squares benchmark.

    Draws ``u ~ N(center 1, I)``, local optima ``u_i = u + w_i`` with
    ``w_i ~ N(0, I)``, and ``A_i = G1 G2`` with i.i.d. standard Gaussian
    factors, so each ``A_i`` has rank ``rank`` almost surely. Then
    ``b_i = A_i u_i``.

    Parameters
    ----------
    seed : int
    n, d, rows, rank : int
        Agents, dimension, rows per agent, rank of each ``A_i``.
    center : float
        Mean of every coordinate of ``u``.
    spectral_norm : float or None
        Each ``A_i`` is rescaled to this spectral norm (before forming
        ``b_i``). Unscaled factors make explicit Euler at ``dt = 1e-2``
        blow up under the entropy map; ``None`` keeps the raw product.

    Returns
    -------
    ProblemInstance
    """
    if not 1 <= rank <= min(rows, d):
        raise ValueError(f"rank must lie in [1, min(rows, d)] = [1, {min(rows, d)}]")
    rng = np.random.default_rng(seed)
    u = center + rng.standard_normal(d)
    w = [rng.standard_normal(d) for _ in range(n)]
    a_list, b_list = [], []
    for i in range(n):
        g1 = rng.standard_normal((rows, rank))
        g2 = rng.standard_normal((rank, d))
        ai = g1 @ g2
        if spectral_norm is not None:
            ai *= spectral_norm / np.linalg.norm(ai, 2)
        a_list.append(ai)
        b_list.append(ai @ (u + w[i]))
    meta = dict(seed=seed, n=n, d=d, rows=rows, rank=rank, center=center,
                spectral_norm=spectral_norm, rng="numpy PCG64")
    return build_instance(a_list, b_list, meta)


def from_dict(data):
    if data.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} document")
    a_list = [blk["a"] for blk in data["locals"]]
    b_list = [blk["b"] for blk in data["locals"]]
    return build_instance(a_list, b_list, data.get("meta"))


def load(path):
    with open(path) as fh:
        return from_dict(json.load(fh))


def local_grad(p, i, x):
    return p.local_grad(i, x)


def stacked_grad(p, x):
    return p.stacked_grad(x)


def global_gap(p, x):
    return p.global_gap(x)
