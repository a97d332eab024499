"""
Mirror maps: generating functions, their conjugates and Bregman divergences.

Every evaluator works on the last axis, so a ``(n, d)`` array of agent blocks
is handled blockwise; scalar-valued functions return one value per block.
"""

import numpy as np


class DomainError(ValueError):
    """A point lies outside the primal domain of a mirror map."""


class MirrorMap:
    """
    Base class for a generating function ``phi`` on ``R^d``.

    Subclasses implement ``phi``, ``grad``, ``conj`` and ``conj_grad``; the
    Bregman divergences fall out of those but may be overridden with
    numerically stabler closed forms.

    Attributes
    ----------
    name : str
    dim : int
    modulus : float
        Declared strong-convexity modulus of ``phi`` (reporting only).
    """

    name = "abstract"

    def __init__(self, dim, modulus):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self.dim = int(dim)
        self.modulus = float(modulus)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, modulus={self.modulus:.4g})"

    def in_domain(self, x):
        return bool(np.all(np.isfinite(x)))

    def check_domain(self, x):
        if not self.in_domain(x):
            raise DomainError(f"point outside the domain of the {self.name} map")

    def phi(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError

    def conj(self, z):
        raise NotImplementedError

    def conj_grad(self, z):
        raise NotImplementedError

    def bregman_primal(self, x, xp):
        """``phi(x) - phi(xp) - <grad phi(xp), x - xp>``."""
        x, xp = np.asarray(x, float), np.asarray(xp, float)
        self.check_domain(x)
        self.check_domain(xp)
        return self.phi(x) - self.phi(xp) - np.sum(self.grad(xp) * (x - xp), axis=-1)

    def bregman_dual(self, z, zp):
        """``phi*(z) - phi*(zp) - <grad phi*(zp), z - zp>``."""
        z, zp = np.asarray(z, float), np.asarray(zp, float)
        return self.conj(z) - self.conj(zp) - np.sum(self.conj_grad(zp) * (z - zp), axis=-1)


class Euclidean(MirrorMap):
    """``phi(x) = 0.5 ||x||^2``; mirror descent reduces to gradient descent."""

    name = "euclidean"

    def __init__(self, dim):
        super().__init__(dim, 1.0)

    def phi(self, x):
        return 0.5 * np.sum(np.square(x), axis=-1)

    def grad(self, x):
        return np.array(x, dtype=float)

    conj = phi
    conj_grad = grad

    def bregman_primal(self, x, xp):
        return 0.5 * np.sum(np.square(np.subtract(x, xp, dtype=float)), axis=-1)

    def bregman_dual(self, z, zp):
        return 0.5 * np.sum(np.square(np.subtract(z, zp, dtype=float)), axis=-1)


class NegativeEntropy(MirrorMap):
    """
    ``phi(x) = sum_j x_j log x_j`` on the open positive orthant.

    ``grad phi(x) = 1 + log x`` and ``grad phi*(z) = exp(z - 1)``. The
    conjugate has full domain, so dual-side evaluations never fail.

    Parameters
    ----------
    dim : int
    box : (float, float), optional
        Bounding box of the region of interest; the reported modulus is the
        smallest strong-convexity ratio observed there.
    """

    name = "negative-entropy"

    def __init__(self, dim, box=(1e-2, 30.0)):
        self.box = tuple(float(b) for b in box)
        super().__init__(dim, 1.0)
        self.modulus = observed_modulus(self, *self.box)

    def in_domain(self, x):
        x = np.asarray(x)
        return bool(np.all(np.isfinite(x)) and np.all(x > 0))

    def phi(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("negative entropy is undefined for negative entries")
        # 0 log 0 = 0 on the boundary
        return np.sum(np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0), axis=-1)

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(x > 0):
            raise DomainError("grad of negative entropy needs strictly positive entries")
        return 1.0 + np.log(x)

    def conj(self, z):
        return np.sum(np.exp(np.asarray(z, dtype=float) - 1.0), axis=-1)

    def conj_grad(self, z):
        return np.exp(np.asarray(z, dtype=float) - 1.0)

    def bregman_primal(self, x, xp):
        # generalized KL: sum x log(x/xp) - x + xp
        x, xp = np.asarray(x, float), np.asarray(xp, float)
        self.check_domain(x)
        self.check_domain(xp)
        return np.sum(x * np.log(x / xp) - x + xp, axis=-1)

    def bregman_dual(self, z, zp):
        # exp(zp-1) * (e^h - 1 - h) with h = z - zp, cancellation-free near h = 0
        z, zp = np.asarray(z, float), np.asarray(zp, float)
        h = z - zp
        return np.sum(np.exp(zp - 1.0) * (np.expm1(h) - h), axis=-1)


def observed_modulus(mmap, lo, hi, samples=2000, seed=0):
    """
    Smallest observed ratio ``2 D_phi(x, x') / ||x - x'||^2`` over a box.

    Pairs are drawn uniformly from ``[lo, hi]^d`` with a fixed seed, so the
    value is deterministic.
    """
    rng = np.random.default_rng(seed)
    x = rng.uniform(lo, hi, (samples, mmap.dim))
    xp = rng.uniform(lo, hi, (samples, mmap.dim))
    sq = np.sum((x - xp) ** 2, axis=-1)
    ok = sq > 0
    return float(np.min(2.0 * mmap.bregman_primal(x[ok], xp[ok]) / sq[ok]))


MAPS = {"euclidean": Euclidean, "negative-entropy": NegativeEntropy}


def euclidean(d):
    return Euclidean(d)


def negative_entropy(d, **kw):
    return NegativeEntropy(d, **kw)


def get_map(name, d):
    """Mirror map by CLI name: ``euclidean`` or ``negative-entropy``."""
    try:
        return MAPS[name](d)
    except KeyError:
        raise ValueError(f"unknown mirror map {name!r}; choose from {sorted(MAPS)}") from None


def bregman_primal(mmap, x, xp):
    return mmap.bregman_primal(x, xp)


def bregman_dual(mmap, z, zp):
    return mmap.bregman_dual(z, zp)
