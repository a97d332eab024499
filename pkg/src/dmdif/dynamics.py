"""
Distributed mirror descent with integral feedback and its baselines.

The continuous-time flow over the stacked agent states is::

    dz/dt = -(grad f(x) + L x + y)
    dy/dt = L x
    x     = grad phi*(z)

with ``L = laplacian kron I_d`` and ``y(0) = 0``. States are ``(n, d)``
arrays, one row per agent; ``x`` is always recomputed from ``z`` and never
integrated on its own.
"""

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

from . import diagnostics

VARIANTS = ("dmd-if", "dmd-plain-constant", "dmd-plain-diminishing", "centralized-md")
INTEGRATORS = ("euler", "rk4")


class NumericalDivergence(RuntimeError):
    """A state entry became non-finite; ``record`` holds the samples taken so far."""

    def __init__(self, msg, step, record=None):
        super().__init__(msg)
        self.step = step
        self.record = record


@dataclass(frozen=True)
class NetworkState:
    """
    Stacked agent states at one instant.

    Attributes
    ----------
    z : ndarray, shape (n, d)
        Dual variables.
    y : ndarray, shape (n, d)
        Integral-feedback variables.
    x : ndarray, shape (n, d)
        Primal variables, ``grad phi*(z)``.
    t : float
        Simulated ODE time.
    k : int
        Step counter.
    """

    z: np.ndarray
    y: np.ndarray
    x: np.ndarray
    t: float = 0.0
    k: int = 0

    def stacked(self, name="x"):
        return getattr(self, name).reshape(-1)


@dataclass(frozen=True)
class AlgorithmSpec:
    """
    Which update to run and with what step size.

    ``exponent`` only affects ``dmd-plain-diminishing``, whose step at
    iteration ``k`` is ``dt / (k + 1) ** exponent``. ``integrator`` selects
    explicit Euler or classical RK4 for ``dmd-if``.
    """

    variant: str
    dt: float
    exponent: float = 0.5
    integrator: str = "euler"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if self.integrator == "rk4" and self.variant != "dmd-if":
            raise ValueError("rk4 is only available for dmd-if")
        if self.variant == "dmd-plain-diminishing" and not self.exponent > 0:
            raise ValueError("diminishing exponent must be positive")

    def step_size(self, k):
        if self.variant == "dmd-plain-diminishing":
            return self.dt / (k + 1) ** self.exponent
        return self.dt

    def to_dict(self):
        return {"variant": self.variant, "dt": self.dt, "exponent": self.exponent,
                "integrator": self.integrator}


class VectorField(NamedTuple):
    dz: np.ndarray
    dy: np.ndarray


def _state(mmap, z, y, t, k):
    return NetworkState(z, y, mmap.conj_grad(z), t, k)


def init_state(p, mmap, x0):
    """
    Start at ``x0`` with ``z = grad phi(x0)`` and ``y = 0``.

    ``x0`` may be a stacked ``n * d`` vector, an ``(n, d)`` array, or a
    single ``d``-vector used by every agent.

    Raises
    ------
    DomainError
        If some block of ``x0`` lies outside the map's domain.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim == 1 and x0.shape[0] == p.d:
        x0 = np.tile(x0, (p.n, 1))
    x0 = x0.reshape(-1, p.d)
    mmap.check_domain(x0)
    z = mmap.grad(x0)
    return _state(mmap, z, np.zeros_like(z), 0.0, 0)


def vector_field_dmd_if(p, net, s):
    """Right-hand side ``(dz, dy)`` of the integral-feedback flow at ``s``."""
    lx = net.laplacian @ s.x
    return VectorField(-(p.stacked_grad(s.x) + lx + s.y), lx)


def euler_step(p, net, mmap, spec, s):
    """
    One explicit Euler step of the integral-feedback flow.

    Both ``z`` and ``y`` are advanced from the current state (simultaneous
    update), then ``x`` is mapped back through ``grad phi*``.
    """
    dz, dy = vector_field_dmd_if(p, net, s)
    h = spec.dt
    return _state(mmap, s.z + h * dz, s.y + h * dy, s.t + h, s.k + 1)


def rk4_step(p, net, mmap, spec, s):
    """Classical fourth-order Runge-Kutta step; ``x`` is re-derived in every stage."""
    h = spec.dt

    def f(z, y):
        x = mmap.conj_grad(z)
        lx = net.laplacian @ x
        return -(p.stacked_grad(x) + lx + y), lx

    k1z, k1y = f(s.z, s.y)
    k2z, k2y = f(s.z + 0.5 * h * k1z, s.y + 0.5 * h * k1y)
    k3z, k3y = f(s.z + 0.5 * h * k2z, s.y + 0.5 * h * k2y)
    k4z, k4y = f(s.z + h * k3z, s.y + h * k3y)
    z = s.z + (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
    y = s.y + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    return _state(mmap, z, y, s.t + h, s.k + 1)


def step_plain(p, net, mmap, spec, s):
    """
    Distributed mirror descent without integral feedback: ``y`` stays zero and
    ``z <- z - dt_k (grad f(x) + L x)``.
    """
    h = spec.step_size(s.k)
    dz = -(p.stacked_grad(s.x) + net.laplacian @ s.x)
    return _state(mmap, s.z + h * dz, s.y, s.t + h, s.k + 1)


def step_centralized(p, net, mmap, spec, s):
    """
    Centralized mirror descent ``z <- z - dt grad F(x)``, ``x = grad phi*(z)``.

    Every agent row holds the same iterate; ``grad F`` is summed from the
    local gradients, so for a single agent this is bitwise the same update as
    the distributed variants.
    """
    h = spec.dt
    g = p.stacked_grad(np.broadcast_to(s.x[0], (p.n, p.d))).sum(axis=0)
    z = s.z - h * g
    return _state(mmap, z, s.y, s.t + h, s.k + 1)


def step(p, net, mmap, spec, s):
    """Advance ``s`` by one step of ``spec``."""
    if spec.variant == "dmd-if":
        fn = rk4_step if spec.integrator == "rk4" else euler_step
    elif spec.variant == "centralized-md":
        fn = step_centralized
    else:
        fn = step_plain
    return fn(p, net, mmap, spec, s)


def _finite(s):
    return bool(np.all(np.isfinite(s.z)) and np.all(np.isfinite(s.x)) and np.all(np.isfinite(s.y)))


def run(p, net, mmap, spec, s0, steps, record_every=1, ctx=None, meta=None):
    """
    Iterate ``spec`` from ``s0`` and record diagnostics.

    Samples are taken at ``k = 0`` and every ``record_every`` steps, plus the
    final step. For ``dmd-if`` the Lyapunov value is recorded (``ctx`` is
    built when not given) and the block sum of ``y`` is checked against
    ``1e-9 (1 + ||y||)``.

    Returns
    -------
    TrajectoryRecord

    Raises
    ------
    NumericalDivergence
        When a state entry becomes non-finite; the partial record is attached.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    if spec.variant == "centralized-md":
        s0 = _state(mmap, np.broadcast_to(s0.z[0], s0.z.shape).copy(), s0.y, s0.t, s0.k)
    if spec.variant == "dmd-if" and ctx is None:
        ctx = diagnostics.build_context(p, net, mmap)
    lyap_ctx = ctx if spec.variant == "dmd-if" else None

    info = dict(variant=spec.variant, dt=spec.dt, integrator=spec.integrator,
                n=p.n, d=p.d, map=mmap.name)
    info.update(meta or {})
    rec = diagnostics.TrajectoryRecord(info)

    def take(s):
        row = diagnostics.sample(p, mmap, s, lyap_ctx)
        if lyap_ctx is not None:
            if row["y_drift"] > 1e-9 * (1.0 + row["y_norm"]):
                raise AssertionError(f"y block sum drifted to {row['y_drift']:.3e} at step {s.k}")
            if rec.rows:
                prev = rec.rows[-1]
                row["lyapunov_rate"] = (row["lyapunov"] - prev["lyapunov"]) / (row["t"] - prev["t"])
        rec.rows.append(row)

    s = s0
    take(s)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(steps):
            s = step(p, net, mmap, spec, s)
            if not _finite(s):
                raise NumericalDivergence(
                    f"{spec.variant}: non-finite state at step {s.k} (dt={spec.dt} too large?)",
                    s.k, rec)
            if s.k % record_every == 0 or s.k == s0.k + steps:
                take(s)
    rec.final_state = s
    return rec


def equilibrium_state(p, mmap, ctx):
    """The fixed point of the integral-feedback flow as a :class:`NetworkState`."""
    return NetworkState(ctx.z_star.copy(), ctx.y_star.copy(), mmap.conj_grad(ctx.z_star))


def advance(p, net, mmap, spec, s, steps):
    """Take ``steps`` steps without recording; returns the final state."""
    for _ in range(steps):
        s = step(p, net, mmap, spec, s)
    return s
