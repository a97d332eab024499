"""
Runtime invariant suite behind ``dmdif check``.

Each check returns a :class:`CheckResult`; none of them depend on pytest.
"""

from typing import NamedTuple

import numpy as np

from . import diagnostics, dynamics, graph, mirror, objective
from .linalg import pinv_psd


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def _rel(a, b):
    return float(np.max(np.abs(a - b) / (1.0 + np.abs(b))))


def check_conjugacy(rng, points=1000, d=20):
    worst = 0.0
    for mm in (mirror.Euclidean(d), mirror.NegativeEntropy(d)):
        x = rng.uniform(0.05, 20.0, (points, d))
        z = rng.normal(0.0, 3.0, (points, d))
        worst = max(worst, _rel(mm.conj_grad(mm.grad(x)), x), _rel(mm.grad(mm.conj_grad(z)), z))
    return CheckResult("conjugacy round trip", worst <= 1e-10, f"max rel err {worst:.2e}")


def check_gradients(rng, points=100, d=8, h=1e-6):
    def fd(f, x):
        e = np.eye(x.size) * h
        return np.array([(f(x + ei) - f(x - ei)) / (2 * h) for ei in e])

    p = objective.generate_paper_instance(7, n=3, d=d, rows=5, rank=4, spectral_norm=1.0)
    worst = 0.0
    for _ in range(points):
        x = rng.uniform(0.5, 2.0, d)
        i = int(rng.integers(p.n))
        loc = p.locals[i]
        g = p.local_grad(i, x)
        worst = max(worst, np.linalg.norm(fd(loc.value, x) - g) / max(1.0, np.linalg.norm(g)))
        for mm in (mirror.Euclidean(d), mirror.NegativeEntropy(d)):
            g = mm.grad(x)
            worst = max(worst, np.linalg.norm(fd(mm.phi, x) - g) / max(1.0, np.linalg.norm(g)))
            g = mm.conj_grad(x)
            worst = max(worst, np.linalg.norm(fd(mm.conj, x) - g) / max(1.0, np.linalg.norm(g)))
    return CheckResult("finite-difference gradients", worst <= 1e-5, f"max rel err {worst:.2e}")


def check_laplacian():
    net = graph.cycle(10)
    expect = np.sort(2 - 2 * np.cos(2 * np.pi * np.arange(10) / 10))
    err = float(np.max(np.abs(net.eigenvalues - expect)))
    lp = pinv_psd(net.laplacian)
    mp = float(np.linalg.norm(net.laplacian @ lp @ net.laplacian - net.laplacian))
    ok = err <= 1e-10 and net.algebraic_connectivity > 0 and mp <= 1e-9
    return CheckResult("cycle(10) spectrum", ok,
                       f"eig err {err:.2e}, lambda2 {net.algebraic_connectivity:.5f}, LL+L err {mp:.2e}")


def check_equilibrium(seeds=range(10), dt=1e-2):
    net = graph.cycle(10)
    worst = 0.0
    for seed in seeds:
        p = objective.generate_paper_instance(seed)
        mm = mirror.NegativeEntropy(p.d)
        ctx = diagnostics.build_context(p, net, mm)
        s = dynamics.equilibrium_state(p, mm, ctx)
        dz, dy = dynamics.vector_field_dmd_if(p, net, s)
        bound = 1e-8 * (1 + np.linalg.norm(ctx.y_star))
        worst = max(worst, (np.linalg.norm(dz) + np.linalg.norm(dy)) / bound)
        s1 = dynamics.euler_step(p, net, mm, dynamics.AlgorithmSpec("dmd-if", dt), s)
        move = np.linalg.norm(s1.z - s.z) + np.linalg.norm(s1.y - s.y)
        worst = max(worst, move / (1e-8 * dt))
    return CheckResult("equilibrium fixed point", worst <= 1.0, f"worst residual/bound {worst:.2e}")


def check_lyapunov(rng, states=200, horizon=2.0):
    net = graph.cycle(10)
    p = objective.generate_paper_instance(42)
    mm = mirror.NegativeEntropy(p.d)
    ctx = diagnostics.build_context(p, net, mm)
    worst_rate, min_v = -np.inf, np.inf
    for _ in range(states):
        x = rng.uniform(5.0, 15.0, (p.n, p.d))
        y = net.laplacian @ rng.normal(0.0, 10.0, (p.n, p.d))
        s = dynamics.NetworkState(mm.grad(x), y, x)
        min_v = min(min_v, diagnostics.lyapunov(ctx, mm, s))
        worst_rate = max(worst_rate, diagnostics.lyapunov_rate_expression(p, ctx, s))
    spec = dynamics.AlgorithmSpec("dmd-if", 1e-3, integrator="rk4")
    x0 = rng.uniform(5.0, 15.0, (p.n, p.d))
    rec = dynamics.run(p, net, mm, spec, dynamics.init_state(p, mm, x0), int(round(horizon / 1e-3)),
                       10, ctx)
    v = rec.column("lyapunov")
    rises = int(np.sum(np.diff(v) > 1e-8 * (1 + v[:-1])))
    ok = min_v >= 0 and worst_rate <= 1e-10 and rises == 0 and v.min() >= 0
    return CheckResult("Lyapunov sign and decrease", ok,
                       f"min V {min_v:.2e}, max Vdot {worst_rate:.2e}, increases {rises}")


def check_reductions(rng, steps=50):
    p = objective.generate_paper_instance(3, n=1, d=5, rows=5, rank=5)
    net = graph.from_edge_list(1, [])
    mm = mirror.NegativeEntropy(p.d)
    s = t = dynamics.init_state(p, mm, rng.uniform(5, 15, (1, p.d)))
    dist = dynamics.AlgorithmSpec("dmd-if", 1e-2)
    cent = dynamics.AlgorithmSpec("centralized-md", 1e-2)
    worst = 0.0
    for _ in range(steps):
        s = dynamics.step(p, net, mm, dist, s)
        t = dynamics.step(p, net, mm, cent, t)
        worst = max(worst, float(np.max(np.abs(s.x - t.x))))
    return CheckResult("single-agent reduction", worst <= 1e-12, f"max deviation {worst:.2e}")


def run_all(seed=0):
    rng = np.random.default_rng(seed)
    return [
        check_conjugacy(rng),
        check_gradients(rng),
        check_laplacian(),
        check_equilibrium(),
        check_lyapunov(rng),
        check_reductions(rng),
    ]
