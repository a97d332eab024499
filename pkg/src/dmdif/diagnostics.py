"""
Lyapunov function, optimality and consensus metrics, trajectory records.
"""

from dataclasses import dataclass, field
import csv
import io
import math
from typing import NamedTuple

import numpy as np

from .linalg import pinv_psd

#: CSV columns, in order
COLUMNS = ("k", "t", "gap_agent1", "log_gap", "consensus_err", "dist_agent1",
           "lyapunov", "lyapunov_rate")

LOG_FLOOR = 1e-300


@dataclass
class TrajectoryRecord:
    """
    Time series of per-sample diagnostics for one run.

    ``rows`` hold the :data:`COLUMNS` plus ``y_drift`` (norm of the block
    sum of ``y``); undefined diagnostics are ``None``.
    """

    meta: dict
    rows: list = field(default_factory=list)
    final_state: object = None

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return np.array([np.nan if r.get(name) is None else r[name] for r in self.rows],
                        dtype=float)

    def write_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow(["" if r.get(c) is None else (str(r[c]) if c == "k" else repr(float(r[c])))
                        for c in COLUMNS])

    def to_csv(self, path=None):
        if path is None:
            buf = io.StringIO()
            self.write_csv(buf)
            return buf.getvalue()
        with open(path, "w", newline="") as fh:
            self.write_csv(fh)


@dataclass(frozen=True)
class LyapunovContext:
    """
    Equilibrium data for the Lyapunov function.

    ``l_pinv`` is the pseudo-inverse of the ``n x n`` graph Laplacian; the
    pseudo-inverse of ``laplacian kron I_d`` is ``l_pinv kron I_d`` and is
    applied blockwise.
    """

    x_star: np.ndarray
    z_star: np.ndarray
    y_star: np.ndarray
    laplacian: np.ndarray
    l_pinv: np.ndarray


def build_context(p, net, mmap):
    """
    Equilibrium ``x_i = x*``, ``z_i = grad phi(x*)``, ``y = -grad f(1 kron x*)``.

    Raises
    ------
    DomainError
        If ``x*`` is outside the mirror map's domain.
    """
    if net.n != p.n:
        raise ValueError(f"network has {net.n} agents, problem has {p.n}")
    xs = np.tile(p.x_star, (p.n, 1))
    zs = mmap.grad(xs)
    ys = -p.stacked_grad(xs)
    scale = 1.0 + float(np.max(np.abs(ys)))
    assert np.linalg.norm(ys.sum(axis=0)) <= 1e-8 * scale, "y* must have zero block sum"
    return LyapunovContext(xs, zs, ys, net.laplacian, pinv_psd(net.laplacian))


def lyapunov(ctx, mmap, s):
    """
    ``V = sum_i D_{phi*}(z_i, z*) + 0.5 ytil^T L^+ ytil`` with ``ytil = y - y*``.

    The second term equals half the squared norm of the shifted integral
    state ``w``: ``ytil = L^{1/2} wtil`` and both lie in the range of ``L``.
    """
    yt = s.y - ctx.y_star
    return float(np.sum(mmap.bregman_dual(s.z, ctx.z_star))
                 + 0.5 * np.sum(yt * (ctx.l_pinv @ yt)))


def lyapunov_rate_expression(p, ctx, s):
    """
    Analytic time derivative of :func:`lyapunov` along the flow:
    ``-<xtil, grad f(x) - grad f(x*)> - xtil^T L xtil``.
    """
    xt = s.x - ctx.x_star
    # grad f(x*) = -y*
    g = p.stacked_grad(s.x) + ctx.y_star
    return float(-np.sum(xt * g) - np.sum(xt * (ctx.laplacian @ xt)))


def consensus_error(x):
    """``max_i ||x_i - mean_j x_j||``; accepts a state or an ``(n, d)`` array."""
    x = getattr(x, "x", x)
    x = np.atleast_2d(x)
    return float(np.max(np.linalg.norm(x - x.mean(axis=0), axis=1)))


def y_drift(y):
    """Norm of the block sum ``(1 kron I)^T y``; zero along exact integral feedback."""
    return float(np.linalg.norm(np.atleast_2d(y).sum(axis=0)))


def sample(p, mmap, s, ctx=None):
    """One record row at state ``s`` (``lyapunov_rate`` is filled in by the caller)."""
    gap = p.global_gap(s.x[0])
    return {
        "k": int(s.k),
        "t": float(s.t),
        "gap_agent1": gap,
        "log_gap": math.log(max(gap, LOG_FLOOR)),
        "consensus_err": consensus_error(s.x),
        "dist_agent1": float(np.linalg.norm(s.x[0] - p.x_star)),
        "lyapunov": None if ctx is None else lyapunov(ctx, mmap, s),
        "lyapunov_rate": None,
        "y_drift": y_drift(s.y),
        "y_norm": float(np.linalg.norm(s.y)),
    }


class RateFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float


def linear_rate_fit(rec, window=None):
    """
    Least-squares line through ``log_gap`` versus ``k``.

    Parameters
    ----------
    rec : TrajectoryRecord
    window : slice or (int, int), optional
        Sample range to fit; defaults to every sample.

    Raises
    ------
    ValueError
        If any gap in the window is not positive (the run converged to the
        floor; shrink the window), or fewer than two samples are selected.
    """
    if window is None:
        window = slice(None)
    elif not isinstance(window, slice):
        window = slice(*window)
    rows = rec.rows[window]
    if len(rows) < 2:
        raise ValueError("rate fit needs at least two samples")
    gaps = np.array([r["gap_agent1"] for r in rows])
    if np.any(gaps <= 0):
        raise ValueError("non-positive gap inside the fit window; shrink the window")
    k = np.array([r["k"] for r in rows], dtype=float)
    lg = np.log(gaps)
    design = np.column_stack([k, np.ones_like(k)])
    (slope, icpt), *_ = np.linalg.lstsq(design, lg, rcond=None)
    ss_res = float(np.sum((lg - design @ [slope, icpt]) ** 2))
    ss_tot = float(np.sum((lg - lg.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return RateFit(float(slope), float(icpt), r2)


def middle_window(rec, frac=0.6):
    """Slice covering the middle ``frac`` of the samples."""
    m = len(rec)
    lo = int(round(m * (1 - frac) / 2))
    return slice(lo, m - lo)
