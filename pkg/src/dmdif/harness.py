"""
Experiment configuration, orchestration and export.

A config is a JSON document mirroring :class:`ExperimentConfig`::

    {
      "seed": 42,
      "graph": {"kind": "cycle", "n": 10},            # or {"kind": "edge_list", "path": "g.txt"}
      "problem": {"kind": "generate", "n": 10, "d": 100, "rows": 20,
                  "rank": 15, "center": 10.0, "spectral_norm": 3.5},
                                                      # or {"kind": "file", "path": "problem.json"}
      "map": "negative-entropy",
      "algorithms": [{"variant": "dmd-if", "dt": 0.01}, ...],
      "steps": 5000,
      "record_every": 10,
      "init": {"kind": "random", "seed": null},       # or {"kind": "file", "path": "x0.json"}
      "out_dir": "out"
    }

``init.seed = null`` derives the initial-point stream from ``[seed, 1]``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
import hashlib
import json
import os

import numpy as np

from . import diagnostics, dynamics, graph, mirror, objective

DEFAULT_SEED = 42
PRESET_STEPS = 5000


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    seed: int = DEFAULT_SEED
    graph: dict = field(default_factory=lambda: {"kind": "cycle", "n": 10})
    problem: dict = field(default_factory=lambda: {"kind": "generate"})
    map: str = "negative-entropy"
    algorithms: list = field(default_factory=list)
    steps: int = PRESET_STEPS
    record_every: int = 10
    init: dict = field(default_factory=lambda: {"kind": "random", "seed": None})
    out_dir: str = None

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return asdict(self)

    def digest(self):
        """SHA-256 of the canonical JSON config, ignoring ``out_dir``."""
        d = self.to_dict()
        d.pop("out_dir", None)
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()

    def specs(self):
        try:
            return [dynamics.AlgorithmSpec(**a) for a in self.algorithms]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad algorithm entry: {exc}") from None


def preset_paper_experiment(seed=DEFAULT_SEED, steps=PRESET_STEPS, out_dir=None):
    """
    The benchmark comparison: 10-agent cycle, negative-entropy map,
    ``d = 100`` rank-15 least squares, ``dt = 1e-2``, integral feedback against
    plain distributed mirror descent with constant and ``1/sqrt(k)`` steps.
    """
    return ExperimentConfig(
        seed=seed,
        graph={"kind": "cycle", "n": 10},
        problem={"kind": "generate", "n": 10, "d": 100, "rows": 20, "rank": 15,
                 "center": 10.0, "spectral_norm": 3.5},
        map="negative-entropy",
        algorithms=[{"variant": v, "dt": 1e-2} for v in
                    ("dmd-if", "dmd-plain-constant", "dmd-plain-diminishing")],
        steps=steps,
        record_every=10,
        init={"kind": "random", "seed": None},
        out_dir=out_dir,
    )


def random_feasible_init(mmap, n, d, seed, center=10.0):
    """
    Random starting point inside the map's domain.

    Euclidean: standard Gaussian blocks. Negative entropy: entries uniform in
    ``(0.5 center, 1.5 center)``, the scale of the benchmark optimum.
    """
    rng = np.random.default_rng(seed)
    if isinstance(mmap, mirror.NegativeEntropy):
        return rng.uniform(0.5 * center, 1.5 * center, (n, d))
    return rng.standard_normal((n, d))


def _digest(arr):
    return hashlib.sha256(np.ascontiguousarray(arr, dtype="<f8").tobytes()).hexdigest()


class Setup:
    """Materialized network, problem, map and shared initial point of a config."""

    def __init__(self, cfg):
        self.cfg = cfg
        if not isinstance(cfg.steps, int) or cfg.steps < 1:
            raise ConfigError("steps must be a positive integer")
        if not isinstance(cfg.record_every, int) or cfg.record_every < 1:
            raise ConfigError("record_every must be a positive integer")
        self.specs = cfg.specs()
        if not self.specs:
            raise ConfigError("config lists no algorithms")

        g = cfg.graph
        try:
            if g.get("kind") == "cycle":
                self.net = graph.cycle(int(g["n"]))
            elif g.get("kind") == "edge_list":
                self.net = graph.read_edge_list(g["path"])
            else:
                raise ConfigError(f"unknown graph kind {g.get('kind')!r}")
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"graph: {exc}") from None

        pr = cfg.problem
        if pr.get("kind") == "generate":
            params = {k: v for k, v in pr.items() if k != "kind"}
            params.setdefault("n", self.net.n)
            try:
                self.problem = objective.generate_paper_instance(cfg.seed, **params)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"problem: {exc}") from None
        elif pr.get("kind") == "file":
            self.problem = objective.load(pr["path"])
        else:
            raise ConfigError(f"unknown problem kind {pr.get('kind')!r}")
        if self.problem.n != self.net.n:
            raise ConfigError(f"graph has {self.net.n} agents but the problem has {self.problem.n}")

        try:
            self.map = mirror.get_map(cfg.map, self.problem.d)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.map.in_domain(self.problem.x_star):
            raise ConfigError(f"optimum lies outside the {cfg.map} domain; reseed the problem")

        ini = cfg.init
        if ini.get("kind") == "random":
            sub = ini.get("seed")
            sub = [cfg.seed, 1] if sub is None else sub
            center = float(self.problem.meta.get("center", 10.0))
            self.x0 = random_feasible_init(self.map, self.problem.n, self.problem.d, sub, center)
        elif ini.get("kind") == "file":
            with open(ini["path"]) as fh:
                self.x0 = np.asarray(json.load(fh), dtype=float).reshape(self.problem.n, self.problem.d)
        else:
            raise ConfigError(f"unknown init kind {ini.get('kind')!r}")
        if not self.map.in_domain(self.x0):
            raise ConfigError(f"initial point lies outside the {cfg.map} domain")

    def hashes(self):
        return {"config": self.cfg.digest(), "instance": self.problem.digest(),
                "graph": self.net.digest(), "x0": _digest(self.x0)}


def _summary(rec, status):
    out = {"status": status, "samples": len(rec)}
    if not len(rec):
        return out
    first, last = rec.rows[0], rec.rows[-1]
    out.update(initial_gap=first["gap_agent1"], final_gap=last["gap_agent1"],
               final_consensus_err=last["consensus_err"], final_k=last["k"])
    try:
        fit = diagnostics.linear_rate_fit(rec, diagnostics.middle_window(rec))
        out.update(slope=fit.slope, r_squared=fit.r_squared)
    except ValueError:
        out.update(slope=None, r_squared=None)
    return out


class ExperimentResult:
    """Records per variant plus the manifest dictionary."""

    def __init__(self, records, manifest):
        self.records = records
        self.manifest = manifest

    @property
    def ok(self):
        return all(v["status"] == "ok" for v in self.manifest["variants"].values())


def run_experiment(cfg, workers=1):
    """
    Run every algorithm of ``cfg`` from the same instance, graph and ``x0``.

    Variants whose state blows up keep their partial record and are marked
    ``"diverged"`` in the manifest. When ``cfg.out_dir`` is set, one
    ``<variant>.csv`` per algorithm and ``manifest.json`` are written after
    all runs finish.

    Returns
    -------
    ExperimentResult
    """
    setup = Setup(cfg)
    p, net, mmap = setup.problem, setup.net, setup.map
    s0 = dynamics.init_state(p, mmap, setup.x0)
    ctx = diagnostics.build_context(p, net, mmap)

    def one(spec):
        try:
            rec = dynamics.run(p, net, mmap, spec, s0, cfg.steps, cfg.record_every, ctx,
                               meta={"seed": cfg.seed})
            return rec, "ok", None
        except dynamics.NumericalDivergence as exc:
            return exc.record, "diverged", str(exc)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            outcomes = list(pool.map(one, setup.specs))
    else:
        outcomes = [one(s) for s in setup.specs]

    records, variants = {}, {}
    for spec, (rec, status, err) in zip(setup.specs, outcomes):
        name = _label(spec, records)
        records[name] = rec
        variants[name] = _summary(rec, status)
        variants[name]["algorithm"] = spec.to_dict()
        if err:
            variants[name]["error"] = err

    manifest = {
        "config": cfg.to_dict(),
        "hashes": setup.hashes(),
        "problem": {"n": p.n, "d": p.d, "f_star": p.f_star, "eig_min": p.eig_min,
                    "eig_max": p.eig_max, "meta": p.meta},
        "map": {"name": mmap.name, "modulus": mmap.modulus},
        "graph": {"n": net.n, "edges": len(net.edges),
                  "algebraic_connectivity": net.algebraic_connectivity},
        "variants": variants,
    }
    result = ExperimentResult(records, manifest)
    if cfg.out_dir:
        write_outputs(result, cfg.out_dir)
    return result


def _label(spec, taken):
    name = spec.variant if spec.integrator == "euler" else f"{spec.variant}-{spec.integrator}"
    if name in taken:
        i = 2
        while f"{name}-{i}" in taken:
            i += 1
        name = f"{name}-{i}"
    return name


def write_outputs(result, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    for name, rec in result.records.items():
        rec.to_csv(os.path.join(out_dir, f"{name}.csv"))
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(result.manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
