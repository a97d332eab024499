import json

import numpy as np
import pytest

from dmdif import graph, harness, mirror, objective


def small_config(tmp_path=None, **kw):
    cfg = dict(
        seed=3,
        graph={"kind": "cycle", "n": 5},
        problem={"kind": "generate", "d": 8, "rows": 4, "rank": 3, "center": 10.0,
                 "spectral_norm": 2.0},
        map="negative-entropy",
        algorithms=[{"variant": "dmd-if", "dt": 1e-2},
                    {"variant": "dmd-plain-constant", "dt": 1e-2},
                    {"variant": "dmd-plain-diminishing", "dt": 1e-2}],
        steps=300,
        record_every=10,
        out_dir=None if tmp_path is None else str(tmp_path),
    )
    cfg.update(kw)
    return harness.ExperimentConfig.from_dict(cfg)


def test_preset():
    cfg = harness.preset_paper_experiment()
    setup = harness.Setup(cfg)
    assert (setup.problem.n, setup.problem.d) == (10, 100)
    assert setup.net.edges == graph.cycle(10).edges
    assert isinstance(setup.map, mirror.NegativeEntropy)
    assert [a["dt"] for a in cfg.algorithms] == [1e-2] * 3
    assert [a["variant"] for a in cfg.algorithms] == [
        "dmd-if", "dmd-plain-constant", "dmd-plain-diminishing"]
    assert cfg.seed == harness.DEFAULT_SEED and cfg.steps == 5000


def test_random_feasible_init():
    ent, euc = mirror.NegativeEntropy(4), mirror.Euclidean(4)
    x = harness.random_feasible_init(ent, 3, 4, 7)
    assert np.all(x > 5) and np.all(x < 15)
    assert np.array_equal(x, harness.random_feasible_init(ent, 3, 4, 7))
    draws = {harness.random_feasible_init(ent, 3, 4, s).tobytes() for s in range(100)}
    assert len(draws) == 100
    g = harness.random_feasible_init(euc, 200, 4, 0)
    assert abs(g.mean()) < 0.2 and np.any(g < 0)


def test_run_experiment_shared_start(tmp_path):
    res = harness.run_experiment(small_config(tmp_path))
    assert res.ok
    starts = {rec.rows[0]["gap_agent1"] for rec in res.records.values()}
    assert len(starts) == 1
    for name in ("dmd-if", "dmd-plain-constant", "dmd-plain-diminishing"):
        assert (tmp_path / f"{name}.csv").exists()
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert set(man["hashes"]) == {"config", "instance", "graph", "x0"}
    assert man["variants"]["dmd-if"]["status"] == "ok"
    assert man["variants"]["dmd-if"]["final_gap"] < man["variants"]["dmd-if"]["initial_gap"]


def test_config_hash_stable(tmp_path):
    a = harness.run_experiment(small_config(tmp_path / "a"))
    b = harness.run_experiment(small_config(tmp_path / "b"))
    assert a.manifest["hashes"] == b.manifest["hashes"]
    assert small_config().digest() != small_config(seed=4).digest()
    for name in a.records:
        assert (tmp_path / "a" / f"{name}.csv").read_bytes() == (tmp_path / "b" / f"{name}.csv").read_bytes()


def test_concurrent_variants_match_sequential():
    seq = harness.run_experiment(small_config())
    par = harness.run_experiment(small_config(), workers=3)
    for name in seq.records:
        assert seq.records[name].to_csv() == par.records[name].to_csv()


def test_divergence_keeps_partial_results(tmp_path):
    cfg = small_config(tmp_path, algorithms=[{"variant": "dmd-plain-constant", "dt": 1e-2},
                                             {"variant": "dmd-if", "dt": 5.0}])
    res = harness.run_experiment(cfg)
    assert not res.ok
    v = res.manifest["variants"]
    assert v["dmd-plain-constant"]["status"] == "ok"
    assert v["dmd-if"]["status"] == "diverged" and "non-finite" in v["dmd-if"]["error"]
    assert (tmp_path / "dmd-if.csv").exists() and (tmp_path / "dmd-plain-constant.csv").exists()


@pytest.mark.parametrize("change", [
    {"map": "tsallis"},
    {"steps": 0},
    {"record_every": 0},
    {"algorithms": []},
    {"algorithms": [{"variant": "dmd-if", "dt": -1.0}]},
    {"graph": {"kind": "cycle", "n": 6}, "problem": {"kind": "generate", "n": 5, "d": 8, "rows": 4, "rank": 3}},
    {"graph": {"kind": "star"}},
    {"problem": {"kind": "generate", "d": 8, "rows": 2, "rank": 1}},
    {"init": {"kind": "magic"}},
])
def test_config_validation(change):
    with pytest.raises(harness.ConfigError):
        harness.Setup(small_config(**change))


def test_unknown_config_key():
    with pytest.raises(harness.ConfigError):
        harness.ExperimentConfig.from_dict({"seed": 1, "colour": "red"})


def test_entropy_needs_positive_optimum(tmp_path):
    p = objective.build_instance([[[1.0]], [[1.0]]], [[-1.0], [-3.0]])
    p.save(tmp_path / "neg.json")
    cfg = small_config(graph={"kind": "edge_list", "path": str(tmp_path / "g.txt")},
                       problem={"kind": "file", "path": str(tmp_path / "neg.json")})
    (tmp_path / "g.txt").write_text("2\n1 2\n")
    with pytest.raises(harness.ConfigError, match="reseed"):
        harness.Setup(cfg)
    cfg.map = "euclidean"
    assert harness.Setup(cfg).problem.x_star[0] == pytest.approx(-2.0)


def test_files_for_graph_problem_and_init(tmp_path):
    p = objective.generate_paper_instance(9, n=4, d=5, rows=3, rank=3, center=10.0, spectral_norm=2.0)
    p.save(tmp_path / "p.json")
    (tmp_path / "g.txt").write_text("4\n1 2\n2 3\n3 4\n")
    x0 = np.full((4, 5), 10.0)
    (tmp_path / "x0.json").write_text(json.dumps(x0.tolist()))
    cfg = small_config(tmp_path / "out",
                       graph={"kind": "edge_list", "path": str(tmp_path / "g.txt")},
                       problem={"kind": "file", "path": str(tmp_path / "p.json")},
                       init={"kind": "file", "path": str(tmp_path / "x0.json")})
    res = harness.run_experiment(cfg)
    assert res.ok
    assert res.manifest["hashes"]["instance"] == p.digest()
    assert res.records["dmd-if"].rows[0]["dist_agent1"] == pytest.approx(np.linalg.norm(10.0 - p.x_star))
