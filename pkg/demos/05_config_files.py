"""
Driving an experiment from files: a saved problem, an edge list and a
JSON config, the same inputs the ``dmdif run`` command consumes.
"""

import json
import os
import tempfile

from dmdif import graph, harness, objective

work = tempfile.mkdtemp(prefix="dmdif-demo-")

p = objective.generate_paper_instance(7, n=6, d=20, rows=8, rank=6)
p.save(os.path.join(work, "problem.json"))
net = graph.from_edge_list(6, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1), (1, 4)])
graph.write_edge_list(net, os.path.join(work, "graph.txt"))

cfg = {
    "seed": 7,
    "graph": {"kind": "edge_list", "path": os.path.join(work, "graph.txt")},
    "problem": {"kind": "file", "path": os.path.join(work, "problem.json")},
    "map": "negative-entropy",
    "algorithms": [{"variant": "dmd-if", "dt": 0.01},
                   {"variant": "dmd-if", "dt": 0.01, "integrator": "rk4"},
                   {"variant": "dmd-plain-constant", "dt": 0.01}],
    "steps": 3000,
    "record_every": 50,
    "out_dir": os.path.join(work, "out"),
}
with open(os.path.join(work, "config.json"), "w") as fh:
    json.dump(cfg, fh, indent=2)

res = harness.run_experiment(harness.ExperimentConfig.load(os.path.join(work, "config.json")))
for name, v in res.manifest["variants"].items():
    print(f"{name:20s} {v['status']:8s} final gap {v['final_gap']:.3g}")
print("outputs:", sorted(os.listdir(cfg["out_dir"])))
