"""
Command-line entry point.

Exit codes: 0 success, 1 validation error, 2 numerical divergence, 3 I/O error.
"""

import argparse
import json
import logging
import sys

from . import checks, harness, objective
from .graph import DisconnectedGraphError
from .mirror import DomainError

log = logging.getLogger("dmdif")

EXIT_OK, EXIT_INVALID, EXIT_DIVERGED, EXIT_IO = 0, 1, 2, 3


def _report(result):
    for name, v in result.manifest["variants"].items():
        if v["status"] != "ok":
            print(f"{name}: {v['status']} ({v.get('error', '')})")
            continue
        print(f"{name}: gap {v['initial_gap']:.4g} -> {v['final_gap']:.4g}, "
              f"consensus err {v['final_consensus_err']:.3g}")
    return EXIT_OK if result.ok else EXIT_DIVERGED


def cmd_generate(args):
    p = objective.generate_paper_instance(args.seed, n=args.n, d=args.d, rows=args.rows,
                                          rank=args.rank, center=args.center,
                                          spectral_norm=args.spectral_norm)
    p.save(args.out)
    print(f"wrote {args.out}: n={p.n} d={p.d} F*={p.f_star:.6g} "
          f"eig(A^T A) in [{p.eig_min:.3g}, {p.eig_max:.3g}]")
    return EXIT_OK


def cmd_run(args):
    cfg = harness.ExperimentConfig.load(args.config)
    if args.out:
        cfg.out_dir = args.out
    return _report(harness.run_experiment(cfg, workers=args.workers))


def cmd_paper(args):
    cfg = harness.preset_paper_experiment(seed=args.seed, steps=args.steps, out_dir=args.out)
    return _report(harness.run_experiment(cfg, workers=args.workers))


def cmd_check(args):
    results = checks.run_all(args.seed)
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVALID


def build_parser():
    ap = argparse.ArgumentParser(prog="dmdif", description=__doc__.splitlines()[1])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="emit a random problem instance as JSON")
    g.add_argument("--seed", type=int, default=harness.DEFAULT_SEED)
    g.add_argument("--out", required=True)
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--d", type=int, default=100)
    g.add_argument("--rows", type=int, default=20)
    g.add_argument("--rank", type=int, default=15)
    g.add_argument("--center", type=float, default=10.0)
    g.add_argument("--spectral-norm", type=float, default=3.5)
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run an experiment from a JSON config")
    r.add_argument("--config", required=True)
    r.add_argument("--out")
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=cmd_run)

    p = sub.add_parser("paper", help="run the benchmark comparison preset")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=harness.DEFAULT_SEED)
    p.add_argument("--steps", type=int, default=harness.PRESET_STEPS)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_paper)

    c = sub.add_parser("check", help="run the invariant suite")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_check)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, TypeError, json.JSONDecodeError,
            DisconnectedGraphError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
