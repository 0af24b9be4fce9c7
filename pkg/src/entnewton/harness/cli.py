"""Command-line entry point: ``entnewton {gen,oracle,solve,sweep,check}``.

Exit codes: 0 success, 1 assertion failure, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ..errors import (
    ConfigError, ExpOverflowError, IndefiniteHessianError, InputShapeError,
    NumericalError, ParseError, VersionError,
)
from ..solver import SolverConfig, solve
from . import io
from .experiments import CAMPAIGNS, CheckConfig, ExperimentConfig, oracle_solution, run_check, run_sweep
from .instances import B_MODES, generate_instance

EXIT_OK, EXIT_ASSERT, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("entnewton")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_gen(args) -> int:
    p = generate_instance(args.n, args.d, args.R, args.seed, args.b_mode,
                          args.c_constant, args.l, gamma=args.gamma)
    path = io.save_instance(p, _out_dir(args) / args.name)
    for w in p.warnings:
        log.warning(w)
    print(path)
    return EXIT_OK


def cmd_oracle(args) -> int:
    p = io.load_instance(args.instance)
    if args.gamma is not None:
        p = p.with_gamma(args.gamma)
    x_star, gnorm, its = oracle_solution(p)
    meta = dict(p.metadata)
    meta["x_star"] = [float(v) for v in x_star]
    meta["x_star_grad_norm"] = gnorm
    meta["x_star_iterations"] = its
    target = Path(args.instance) if args.out is None else _out_dir(args) / Path(args.instance).name
    io.save_instance(p.replace(metadata=meta), target)
    print(f"{target}: grad norm {gnorm:.3e} after {its} iterations")
    return EXIT_OK


def cmd_solve(args) -> int:
    p = io.load_instance(args.instance)
    if args.gamma is not None:
        p = p.with_gamma(args.gamma)
    conf = SolverConfig(mode=args.mode, epsilon=args.eps, delta=args.delta,
                        epsilon0=args.epsilon0, max_iterations=args.max_iter, seed=args.seed)
    x_star = p.metadata.get("x_star")
    x0 = np.zeros(p.d) if args.x0 is None else np.array(args.x0, dtype=np.float64)
    x, trace = solve(p, x0, conf, x_star=x_star)
    out = _out_dir(args)
    io.save_trace(trace, out / "trace.csv")
    io.save_trace(trace, out / "trace.json")
    io.save_json({"x": x, "status": trace.status, "iterations": trace.iterations,
                  "config": conf.to_dict()}, out / "solution.json")
    print(f"{trace.status} after {trace.iterations} iterations, "
          f"grad norm {trace.records[-1].grad_norm:.3e}")
    return EXIT_NUMERIC if trace.status == "numerical_failure" else EXIT_OK


def cmd_sweep(args) -> int:
    obj = io.load_json(args.config) if args.config else {}
    cfg = ExperimentConfig.from_dict(obj)
    for key, attr in (("seed", "seed"), ("mode", "mode"), ("eps", "epsilon"),
                      ("delta", "delta"), ("c_constant", "C")):
        v = getattr(args, key)
        if v is not None:
            setattr(cfg, attr, v)
    if args.out is not None:
        cfg.out_dir = args.out
    res = run_sweep(cfg)
    path = io.atomic_write(Path(cfg.out_dir) / "sweep.csv", res.to_csv())
    print(path)
    return EXIT_OK


def cmd_check(args) -> int:
    obj = io.load_json(args.config) if args.config else {}
    cfg = CheckConfig.from_dict(obj)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.c_constant is not None:
        cfg.c_constant = args.c_constant
    if args.mutation is not None:
        cfg.mutation = args.mutation
    campaigns = tuple(args.campaigns.split(",")) if args.campaigns else CAMPAIGNS
    report = run_check(cfg, campaigns)
    path = io.save_json(report, _out_dir(args) / "report.json")
    for name, entry in report["campaigns"].items():
        for r in entry["records"]:
            flag = "FAIL" if r["failed"] else ("info" if r["kind"] == "info" else "ok")
            print(f"{flag:4} {name}/{r['name']}: {r['instances_checked']} checked, "
                  f"{r['skipped']} skipped, {r['violations']} violations")
    print(path)
    return report["exit_code"]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="entnewton", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a seeded instance")
    g.add_argument("--n", type=int, default=16)
    g.add_argument("--d", type=int, default=4)
    g.add_argument("--R", type=float, default=10.0)
    g.add_argument("--l", type=float, default=1.0)
    g.add_argument("--b-mode", choices=B_MODES, default="softmax_of_random_x")
    g.add_argument("--c-constant", type=float, choices=(10.0, 100.0, 200.0), default=10.0)
    g.add_argument("--gamma", type=float, default=None,
                   help="fix gamma; default sizes weights for every gamma")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=".")
    g.add_argument("--name", default="instance.json")
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("oracle", help="attach a high-accuracy minimizer to an instance")
    o.add_argument("instance")
    o.add_argument("--gamma", type=float, default=None)
    o.add_argument("--out", default=None, help="directory; default rewrites the instance")
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("solve", help="run one solve and write its trace")
    s.add_argument("instance")
    s.add_argument("--mode", choices=("exact", "approx"), default="exact")
    s.add_argument("--eps", type=float, default=1e-8)
    s.add_argument("--delta", type=float, default=0.01)
    s.add_argument("--epsilon0", type=float, default=0.01)
    s.add_argument("--max-iter", type=int, default=100)
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--x0", type=float, nargs="+", default=None)
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", help="solve over a gamma grid and write sweep.csv")
    w.add_argument("--config", default=None, help="experiment config JSON")
    w.add_argument("--seed", type=int, default=None)
    w.add_argument("--mode", choices=("exact", "approx"), default=None)
    w.add_argument("--eps", type=float, default=None)
    w.add_argument("--delta", type=float, default=None)
    w.add_argument("--c-constant", type=float, choices=(10.0, 100.0, 200.0), default=None)
    w.add_argument("--out", default=None)
    w.set_defaults(func=cmd_sweep)

    c = sub.add_parser("check", help="run the verification battery")
    c.add_argument("--config", default=None, help="check config JSON")
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--c-constant", type=float, default=None,
                   help="weight constant for all weight-gated campaigns")
    c.add_argument("--mutation", choices=("flip_hf_sign",), default=None)
    c.add_argument("--campaigns", default=None, help=f"comma list from {','.join(CAMPAIGNS)}")
    c.add_argument("--out", default=".")
    c.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ParseError, VersionError, InputShapeError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ExpOverflowError, IndefiniteHessianError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
