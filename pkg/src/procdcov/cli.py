"""Command-line front end: simulate paths, compute statistics, run calibrated
independence tests, and run the Monte Carlo experiment presets.

Exit statuses: 0 ok, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys

from .bootstrap import METHODS, RngSpec, independence_test, permutation_test
from .dcov import DcovParams, dist_matrix_from_values, sample_dcor, sample_dcov
from .experiments import EXPERIMENT_IDS, ExperimentSpec, run_experiment, write_result_rows
from .grid import (PairedSample, read_pair_csv, read_trajectories_csv,
                   uniform_partition, write_pair_csv, write_trajectories_csv)
from .simulate import (FbmPairSpec, ParetoShockSpec, StableSpec,
                       fbm_pair_values, gbm_values, pareto_shock_values,
                       stable_values)

__all__ = ["cli_main", "main"]


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(","))


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(","))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="procdcov",
        description="Distance-covariance independence testing for discretized "
                    "stochastic processes.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write simulated trajectories to CSV")
    sim.add_argument("--config", required=True, help="INI file with a [simulate] section")
    sim.add_argument("--out", required=True)
    sim.add_argument("--seed", type=int, default=None, help="override the config seed")

    stat = sub.add_parser("stat", help="print T_n and R_n for two trajectory CSVs")
    stat.add_argument("x_csv")
    stat.add_argument("y_csv")
    stat.add_argument("--beta", type=float, default=1.0)

    test = sub.add_parser("test", help="run a calibrated independence test on a pair CSV")
    test.add_argument("--input", required=True, help="pair CSV (ids x0.., y0..)")
    test.add_argument("--beta", type=float, default=1.0)
    test.add_argument("--B", type=int, default=200)
    test.add_argument("--method", choices=METHODS, default="bootstrap_paired")
    test.add_argument("--seed", type=int, default=0)
    test.add_argument("--threads", type=int, default=1)
    test.add_argument("--include-reference", action="store_true",
                      help="emit the full reference sample in the JSON")

    exp = sub.add_parser("experiment", help="run a Monte Carlo experiment preset")
    exp.add_argument("--id", choices=EXPERIMENT_IDS, help="experiment preset")
    exp.add_argument("--out", required=True)
    exp.add_argument("--config", help="INI file with per-experiment sections")
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--threads", type=int, default=1)
    exp.add_argument("--beta", type=float, default=None)
    exp.add_argument("--reps", type=int, default=None)
    exp.add_argument("--n", type=_int_list, default=None, help="comma-separated n grid")
    exp.add_argument("--p", type=_int_list, default=None, help="comma-separated p grid")
    exp.add_argument("--B", type=int, default=None, help="bootstrap replicates (fig5)")
    return parser


# ---------------------------------------------------------------------------
# simulate

def _run_simulate(args) -> int:
    cfg = configparser.ConfigParser()
    if not cfg.read(args.config):
        raise FileNotFoundError(f"config file not found: {args.config}")
    if "simulate" not in cfg:
        raise ValueError(f"{args.config}: missing [simulate] section")
    sec = cfg["simulate"]
    process = sec.get("process", "fbm")
    n = sec.getint("n", 10)
    p = sec.getint("p", 100)
    seed = args.seed if args.seed is not None else sec.getint("seed", 0)
    rng = RngSpec(seed).stream("simulate")
    part = uniform_partition(p)

    if process == "fbm":
        spec = FbmPairSpec(H=sec.getfloat("h", 0.5), rho=sec.getfloat("rho", 0.0), p=p)
        x, y = fbm_pair_values(spec, n, rng)
        write_pair_csv(args.out, PairedSample(part, x, y))
    elif process == "gbm":
        vals = gbm_values(sec.getfloat("mu", 1.0), sec.getfloat("sigma", 0.7), p, n, rng)
        write_trajectories_csv(args.out, part, [str(i) for i in range(n)], vals)
    elif process == "stable":
        spec = StableSpec(alpha=sec.getfloat("alpha", 1.8),
                          beta_skew=sec.getfloat("beta_skew", 0.3),
                          mu=sec.getfloat("mu", 0.0),
                          sigma=sec.getfloat("sigma", 1.0))
        vals = stable_values(spec, p, n, rng)
        write_trajectories_csv(args.out, part, [str(i) for i in range(n)], vals)
    elif process in ("pareto_joint", "pareto_separate"):
        model = "joint_shock" if process == "pareto_joint" else "separate_shocks"
        spec = ParetoShockSpec(alpha=sec.getfloat("alpha", 1.0), model=model,
                               rho=sec.getfloat("rho", 0.5))
        x, y = pareto_shock_values(spec, p, n, rng)
        write_pair_csv(args.out, PairedSample(part, x, y))
    else:
        raise ValueError(f"unknown process {process!r} in [simulate]")
    return 0


# ---------------------------------------------------------------------------
# stat / test

def _run_stat(args) -> int:
    part_x, _, x = read_trajectories_csv(args.x_csv)
    part_y, _, y = read_trajectories_csv(args.y_csv)
    if part_x != part_y:
        raise ValueError("the two CSVs use different partitions")
    if x.shape[0] != y.shape[0]:
        raise ValueError("the two CSVs hold different numbers of paths")
    params = DcovParams(args.beta)
    a = dist_matrix_from_values(x, part_x, params)
    b = dist_matrix_from_values(y, part_x, params)
    r = sample_dcor(a, b)
    print(json.dumps({"n": x.shape[0], "p": part_x.p, "beta": args.beta,
                      "T_n": sample_dcov(a, b),
                      "R_n": None if r is None else r}))
    return 0


def _run_test(args) -> int:
    sample = read_pair_csv(args.input)
    params = DcovParams(args.beta)
    rng = RngSpec(args.seed)
    if args.method == "permutation":
        result = permutation_test(sample, params, args.B, rng, threads=args.threads)
    else:
        result = independence_test(sample, params, args.B, rng,
                                   mode=args.method, threads=args.threads)
    print(result.to_json(include_reference=args.include_reference))
    return 0


# ---------------------------------------------------------------------------
# experiment

_CONFIG_KEYS = ("n", "p", "h", "alpha", "rho", "reps", "beta", "seed", "b")


def _spec_from_config(cfg_path: str | None, args) -> ExperimentSpec:
    overrides: dict = {}
    exp_id = args.id
    if cfg_path:
        cfg = configparser.ConfigParser()
        if not cfg.read(cfg_path):
            raise FileNotFoundError(f"config file not found: {cfg_path}")
        if exp_id is None:
            sections = [s for s in cfg.sections() if s in EXPERIMENT_IDS]
            if len(sections) != 1:
                raise ValueError("pass --id or a config with exactly one experiment section")
            exp_id = sections[0]
        if exp_id in cfg:
            sec = cfg[exp_id]
            for key in sec:
                if key not in _CONFIG_KEYS:
                    raise ValueError(f"unknown key {key!r} in section [{exp_id}]")
            if "n" in sec:
                overrides["n_values"] = _int_list(sec["n"])
            if "p" in sec:
                overrides["p_values"] = _int_list(sec["p"])
            if "h" in sec:
                overrides["h_values"] = _float_list(sec["h"])
            if "alpha" in sec:
                overrides["alpha_values"] = _float_list(sec["alpha"])
            if "rho" in sec:
                overrides["rho"] = sec.getfloat("rho")
            if "reps" in sec:
                overrides["replications"] = sec.getint("reps")
            if "beta" in sec:
                overrides["beta"] = sec.getfloat("beta")
            if "seed" in sec:
                overrides["seed"] = sec.getint("seed")
            if "b" in sec:
                overrides["B"] = sec.getint("b")
    if exp_id is None:
        raise ValueError("--id is required when no config section names an experiment")
    if args.n is not None:
        overrides["n_values"] = args.n
    if args.p is not None:
        overrides["p_values"] = args.p
    if args.reps is not None:
        overrides["replications"] = args.reps
    if args.beta is not None:
        overrides["beta"] = args.beta
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.B is not None:
        overrides["B"] = args.B
    return ExperimentSpec(id=exp_id, **overrides)


def _run_experiment(args) -> int:
    spec = _spec_from_config(args.config, args)
    rows = run_experiment(spec, threads=args.threads)
    write_result_rows(args.out, rows)
    return 0


_RUNNERS = {"simulate": _run_simulate, "stat": _run_stat,
            "test": _run_test, "experiment": _run_experiment}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help, 2 for usage problems
        return 0 if exc.code == 0 else 1
    try:
        return _RUNNERS[args.command](args)
    except Exception as exc:
        print(f"procdcov {args.command}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
