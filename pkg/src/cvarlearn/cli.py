"""Command-line interface.

Subcommands: ``run`` (multi-trial experiment), ``ablate`` (sample-count
study), ``budget`` (variation budget and parameter suggestions), ``verify``
(invariant suites), and ``params`` (theorem parameter calculator). Exit
codes: 0 success, 1 configuration error, 2 runtime failure, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .core import ConfigurationError
from .harness import (
    compute_budget,
    load_config_file,
    make_config,
    run_ablation,
    run_experiment,
)
from .schedule import theorem1_params, theorem2_params
from .verify import run_suites

_CONFIG_FLAGS = {
    # flag destination -> ExperimentConfig field
    "scenario": "scenario",
    "T": "horizon",
    "batch": "batch_size",
    "delta": "delta",
    "alpha": "alpha",
    "samples": "samples",
    "eta": "eta",
    "rate": "rate_rule",
    "x0": "x0",
    "trials": "trials",
    "seed": "base_seed",
    "jobs": "jobs",
    "out": "out_prefix",
    "oracle_grid": "oracle_grid",
    "oracle_k": "oracle_k",
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--scenario", choices=("parking", "brownian", "custom"))
    parser.add_argument("--T", type=int, help="iteration horizon")
    parser.add_argument("--batch", type=int, help="restarting batch size")
    parser.add_argument("--delta", type=float, help="smoothing radius")
    parser.add_argument("--alpha", type=float, help="risk level in (0, 1]")
    parser.add_argument("--samples", type=int, help="cost queries per step")
    parser.add_argument("--eta", type=float, help="constant learning rate")
    parser.add_argument("--rate", choices=("constant", "inverse"),
                        help="learning-rate rule")
    parser.add_argument("--x0", type=float, help="initial decision")
    parser.add_argument("--trials", type=int, help="number of seeded trials")
    parser.add_argument("--seed", type=int, help="base seed (RA_SEED overrides)")
    parser.add_argument("--jobs", type=int, help="parallel trial workers (0 = auto)")
    parser.add_argument("--out", help="output path prefix")
    parser.add_argument("--oracle-grid", type=int, dest="oracle_grid",
                        help="quantile grid size of the evaluation oracle")
    parser.add_argument("--oracle-k", type=int, dest="oracle_k",
                        help="action-grid size of the evaluation oracle")


def _config_from_args(args: argparse.Namespace):
    file_values = load_config_file(args.config) if args.config else {}
    flag_values = {field: getattr(args, flag)
                   for flag, field in _CONFIG_FLAGS.items()
                   if getattr(args, flag, None) is not None}
    return make_config(file_values, flag_values)


def _cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    agg = run_experiment(config)
    final_dr = agg.regret[:, -1]
    final_loss = agg.acc_loss[:, -1]
    print(f"scenario={config.scenario} T={config.horizon} trials={config.trials} "
          f"seed={config.base_seed}")
    print(f"final dynamic regret: {final_dr.mean():.6g} +/- {final_dr.std():.6g}")
    print(f"final accumulated loss: {final_loss.mean():.6g} +/- {final_loss.std():.6g}")
    print(f"wrote {config.out_prefix}_trial*.csv and {config.out_prefix}_aggregate.csv")
    return 0


def _cmd_ablate(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    counts = [int(c) for c in args.counts.split(",") if c.strip()]
    aggregates = run_ablation(config, counts)
    print("n_t  mean final accumulated loss  (std over trials)")
    for n in counts:
        final = aggregates[n].acc_loss[:, -1]
        print(f"{n:4d}  {final.mean():26.6f}  ({final.std():.6f})")
    print(f"wrote {config.out_prefix}_ablation.csv")
    return 0


def _cmd_budget(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    report = compute_budget(config)
    print(f"variation budget over T={config.horizon}: V_D = {report.budget:.10g}")
    if report.theorem1 is not None:
        t1 = report.theorem1
        print(f"convex selection      (a={config.sampling_a:g}): "
              f"delta={t1.delta:.6g} eta={t1.eta:.6g} batch={t1.batch_size}")
    if report.theorem2 is not None:
        t2 = report.theorem2
        print(f"strongly convex selection (a={config.sampling_a:g}): "
              f"delta={t2.delta:.6g} batch={t2.batch_size} "
              f"eta_tau=1/({t2.rate.modulus:.6g}*tau)")
    print(f"wrote {config.out_prefix}_budget.csv")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    results = run_suites(args.suite)
    failures = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        detail = f"  [{res.detail}]" if res.detail else ""
        print(f"{status}  {res.suite}/{res.name}{detail}")
        failures += 0 if res.passed else 1
    print(f"{len(results) - failures}/{len(results)} properties passed")
    return 0 if failures == 0 else 3


def _cmd_params(args: argparse.Namespace) -> int:
    t1 = theorem1_params(args.T, args.budget, args.a)
    print(f"convex:          delta={t1.delta:.12g} eta={t1.eta:.12g} "
          f"batch={t1.batch_size}")
    if args.m is not None:
        t2 = theorem2_params(args.T, args.budget, args.a, args.m)
        print(f"strongly convex: delta={t2.delta:.12g} batch={t2.batch_size} "
              f"eta_tau=1/({args.m:g}*tau)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvarlearn",
        description="Risk-averse online learning under drifting distributions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a seeded multi-trial experiment")
    _add_config_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_abl = sub.add_parser("ablate", help="compare sample counts")
    _add_config_flags(p_abl)
    p_abl.add_argument("--counts", default="8,16,24",
                       help="comma-separated sample counts")
    p_abl.set_defaults(func=_cmd_ablate)

    p_bud = sub.add_parser("budget", help="variation budget and suggestions")
    _add_config_flags(p_bud)
    p_bud.set_defaults(func=_cmd_budget)

    p_ver = sub.add_parser("verify", help="run invariant suites")
    p_ver.add_argument("suite", nargs="?", default="all",
                       choices=("risk", "smoothing", "environment", "all"))
    p_ver.set_defaults(func=_cmd_verify)

    p_par = sub.add_parser("params", help="theorem parameter calculator")
    p_par.add_argument("--T", type=int, required=True)
    p_par.add_argument("--budget", "--vd", type=float, required=True, dest="budget")
    p_par.add_argument("--a", type=float, required=True,
                       help="sampling tuning parameter")
    p_par.add_argument("--m", type=float, help="strong-convexity modulus")
    p_par.set_defaults(func=_cmd_params)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
