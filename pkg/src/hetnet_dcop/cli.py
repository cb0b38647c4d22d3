"""Command-line interface.

Subcommands: generate (write a scenario file), solve (run one algorithm on
a scenario and dump the allocation CSV) and experiment (run a sweep,
writing CSVs and figures into a directory). Exit code 0 on success,
nonzero with a diagnostic on stderr otherwise.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .assignment import non_served_users, total_rate, write_assignment_csv
from .baselines import brute_force_solve, max_sinr_solve
from .dcop import build_model
from .experiments import ExperimentSpec, run_and_report
from .mcsolver import GeometricAnnealing, SolverConfig, solve, write_trace_csv
from .netmodel import compute_channel
from .scenarios import generate_scenario, load_scenario, save_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetnet-dcop",
        description="User association in a multi-tier cellular network via "
                    "distributed constraint optimization.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a random scenario file")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--users", type=int, required=True)
    gen.add_argument("--macro-rbs", type=int, default=200)
    gen.add_argument("--qos", type=float, default=3.0,
                     help="per-user rate requirement in bit/s")
    gen.add_argument("--out", required=True)

    sol = sub.add_parser("solve", help="solve one scenario")
    sol.add_argument("--scenario", required=True)
    sol.add_argument("--algo", choices=("mc", "maxsinr", "brute"), default="mc")
    sol.add_argument("--eta", type=int, default=3,
                     help="candidate stations kept per user")
    sol.add_argument("--beta", type=float, default=None,
                     help="fixed inverse temperature (default: annealed)")
    sol.add_argument("--steps", type=int, default=None,
                     help="chain steps (default: 200 per variable)")
    sol.add_argument("--seed", type=int, default=0)
    sol.add_argument("--out", required=True, help="allocation CSV path")
    sol.add_argument("--trace", default=None, help="chain trace CSV path")

    exp = sub.add_parser("experiment", help="run an experiment sweep")
    exp.add_argument("kind", choices=("table1", "runtime", "nonserved",
                                      "cdf", "macro-rb"))
    exp.add_argument("--reps", type=int, default=10)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--out", required=True, help="output directory")
    exp.add_argument("--steps", type=int, default=None,
                     help="chain steps override")
    exp.add_argument("--users", type=int, nargs="+", default=None,
                     help="override the user-count grid")
    exp.add_argument("--etas", type=int, nargs="+", default=None,
                     help="override the candidate-cap grid")
    exp.add_argument("--macro-rbs", type=int, nargs="+", default=None,
                     help="override the macro RB grid (macro-rb only)")
    exp.add_argument("--no-figures", action="store_true",
                     help="skip figure rendering")
    return parser


def _cmd_generate(args) -> int:
    scenario = generate_scenario(args.seed, args.users,
                                 macro_rbs=args.macro_rbs,
                                 qos_threshold=args.qos)
    save_scenario(scenario, args.out)
    print(f"wrote scenario with {len(scenario.base_stations)} stations and "
          f"{len(scenario.users)} users to {args.out}")
    return 0


def _cmd_solve(args) -> int:
    scenario = load_scenario(args.scenario)
    seq = np.random.SeedSequence(args.seed)
    fading_seed, chain_seed = (int(s.generate_state(1)[0]) for s in seq.spawn(2))
    channel = compute_channel(scenario, np.random.default_rng(fading_seed))

    stats = None
    if args.algo == "maxsinr":
        result = max_sinr_solve(scenario, channel)
    else:
        model = build_model(scenario, channel, args.eta)
        if args.algo == "brute":
            result = brute_force_solve(model).optimal_assignment
        else:
            config = SolverConfig(
                beta=args.beta if args.beta is not None else 1.0,
                steps=args.steps, seed=chain_seed,
                annealing=None if args.beta is not None else GeometricAnnealing())
            result, stats = solve(model, config)

    write_assignment_csv(result, channel, args.out)
    if args.trace and stats is not None:
        write_trace_csv(stats, args.trace)
    served = len(result.served_users())
    missed = len(non_served_users(result, scenario))
    print(f"{args.algo}: total rate {total_rate(result, channel):.4f} bit/s, "
          f"{served} served, {missed} non-served -> {args.out}")
    return 0


def _cmd_experiment(args) -> int:
    kind = args.kind.replace("-", "_")
    spec = ExperimentSpec.preset(kind, replications=args.reps,
                                 master_seed=args.seed, steps=args.steps,
                                 user_counts=args.users, etas=args.etas,
                                 macro_rbs_grid=args.macro_rbs)
    artifacts = run_and_report(spec, args.out, figures=not args.no_figures)
    for role, path in sorted(artifacts.items()):
        print(f"{role}: {path}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"generate": _cmd_generate, "solve": _cmd_solve,
                "experiment": _cmd_experiment}
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"hetnet-dcop: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
