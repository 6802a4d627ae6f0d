"""Command-line front end: closed forms, simulation, sweeps, figure presets."""

import argparse
import sys
from pathlib import Path

from .closed_form import proposed_outage, roundrobin_outage
from .experiments import load_config, load_sweep_spec, reproduce_figure, run_sweep, write_rows, describe_spec
from .oracle import Policy, SimulationSpec, simulate_outage

_POLICIES = {"round-robin": Policy.ROUND_ROBIN, "max-gain": Policy.MAX_GAIN}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secrecy-lab",
        description="Secrecy outage probability of a multi-user uplink under eavesdropping.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    closed = sub.add_parser("closed-form",
                            help="evaluate both scheduling schemes for one config file")
    closed.add_argument("config", type=Path, help="system config file (key = value lines)")
    closed.set_defaults(func=_cmd_closed_form)

    simulate = sub.add_parser("simulate", help="Monte Carlo estimate for one config file")
    simulate.add_argument("config", type=Path)
    simulate.add_argument("--policy", choices=sorted(_POLICIES), required=True)
    simulate.add_argument("--trials", type=int, default=1_000_000)
    simulate.add_argument("--seed", type=int, default=42)
    simulate.add_argument("--block-size", type=int, default=65536)
    simulate.set_defaults(func=_cmd_simulate)

    sweep = sub.add_parser("sweep", help="run a sweep spec file and write CSV")
    sweep.add_argument("spec", type=Path, help="sweep spec file (key = value lines)")
    sweep.add_argument("--out", type=Path, required=True)
    sweep.set_defaults(func=_cmd_sweep)

    reproduce = sub.add_parser("reproduce", help="write a figure preset as CSV")
    reproduce.add_argument("--figure", type=int, choices=(2, 3, 4), required=True)
    reproduce.add_argument("--out", type=Path, required=True)
    reproduce.add_argument("--trials", type=int, default=1_000_000)
    reproduce.add_argument("--seed", type=int, default=42)
    reproduce.add_argument("--verify", action="store_true",
                           help="re-validate every closed-form value against quadrature")
    reproduce.set_defaults(func=_cmd_reproduce)
    return parser


def _cmd_closed_form(args) -> int:
    config = load_config(args.config)
    print(f"round_robin {roundrobin_outage(config).probability!r}")
    print(f"proposed {proposed_outage(config).probability!r}")
    return 0


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    spec = SimulationSpec(trials=args.trials, seed=args.seed,
                          policy=_POLICIES[args.policy], block_size=args.block_size)
    result = simulate_outage(config, spec)
    print(f"policy={args.policy} p_out={result.probability!r} "
          f"std_error={result.std_error!r} trials={result.trials}")
    return 0


def _cmd_sweep(args) -> int:
    spec = load_sweep_spec(args.spec)
    rows = run_sweep(spec)
    write_rows(args.out, rows, comments=(describe_spec(spec),))
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def _cmd_reproduce(args) -> int:
    reproduce_figure(args.figure, args.out, trials=args.trials, seed=args.seed,
                     verify=args.verify)
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # CLI boundary: fail with one machine-parseable line
        message = " ".join(str(exc).split())
        print(f"error: {message}", file=sys.stderr)
        return 1
