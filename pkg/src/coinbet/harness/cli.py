"""Command-line entry point: ``coinbet {coin,olo,lea,check-potentials}``.

Options given on the command line override values read from ``--config``.
Without ``--out`` the summary table is printed to stdout.
"""

import argparse
import csv
import os
import sys

from ..potentials import PotentialDescriptor, PotentialKind, check_excellence
from .data import LibsvmParseError
from .experiments import ConfigError, ExperimentConfig, run_experiment, write_traces

TASK_FOR_COMMAND = {"coin": "coin_game", "olo": "olo_regression", "lea": "lea_synthetic"}

# flag attribute -> config field
_OVERRIDES = {
    "seed": "seed",
    "T": "T",
    "experts_k": "experts_k",
    "dataset": "dataset",
    "eta_grid": "eta_grid",
    "epsilon": "epsilon",
    "delta_fraction": "delta_fraction",
    "out": "out",
    "gap": "gap",
    "gap_mode": "gap_mode",
    "dim": "dim",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message}\n")


def parse_eta_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:points, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:points, got {text!r}") from None
    if not (lo > 0 and hi >= lo and n >= 1):
        raise argparse.ArgumentTypeError("eta grid needs 0 < lo <= hi and points >= 1")
    return (lo, hi, n)


def _add_common(p):
    p.add_argument("--config", help="JSON file with experiment settings")
    p.add_argument("--seed", type=int)
    p.add_argument("--T", type=int, help="number of rounds")
    p.add_argument("--epsilon", type=float, help="initial endowment")
    p.add_argument("--out", help="directory for the CSV output")


def build_parser():
    parser = _Parser(prog="coinbet", description="Coin-betting online learning experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    coin = sub.add_parser("coin", help="betting game on scripted coin sequences")
    _add_common(coin)

    olo = sub.add_parser("olo", help="absolute-loss regression: KT learner versus OGD")
    _add_common(olo)
    olo.add_argument("--dataset", help="sparse 'label idx:val' text file")
    olo.add_argument("--eta-grid", type=parse_eta_grid, metavar="LO:HI:POINTS")
    olo.add_argument("--dim", type=int, help="dimension of the synthetic stream")
    olo.add_argument("--shuffle", action="store_true", help="seeded shuffle before the pass")

    lea = sub.add_parser("lea", help="Hadamard expert benchmark: KT experts versus Hedge")
    _add_common(lea)
    lea.add_argument("--experts-k", type=int, help="number of good experts")
    lea.add_argument("--eta-grid", type=parse_eta_grid, metavar="LO:HI:POINTS")
    lea.add_argument("--delta-fraction", type=float)
    lea.add_argument("--gap", type=float)
    lea.add_argument("--gap-mode", choices=("compress", "clamp_loss", "clamp_reward"))
    variant = lea.add_mutually_exclusive_group()
    variant.add_argument("--doubling", action="store_true", help="anytime doubling-trick variant")
    variant.add_argument("--shifted", action="store_true", help="known-horizon shifted variant")

    chk = sub.add_parser("check-potentials", help="grid-check the excellence conditions")
    chk.add_argument("--t-max", type=int, default=20)
    chk.add_argument("--grid-density", type=int, default=50)
    chk.add_argument("--g-points", type=int, default=21)
    chk.add_argument("--epsilon", type=float, default=1.0)
    chk.add_argument("--out", help="directory for violations.csv")
    return parser


def config_from_args(args):
    task = TASK_FOR_COMMAND[args.command]
    data = {}
    if args.config:
        data = ExperimentConfig.from_json(args.config).to_dict()
        if data["task"] != task:
            raise ConfigError(f"config task {data['task']!r} does not match command {args.command!r}")
    data["task"] = task
    for attr, key in _OVERRIDES.items():
        value = getattr(args, attr, None)
        if value is not None:
            data[key] = value
    if getattr(args, "shuffle", False):
        data["shuffle"] = True
    if getattr(args, "doubling", False):
        data["kt_variant"] = "doubling"
    elif getattr(args, "shifted", False):
        data["kt_variant"] = "shifted"
    return ExperimentConfig.from_dict(data)


def _print_summary(traces, stream):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["algorithm", "params", "final_value", "final_regret"])
    for tr in traces:
        params = ";".join(f"{k}={v}" for k, v in tr.params.items())
        w.writerow([tr.algorithm, params, repr(tr.final_value), repr(tr.final_regret)])


def _check_potentials(args, stdout):
    eps = args.epsilon
    families = [PotentialDescriptor(PotentialKind.KT, eps)]
    families += [PotentialDescriptor(PotentialKind.SHIFTED_KT, eps, d) for d in (0.0, 1.0, 8.0)]
    families.append(PotentialDescriptor(PotentialKind.EXP_SQUARE, eps))
    rows = []
    for desc in families:
        violations = check_excellence(desc, args.t_max, args.grid_density, args.g_points)
        label = f"{desc.kind.name.lower()}(eps={desc.endowment:g}, shift={desc.shift:g})"
        print(f"{label}: {len(violations)} violation(s)", file=stdout)
        rows += [(label,) + tuple(v) for v in violations]
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "violations.csv"), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["potential", "condition", "t", "x", "g", "slack"])
            w.writerows(rows)
    if rows:
        raise ConfigError(f"{len(rows)} excellence violation(s) found")


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check-potentials":
            if args.t_max < 1:
                raise ConfigError("--t-max must be at least 1")
            _check_potentials(args, stdout)
            return 0
        config = config_from_args(args)
        traces = run_experiment(config)
        if config.out:
            write_traces(traces, config.out, config)
        else:
            _print_summary(traces, stdout)
    except (ConfigError, LibsvmParseError, OSError, ValueError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"coinbet: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
