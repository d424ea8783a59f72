"""Command-line interface.

Subcommands map onto the experiments plus a small potential-file toolbox:

    hillproj potential make mathieu 1.0 --out pot.txt
    hillproj potential show pot.txt
    hillproj decay --config decay.cfg --out results/ --jobs 4
    hillproj spectrum --config loc.cfg ...      (localization counts)
    hillproj projections | lemmas | reconstruct | rho-study ...
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import parse_config
from .errors import ConfigError, HillprojError
from .potential import make_example, read_potential, sequence_stats, write_potential, zero_potential
from .runner import run_experiment

EXPERIMENT_COMMANDS = {
    "decay": "decay",
    "spectrum": "localization",
    "projections": "projections",
    "lemmas": "lemmas",
    "reconstruct": "reconstruct",
    "rho-study": "rho_study",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hillproj",
        description="Spectral projection experiments for Hill operators with singular potentials",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pot = sub.add_parser("potential", help="create or inspect potential files")
    pot_sub = pot.add_subparsers(dest="potential_command", required=True)
    mk = pot_sub.add_parser("make", help="write a catalog potential to a file")
    mk.add_argument("kind", choices=["mathieu", "delta_comb", "random_decay", "zero"])
    mk.add_argument("params", nargs="*", type=float, help="kind-specific parameters")
    mk.add_argument("--seed", type=int, default=42)
    mk.add_argument("--out", required=True, help="output potential file")
    show = pot_sub.add_parser("show", help="summarize a potential file")
    show.add_argument("path")

    for command in EXPERIMENT_COMMANDS:
        sp = sub.add_parser(command, help=f"run the {EXPERIMENT_COMMANDS[command]} experiment")
        sp.add_argument("--config", required=True, help="key-value configuration file")
        sp.add_argument("--out", default="hillproj-out", help="output directory")
        sp.add_argument("--jobs", type=int, default=1, help="parallel workers for per-disc work")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")
    return parser


def _cmd_potential(args) -> int:
    if args.potential_command == "make":
        if args.kind == "zero":
            spec = zero_potential()
        else:
            spec = make_example(args.kind, args.params, seed=args.seed)
        write_potential(spec, args.out)
        print(f"wrote {args.out}: {spec.label}, {len(spec.q)} coefficients")
        return 0
    spec = read_potential(Path(args.path))
    stats = sequence_stats(spec)
    print(f"potential {args.path}")
    print(f"  v0              = {spec.v0}")
    print(f"  support_cutoff  = {spec.support_cutoff}")
    print(f"  coefficients    = {len(spec.q)}")
    print(f"  r_norm          = {stats.r_norm!r}")
    print(f"  h_minus1_norm   = {stats.h_minus1_norm!r}")
    for m in spec.support[:20]:
        print(f"    q({m:+d}) = {spec.q[m]}")
    if len(spec.q) > 20:
        print(f"    ... {len(spec.q) - 20} more")
    return 0


def _override_seed(text: str, seed: int) -> str:
    kept = []
    for line in text.splitlines():
        body = line.split("#", 1)[0]
        if "=" in body and body.split("=", 1)[0].strip() == "seed":
            continue
        kept.append(line)
    kept.append(f"seed = {seed}")
    return "\n".join(kept) + "\n"


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "potential":
        try:
            return _cmd_potential(args)
        except (HillprojError, ValueError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1

    experiment = EXPERIMENT_COMMANDS[args.command]
    try:
        text = Path(args.config).read_text(encoding="utf-8")
        if args.seed is not None:
            text = _override_seed(text, args.seed)
        config = parse_config(text, experiment=experiment)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    status = run_experiment(config, args.out, jobs=args.jobs)
    if status == 0:
        print(f"{experiment}: wrote report.json and summary.csv to {args.out}")
    return status


if __name__ == "__main__":
    sys.exit(main())
