"""decode: human-readable view of an evolved genome."""

import argparse
import logging
from pathlib import Path

from rcgp.cli.common import out_root, resolve_settings, run_directory
from rcgp.services.cgp_engine import (
    active_nodes,
    describe_usage,
    genome_to_json,
    load_genome,
    to_dot,
    to_expression,
)

logger = logging.getLogger(__name__)


def register_decode(subparsers) -> None:
    parser = subparsers.add_parser("decode", help="Print the expression and input usage of a genome")
    parser.add_argument("genome", type=Path, help="Genome JSON file")
    parser.add_argument("--dot", type=Path, default=None, help="Write the DOT graph here")
    parser.add_argument("--full", action="store_true", help="Draw inactive nodes too")
    parser.add_argument("--out", type=Path, default=None, help="Output root directory")
    parser.add_argument("--config", type=Path, default=None, help="Settings TOML file")
    parser.add_argument("--dry-run", action="store_true", help="Print only, write nothing")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    parser.set_defaults(handler=cmd_decode)


def cmd_decode(args: argparse.Namespace) -> int:
    genome = load_genome(args.genome)
    active = active_nodes(genome)
    print(to_expression(genome))
    print(describe_usage(genome))
    print(f"inputs: {', '.join(f'x{i}' for i in sorted(active.inputs))}")
    print(f"active nodes: {len(active.nodes)} of {genome.config.n_nodes}")
    if args.dry_run:
        return 0

    dot = to_dot(genome, active_only=not args.full)
    if args.dot is not None:
        args.dot.parent.mkdir(parents=True, exist_ok=True)
        args.dot.write_text(dot)
        logger.info("Wrote %s", args.dot)
        return 0

    s = resolve_settings(args)
    seed = genome.seed if genome.seed is not None else 0
    with run_directory(out_root(args, s), "decode", seed) as directory:
        (directory / "genome.dot").write_text(dot)
        (directory / "genome.json").write_text(genome_to_json(genome))
        (directory / "expression.txt").write_text(
            to_expression(genome) + "\n" + describe_usage(genome) + "\n"
        )
    print(directory / "genome.dot")
    return 0
