"""report: merge result JSON files into one comparison table."""

import argparse
import logging
from pathlib import Path

from rcgp.cli.common import out_root, resolve_settings, run_directory
from rcgp.services.reporting import read_result, results_table, write_json, write_table

logger = logging.getLogger(__name__)


def register_report(subparsers) -> None:
    parser = subparsers.add_parser("report", help="Merge results.json files into one table")
    parser.add_argument("results", type=Path, nargs="+", help="results.json files from train or cv")
    parser.add_argument("--out", type=Path, default=None, help="Output root directory")
    parser.add_argument("--config", type=Path, default=None, help="Settings TOML file")
    parser.add_argument("--seed", type=int, default=0, help="Only names the output directory")
    parser.add_argument("--dry-run", action="store_true", help="Print the table, write nothing")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    parser.set_defaults(handler=cmd_report)


def cmd_report(args: argparse.Namespace) -> int:
    documents = [read_result(path) for path in args.results]
    commands = {document.command for document in documents}
    if len(commands) > 1:
        logger.warning("Mixing train and cv results in one table")
    table = results_table(documents)
    print(table.to_string(index=False))
    if args.dry_run:
        return 0

    s = resolve_settings(args)
    with run_directory(out_root(args, s), "report", args.seed) as directory:
        write_table(table, directory / "summary.csv")
        write_json({"sources": [str(path) for path in args.results]}, directory / "config.json")
    return 0
