# command-line entry point: composes the subcommand modules
import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from rcgp import __version__
from rcgp.cli import register_commands
from rcgp.core.logger import setup_logging
from rcgp.core.validate import RcgpError

logger = logging.getLogger("rcgp.main")


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcgp",
        description="Evolve CGP and recurrent CGP classifiers on imbalanced data",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_commands(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; 0 on success, 1 on any pipeline error, 2 on bad arguments."""
    args = create_parser().parse_args(argv)
    try:
        setup_logging(level="DEBUG" if getattr(args, "verbose", False) else None)
        return args.handler(args)
    except (RcgpError, ValidationError, OSError) as e:
        logger.error("%s failed: %s", args.command, e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
