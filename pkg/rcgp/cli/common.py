"""Shared flags, config resolution and output directories for the subcommands.

Resolution order is built-in defaults < settings file < flags. Every flag
defaults to ``None`` so an explicit value always wins over the settings file.
"""

import argparse
import json
import logging
import shutil
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Iterator, Optional

from rcgp.core.config import Settings, get_settings, load_settings
from rcgp.core.validate import ConfigError
from rcgp.schemas.adasyn import AdasynConfig
from rcgp.schemas.baselines import MlpConfig, SvmConfig
from rcgp.schemas.crossval import CvPlan
from rcgp.schemas.dataset import Dataset, LayoutDescriptor, SplitSpec
from rcgp.schemas.evolution import EvolutionConfig
from rcgp.schemas.genome import GenomeConfig
from rcgp.services.dataset_service import build_layout, load_csv, load_region_csv
from rcgp.services.reporting import to_jsonable, write_json

logger = logging.getLogger(__name__)

LAYOUT_NAMES = ["pcc", "mpfc", "ripc", "lipc", "four-column", "single-vector", "dcm16"]
FAILED_DIR = "failed"


def parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"Expected true or false, got {value!r}")


def first(*values):
    """The first value that is not None."""
    for value in values:
        if value is not None:
            return value
    return None


# flags


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="Master seed")
    parser.add_argument("--out", type=Path, default=None, help="Output root directory")
    parser.add_argument("--config", type=Path, default=None, help="Settings TOML file")
    parser.add_argument(
        "--dry-run", action="store_true", help="Validate the configuration and write nothing"
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")


def add_data_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("data", type=Path, help="Dataset CSV")
    parser.add_argument(
        "--layout", choices=LAYOUT_NAMES, default="dcm16", help="Feature layout of the dataset"
    )
    parser.add_argument(
        "--timepoints", type=int, default=145, help="Timepoints per region for timeseries layouts"
    )
    parser.add_argument(
        "--regions",
        action="store_true",
        help="CSV has region-tagged columns (pcc_t0, ...) instead of f0..fN",
    )
    parser.add_argument("--label-column", default="label")
    parser.add_argument("--id-column", default="id")


def add_split_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--train-frac", type=float, default=None)
    parser.add_argument("--val-frac", type=float, default=None)
    parser.add_argument("--test-frac", type=float, default=None)


def add_balance_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--balance",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="ADASYN-balance every training partition",
    )
    parser.add_argument("--k-neighbors", type=int, default=None)
    parser.add_argument("--beta", type=float, default=None)
    parser.add_argument("--imbalance-threshold", type=float, default=None)
    parser.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=None)


def add_evolution_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--recurrent", type=parse_bool, default=None, help="Allow feedback edges")
    parser.add_argument("--recurrent-prob", type=float, default=None)
    parser.add_argument("--mutation-rate", type=float, default=None)
    parser.add_argument("--iterations", type=int, default=None, help="Maximum generations per run")
    parser.add_argument("--runs", type=int, default=None, help="Independent runs")
    parser.add_argument("--lambda", dest="lambda_", type=int, default=None, help="Offspring per generation")
    parser.add_argument("--nodes", type=int, default=None, help="Function nodes per genome")
    parser.add_argument("--classify-mode", choices=["wide", "streamed"], default=None)
    parser.add_argument("--passes", type=int, default=None, help="Sweeps per wide evaluation")
    parser.add_argument(
        "--select-on-validation",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Also report the best-validation genome of each run",
    )
    parser.add_argument("--baselines", action="store_true", help="Also run MLP, SVM and majority")
    parser.add_argument("--jobs", type=int, default=None, help="Worker processes")


def add_cv_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k-folds", type=int, default=None)
    parser.add_argument("--repeats", type=int, default=None)
    parser.add_argument("--runs-per-cell", type=int, default=None)


# resolution


def resolve_settings(args: argparse.Namespace) -> Settings:
    if args.config is not None:
        if not args.config.is_file():
            raise ConfigError(f"Settings file not found: {args.config}")
        return load_settings(args.config)
    return get_settings()


def master_seed(args: argparse.Namespace, s: Settings) -> int:
    return first(args.seed, s.evolution_config.SEED)


def out_root(args: argparse.Namespace, s: Settings) -> Path:
    return Path(first(args.out, s.output_config.OUT_DIR))


def build_layout_descriptor(args: argparse.Namespace) -> LayoutDescriptor:
    return LayoutDescriptor.from_name(args.layout, timepoints=args.timepoints)


def load_dataset(args: argparse.Namespace, layout: LayoutDescriptor) -> Dataset:
    if args.regions:
        raw = load_region_csv(args.data, label_column=args.label_column, id_column=args.id_column)
        return build_layout(raw, layout)
    return load_csv(args.data, label_column=args.label_column, id_column=args.id_column, layout=layout)


def build_split_spec(args: argparse.Namespace, s: Settings, seed: int) -> SplitSpec:
    return SplitSpec(
        train_frac=first(args.train_frac, s.split_config.TRAIN_FRAC),
        val_frac=first(args.val_frac, s.split_config.VAL_FRAC),
        test_frac=first(args.test_frac, s.split_config.TEST_FRAC),
        seed=seed,
    )


def build_adasyn(
    args: argparse.Namespace, s: Settings, seed: int, force: bool = False
) -> Optional[AdasynConfig]:
    if not (force or first(args.balance, s.adasyn_config.ENABLED)):
        return None
    return AdasynConfig(
        k_neighbors=first(args.k_neighbors, s.adasyn_config.K_NEIGHBORS),
        beta=first(args.beta, s.adasyn_config.BETA),
        imbalance_threshold=first(args.imbalance_threshold, s.adasyn_config.IMBALANCE_THRESHOLD),
        normalize=first(args.normalize, s.adasyn_config.NORMALIZE),
        seed=seed,
    )


def build_evolution(
    args: argparse.Namespace, s: Settings, layout: LayoutDescriptor, seed: int
) -> EvolutionConfig:
    recurrent = first(args.recurrent, s.genome_config.RECURRENT)
    mode = first(args.classify_mode, s.evolution_config.CLASSIFY_MODE)
    n_inputs = layout.frame_width if mode == "streamed" else layout.n_features
    recurrent_prob = first(args.recurrent_prob, s.evolution_config.RECURRENT_PROB) if recurrent else 0.0
    genome = GenomeConfig(
        n_inputs=n_inputs,
        n_nodes=first(args.nodes, s.genome_config.N_NODES),
        n_outputs=s.genome_config.N_OUTPUTS,
        recurrent=recurrent,
    )
    return EvolutionConfig(
        lambda_=first(args.lambda_, s.evolution_config.LAMBDA),
        mutation_rate=first(args.mutation_rate, s.evolution_config.MUTATION_RATE),
        max_iterations=first(args.iterations, s.evolution_config.MAX_ITERATIONS),
        n_runs=first(args.runs, s.evolution_config.N_RUNS),
        recurrent_prob=recurrent_prob,
        genome=genome,
        classify_mode=mode,
        passes=first(args.passes, s.genome_config.PASSES),
        select_on_validation=first(args.select_on_validation, s.evolution_config.SELECT_ON_VALIDATION),
        seed=seed,
    )


def build_cv_plan(args: argparse.Namespace, s: Settings, seed: int) -> CvPlan:
    return CvPlan(
        k=first(args.k_folds, s.crossval_config.K_FOLDS),
        repeats=first(args.repeats, s.crossval_config.REPEATS),
        runs_per_cell=first(args.runs_per_cell, s.crossval_config.RUNS_PER_CELL),
        seed=seed,
    )


def build_mlp(s: Settings, seed: int) -> MlpConfig:
    m = s.mlp_config
    return MlpConfig(
        hidden_units=m.HIDDEN_UNITS,
        learning_rate=m.LEARNING_RATE,
        epochs=m.EPOCHS,
        batch_size=m.BATCH_SIZE,
        seed=seed,
    )


def build_svm(s: Settings, seed: int) -> SvmConfig:
    m = s.svm_config
    return SvmConfig(
        regularization=m.REGULARIZATION,
        learning_rate=m.LEARNING_RATE,
        epochs=m.EPOCHS,
        batch_size=m.BATCH_SIZE,
        seed=seed,
    )


# output


def _unique_dir(root: Path, command: str, seed: int) -> Path:
    stamp = datetime.now().strftime("%Y%m%dT%H%M%S")
    base = root / f"{command}-{stamp}-{seed}"
    path, suffix = base, 1
    while path.exists():
        path = Path(f"{base}-{suffix}")
        suffix += 1
    return path


@contextmanager
def run_directory(root: Path, command: str, seed: int) -> Iterator[Path]:
    """Create ``<root>/<command>-<timestamp>-<seed>/``.

    If the body raises, whatever was written is moved under ``<root>/failed/``.
    """
    path = _unique_dir(Path(root), command, seed)
    path.mkdir(parents=True)
    try:
        yield path
    except Exception:
        failed = Path(root) / FAILED_DIR / path.name
        failed.parent.mkdir(parents=True, exist_ok=True)
        shutil.move(str(path), str(failed))
        logger.error("Partial outputs moved to %s", failed)
        raise
    logger.info("Outputs written to %s", path)


def write_config(directory: Path, config) -> None:
    """Persist the resolved configuration, seeds included, next to the results."""
    write_json(config, directory / "config.json")


def print_config(config) -> None:
    """Dry runs echo the resolved configuration instead of writing it."""
    print(json.dumps(to_jsonable(config), indent=2, sort_keys=True))
