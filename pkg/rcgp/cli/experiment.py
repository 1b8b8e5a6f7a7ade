"""train and cv: evolve classifiers and write result tables."""

import argparse
import logging

import pandas as pd

from rcgp.cli.common import (
    add_balance_arguments,
    add_common_arguments,
    add_cv_arguments,
    add_data_arguments,
    add_evolution_arguments,
    add_split_arguments,
    build_adasyn,
    build_cv_plan,
    build_evolution,
    build_layout_descriptor,
    build_mlp,
    build_split_spec,
    build_svm,
    first,
    load_dataset,
    master_seed,
    out_root,
    print_config,
    resolve_settings,
    run_directory,
    write_config,
)
from rcgp.core.config import Settings
from rcgp.core.seeding import derive_seed
from rcgp.schemas.experiment import ExperimentConfig
from rcgp.services.dataset_service import stratified_split, write_split_manifest
from rcgp.services.experiment import run_crossval, run_train
from rcgp.services.reporting import results_table, write_json, write_table

logger = logging.getLogger(__name__)

# independent seed streams under the master seed
ADASYN_STREAM = 3
BASELINE_STREAM = 4

CELL_COLUMNS = ["method", "repeat", "fold", "seed", "train_acc", "val_acc", "test_acc"]


def _add_experiment_arguments(parser: argparse.ArgumentParser) -> None:
    add_common_arguments(parser)
    add_data_arguments(parser)
    add_evolution_arguments(parser)
    add_balance_arguments(parser)


def register_train(subparsers) -> None:
    parser = subparsers.add_parser("train", help="Split, evolve and report one experiment")
    _add_experiment_arguments(parser)
    add_split_arguments(parser)
    parser.set_defaults(handler=cmd_train)


def register_cv(subparsers) -> None:
    parser = subparsers.add_parser("cv", help="Repeated stratified k-fold cross-validation")
    _add_experiment_arguments(parser)
    add_cv_arguments(parser)
    parser.set_defaults(handler=cmd_cv)


def build_experiment(args: argparse.Namespace, s: Settings, command: str) -> ExperimentConfig:
    seed = master_seed(args, s)
    layout = build_layout_descriptor(args)
    return ExperimentConfig(
        command=command,
        data_path=args.data,
        layout=layout,
        split=build_split_spec(args, s, seed) if command == "train" else None,
        cv=build_cv_plan(args, s, seed) if command == "cv" else None,
        evolution=build_evolution(args, s, layout, seed),
        balance=build_adasyn(args, s, derive_seed(seed, ADASYN_STREAM)),
        baselines=args.baselines,
        mlp=build_mlp(s, derive_seed(seed, BASELINE_STREAM)),
        svm=build_svm(s, derive_seed(seed, BASELINE_STREAM)),
        out_dir=out_root(args, s),
        seed=seed,
        jobs=first(args.jobs, s.output_config.JOBS),
    )


def _prepare(args: argparse.Namespace, command: str):
    s = resolve_settings(args)
    experiment = build_experiment(args, s, command)
    experiment.check_paths()
    return experiment


def cmd_train(args: argparse.Namespace) -> int:
    experiment = _prepare(args, "train")
    if args.dry_run:
        print_config(experiment)
        logger.info("Configuration valid; nothing written")
        return 0

    data = load_dataset(args, experiment.layout)
    with run_directory(experiment.out_dir, "train", experiment.seed) as directory:
        write_config(directory, experiment)
        split = stratified_split(data, experiment.split)
        write_split_manifest(split, directory / "split.json")
        document = run_train(split, experiment, artifact_dir=directory / "runs")
        write_json(document, directory / "results.json")
        table = results_table([document])
        write_table(table, directory / "summary.csv")
    print(table.to_string(index=False))
    return 0


def cmd_cv(args: argparse.Namespace) -> int:
    experiment = _prepare(args, "cv")
    if args.dry_run:
        print_config(experiment)
        logger.info("Configuration valid; nothing written")
        return 0

    data = load_dataset(args, experiment.layout)
    with run_directory(experiment.out_dir, "cv", experiment.seed) as directory:
        write_config(directory, experiment)
        document = run_crossval(data, experiment)
        write_json(document, directory / "results.json")
        cells = pd.DataFrame(
            [cell.model_dump(include=set(CELL_COLUMNS)) for cell in document.cv.cells],
            columns=CELL_COLUMNS,
        )
        write_table(cells, directory / "cells.csv")
        table = results_table([document])
        write_table(table, directory / "summary.csv")
    print(table.to_string(index=False))
    return 0
