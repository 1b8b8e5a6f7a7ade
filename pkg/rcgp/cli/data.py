"""gen-data, split and balance: commands that produce datasets."""

import argparse
import logging

import pandas as pd

from rcgp.cli.common import (
    LAYOUT_NAMES,
    add_balance_arguments,
    add_common_arguments,
    add_data_arguments,
    add_split_arguments,
    build_adasyn,
    build_layout_descriptor,
    build_split_spec,
    first,
    load_dataset,
    master_seed,
    out_root,
    print_config,
    resolve_settings,
    run_directory,
    write_config,
)
from rcgp.schemas.datagen import GeneratorSpec, LinearSignal, MeanShiftSignal, NoSignal
from rcgp.schemas.dataset import Dataset
from rcgp.services.adasyn import adasyn_balance, write_balanced
from rcgp.services.datagen import generate
from rcgp.services.dataset_service import stratified_split, write_csv, write_split_manifest
from rcgp.services.reporting import write_table

logger = logging.getLogger(__name__)


def _int_list(value: str) -> tuple[int, ...]:
    return tuple(int(part) for part in value.split(",") if part.strip())


def _float_list(value: str) -> tuple[float, ...]:
    return tuple(float(part) for part in value.split(",") if part.strip())


def _counts_row(partition: str, data: Dataset) -> dict:
    counts = data.class_counts()
    return {"partition": partition, "n": len(data), "class_0": counts[0], "class_1": counts[1]}


def _write_counts(rows: list[dict], path) -> None:
    write_table(pd.DataFrame(rows, columns=["partition", "n", "class_0", "class_1"]), path)


# gen-data


def register_gen_data(subparsers) -> None:
    parser = subparsers.add_parser("gen-data", help="Generate a synthetic imbalanced dataset")
    add_common_arguments(parser)
    parser.add_argument("--layout", choices=LAYOUT_NAMES, default="dcm16")
    parser.add_argument("--timepoints", type=int, default=145)
    parser.add_argument("--minority", type=int, default=None, help="Class 1 samples")
    parser.add_argument("--majority", type=int, default=None, help="Class 0 samples")
    parser.add_argument("--signal", choices=["none", "linear", "mean_shift"], default="none")
    parser.add_argument("--delta", type=float, default=1.0, help="Mean shift of class 1")
    parser.add_argument("--informative", type=_int_list, default=None, help="e.g. 0,1,2,3")
    parser.add_argument("--weights", type=_float_list, default=None, help="Linear rule weights")
    parser.add_argument("--threshold", type=float, default=0.5, help="Linear rule threshold")
    parser.add_argument("--noise-sd", type=float, default=None)
    parser.set_defaults(handler=cmd_gen_data)


def build_generator_spec(args: argparse.Namespace, s, seed: int) -> GeneratorSpec:
    if args.signal == "linear":
        signal = LinearSignal(weights=args.weights, threshold=args.threshold)
    elif args.signal == "mean_shift":
        signal = MeanShiftSignal(delta=args.delta, informative=args.informative)
    else:
        signal = NoSignal()
    return GeneratorSpec(
        n_minority=first(args.minority, s.datagen_config.N_MINORITY),
        n_majority=first(args.majority, s.datagen_config.N_MAJORITY),
        layout=build_layout_descriptor(args),
        signal=signal,
        noise_sd=first(args.noise_sd, s.datagen_config.NOISE_SD),
        seed=seed,
    )


def cmd_gen_data(args: argparse.Namespace) -> int:
    s = resolve_settings(args)
    seed = master_seed(args, s)
    spec = build_generator_spec(args, s, seed)
    if args.dry_run:
        print_config(spec)
        return 0

    data = generate(spec)
    with run_directory(out_root(args, s), "gen-data", seed) as directory:
        write_csv(data, directory / "data.csv")
        write_config(directory, spec)
        _write_counts([_counts_row("full", data)], directory / "summary.csv")
    print(directory / "data.csv")
    return 0


# split


def register_split(subparsers) -> None:
    parser = subparsers.add_parser("split", help="Stratified train/validation/test split")
    add_common_arguments(parser)
    add_data_arguments(parser)
    add_split_arguments(parser)
    parser.set_defaults(handler=cmd_split)


def cmd_split(args: argparse.Namespace) -> int:
    s = resolve_settings(args)
    seed = master_seed(args, s)
    layout = build_layout_descriptor(args)
    spec = build_split_spec(args, s, seed)
    if args.dry_run:
        print_config({"data": args.data, "layout": layout, "split": spec})
        return 0

    data = load_dataset(args, layout)
    split = stratified_split(data, spec)
    with run_directory(out_root(args, s), "split", seed) as directory:
        for name in ("train", "val", "test"):
            write_csv(getattr(split, name), directory / f"{name}.csv")
        write_split_manifest(split, directory / "manifest.json")
        write_config(directory, {"data": args.data, "layout": layout, "split": spec})
        _write_counts(
            [_counts_row(name, getattr(split, name)) for name in ("train", "val", "test")],
            directory / "summary.csv",
        )
    print(directory / "manifest.json")
    return 0


# balance


def register_balance(subparsers) -> None:
    parser = subparsers.add_parser("balance", help="ADASYN-balance a training CSV")
    add_common_arguments(parser)
    add_data_arguments(parser)
    add_balance_arguments(parser)
    parser.set_defaults(handler=cmd_balance)


def cmd_balance(args: argparse.Namespace) -> int:
    s = resolve_settings(args)
    seed = master_seed(args, s)
    layout = build_layout_descriptor(args)
    config = build_adasyn(args, s, seed, force=True)
    if args.dry_run:
        print_config({"data": args.data, "layout": layout, "balance": config})
        return 0

    data = load_dataset(args, layout)
    balanced = adasyn_balance(data.subset(data.samples, role="train"), config)
    with run_directory(out_root(args, s), "balance", seed) as directory:
        write_balanced(balanced, directory / "balanced.csv", directory / "provenance.json")
        densities = pd.DataFrame([record.model_dump() for record in balanced.densities])
        if not densities.empty:
            write_table(densities, directory / "densities.csv")
        write_config(directory, {"data": args.data, "layout": layout, "balance": config})
        _write_counts(
            [_counts_row("original", data), _counts_row("balanced", balanced.to_dataset())],
            directory / "summary.csv",
        )
    print(directory / "balanced.csv")
    return 0
