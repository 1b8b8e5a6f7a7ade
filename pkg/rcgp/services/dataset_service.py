"""Dataset ingestion, feature layouts and stratified splitting."""

import json
import logging
import math
import re
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from rcgp.core.seeding import make_rng
from rcgp.core.validate import (
    ClassTooSmallError,
    DatasetError,
    EmptyDatasetError,
    LayoutMismatchError,
    MalformedCsvError,
    MissingClassError,
    MissingColumnError,
    NonFiniteFeatureError,
    RegionCountMismatchError,
    TimepointMismatchError,
    validate_binary_label,
)
from rcgp.schemas.dataset import (
    DCM_VALUES_PER_REGION,
    REGION_ORDER,
    Dataset,
    LayoutDescriptor,
    LayoutMode,
    RawSample,
    Region,
    Sample,
    Split,
    SplitManifest,
    SplitSpec,
)

logger = logging.getLogger(__name__)

GROUP_COLUMN = "group"
SYNTHETIC_COLUMN = "synthetic"
MIN_CLASS_SIZE = 3

# tolerance on frac * n before flooring, so 0.1 * 30 floors to 3
_FLOOR_EPSILON = 1e-9


def _read_frame(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise MalformedCsvError(f"Cannot parse {path}: {e}")


def load_csv(
    path: Path,
    label_column: str = "label",
    id_column: str = "id",
    *,
    layout: LayoutDescriptor,
) -> Dataset:
    """Load one-row-per-sample CSV data.

    Columns other than id, label, ``group`` and ``synthetic`` are features,
    in file order. Row numbers in errors count data rows from 1.

    Raises:
        MissingColumnError, NonBinaryLabelError, NonFiniteFeatureError,
        LayoutMismatchError, EmptyDatasetError
    """
    frame = _read_frame(Path(path))
    for column in (id_column, label_column):
        if column not in frame.columns:
            raise MissingColumnError(column)
    if frame.empty:
        raise EmptyDatasetError(f"{path} has no data rows")

    reserved = {id_column, label_column, GROUP_COLUMN, SYNTHETIC_COLUMN}
    feature_columns = [column for column in frame.columns if column not in reserved]
    if not feature_columns:
        raise LayoutMismatchError("No feature columns")

    values = frame[feature_columns].apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        row, col = bad[0]
        raise NonFiniteFeatureError(int(row) + 1, feature_columns[col])

    if layout.n_features != len(feature_columns):
        raise LayoutMismatchError(
            f"{len(feature_columns)} feature columns, layout {layout.label} needs {layout.n_features}"
        )

    groups = frame[GROUP_COLUMN] if GROUP_COLUMN in frame.columns else None
    synthetic = frame[SYNTHETIC_COLUMN] if SYNTHETIC_COLUMN in frame.columns else None
    samples = []
    for i in range(len(frame)):
        samples.append(
            Sample(
                id=frame[id_column].iloc[i],
                group_tag=groups.iloc[i] if groups is not None else "",
                label=validate_binary_label(frame[label_column].iloc[i], i + 1),
                features=tuple(values[i].tolist()),
                synthetic=synthetic is not None and synthetic.iloc[i].strip() in ("1", "true", "True"),
            )
        )

    dataset = Dataset(samples=tuple(samples), n_features=len(feature_columns), layout_meta=layout)
    counts = dataset.class_counts()
    logger.info(
        "Loaded %s: %d samples (%d class 1, %d class 0), %d features",
        path, len(dataset), counts[1], counts[0], dataset.n_features,
    )
    return dataset


def write_csv(dataset: Dataset, path: Path) -> None:
    """Write the standard schema: id, group, label, [synthetic], f0..f{N-1}."""
    columns = {
        "id": [s.id for s in dataset.samples],
        GROUP_COLUMN: [s.group_tag for s in dataset.samples],
        "label": [s.label for s in dataset.samples],
    }
    if any(s.synthetic for s in dataset.samples):
        columns[SYNTHETIC_COLUMN] = [int(s.synthetic) for s in dataset.samples]
    frame = pd.DataFrame(columns)
    features = pd.DataFrame(dataset.X, columns=[f"f{j}" for j in range(dataset.n_features)])
    frame = pd.concat([frame, features], axis=1)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


_REGION_COLUMN = re.compile(r"^([a-zA-Z]+)_t(\d+)$")


def load_region_csv(
    path: Path, label_column: str = "label", id_column: str = "id"
) -> list[RawSample]:
    """Load region-tagged columns (``pcc_t0``, ``mpfc_t0``, ...) into raw samples."""
    frame = _read_frame(Path(path))
    for column in (id_column, label_column):
        if column not in frame.columns:
            raise MissingColumnError(column)
    if frame.empty:
        raise EmptyDatasetError(f"{path} has no data rows")

    by_name = {region.value.lower(): region for region in Region}
    region_columns: dict[Region, list[tuple[int, str]]] = {}
    for column in frame.columns:
        match = _REGION_COLUMN.match(column)
        if match and match.group(1).lower() in by_name:
            region = by_name[match.group(1).lower()]
            region_columns.setdefault(region, []).append((int(match.group(2)), column))

    raw = []
    for i in range(len(frame)):
        regions = {}
        for region, columns in region_columns.items():
            series = []
            for _, column in sorted(columns):
                value = pd.to_numeric(frame[column].iloc[i], errors="coerce")
                if not math.isfinite(value):
                    raise NonFiniteFeatureError(i + 1, column)
                series.append(float(value))
            regions[region] = tuple(series)
        raw.append(
            RawSample(
                id=frame[id_column].iloc[i],
                group_tag=frame[GROUP_COLUMN].iloc[i] if GROUP_COLUMN in frame.columns else "",
                label=validate_binary_label(frame[label_column].iloc[i], i + 1),
                regions=regions,
            )
        )
    return raw


def build_layout(raw: Sequence[RawSample], layout: LayoutDescriptor) -> Dataset:
    """Arrange per-region series into the feature vectors of ``layout``.

    FourColumn and SingleVector concatenate the regions region-major in the
    fixed order PCC, mPFC, RIPC, LIPC; FourColumn is read back as four
    logical input columns. Dcm16 takes the 4 coupling values of each region.

    Raises:
        RegionCountMismatchError, TimepointMismatchError
    """
    expected = DCM_VALUES_PER_REGION if layout.mode == LayoutMode.DCM16 else layout.timepoints
    samples = []
    for item in raw:
        if set(item.regions) != set(REGION_ORDER):
            raise RegionCountMismatchError(
                f"Sample {item.id} has regions {sorted(r.value for r in item.regions)}, "
                f"expected {[r.value for r in REGION_ORDER]}"
            )
        for region in REGION_ORDER:
            if len(item.regions[region]) != expected:
                raise TimepointMismatchError(
                    f"Sample {item.id} region {region.value} has "
                    f"{len(item.regions[region])} values, expected {expected}"
                )
        if layout.mode == LayoutMode.PER_REGION:
            features = item.regions[layout.region]
        else:
            features = tuple(v for region in REGION_ORDER for v in item.regions[region])
        samples.append(
            Sample(id=item.id, group_tag=item.group_tag, label=item.label, features=features)
        )
    return Dataset(samples=tuple(samples), n_features=layout.n_features, layout_meta=layout)


def _partition_sizes(n: int, spec: SplitSpec) -> tuple[int, int, int]:
    n_test = math.floor(spec.test_frac * n + _FLOOR_EPSILON)
    n_val = math.floor(spec.val_frac * n + _FLOOR_EPSILON)
    return n - n_test - n_val, n_val, n_test


def stratified_split(data: Dataset, spec: SplitSpec) -> Split:
    """Per-class seeded shuffle; test and validation floor, remainder to training.

    Partitions keep the input order of their samples.

    Raises:
        MissingClassError, ClassTooSmallError
    """
    labels = data.y
    rng = make_rng(spec.seed)
    role_of = {}
    for label in (0, 1):
        indices = np.flatnonzero(labels == label)
        if indices.size == 0:
            raise MissingClassError(f"Class {label} is absent")
        if indices.size < MIN_CLASS_SIZE:
            raise ClassTooSmallError(label, int(indices.size))
        shuffled = rng.permutation(indices)
        n_train, n_val, n_test = _partition_sizes(indices.size, spec)
        for index in shuffled[:n_test]:
            role_of[int(index)] = "test"
        for index in shuffled[n_test:n_test + n_val]:
            role_of[int(index)] = "val"
        for index in shuffled[n_test + n_val:]:
            role_of[int(index)] = "train"

    parts = {
        role: data.subset([s for i, s in enumerate(data.samples) if role_of[i] == role], role=role)
        for role in ("train", "val", "test")
    }
    logger.info(
        "Split %d samples into train=%d val=%d test=%d (seed %d)",
        len(data), len(parts["train"]), len(parts["val"]), len(parts["test"]), spec.seed,
    )
    return Split(train=parts["train"], val=parts["val"], test=parts["test"], spec=spec)


def split_manifest(split: Split) -> SplitManifest:
    return SplitManifest(
        seed=split.spec.seed,
        train_frac=split.spec.train_frac,
        val_frac=split.spec.val_frac,
        test_frac=split.spec.test_frac,
        train=split.train.ids,
        val=split.val.ids,
        test=split.test.ids,
    )


def write_split_manifest(split: Split, path: Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(split_manifest(split).model_dump(), indent=2, sort_keys=True) + "\n")


def read_split_manifest(path: Path, data: Dataset) -> Split:
    """Rebuild a Split of ``data`` from a manifest written by write_split_manifest."""
    manifest = SplitManifest.model_validate_json(Path(path).read_text())
    by_id = {s.id: s for s in data.samples}
    missing = [i for i in manifest.train + manifest.val + manifest.test if i not in by_id]
    if missing:
        raise DatasetError(f"Manifest ids not in dataset: {missing[:5]}")
    spec = SplitSpec(
        train_frac=manifest.train_frac,
        val_frac=manifest.val_frac,
        test_frac=manifest.test_frac,
        seed=manifest.seed,
    )
    return Split(
        train=data.subset([by_id[i] for i in manifest.train], role="train"),
        val=data.subset([by_id[i] for i in manifest.val], role="val"),
        test=data.subset([by_id[i] for i in manifest.test], role="test"),
        spec=spec,
    )
