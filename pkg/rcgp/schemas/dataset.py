"""Pydantic schemas for labelled datasets, feature layouts and splits."""

from enum import Enum
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from rcgp.core.validate import validate_fractions


class Region(str, Enum):
    PCC = "PCC"
    MPFC = "mPFC"
    RIPC = "RIPC"
    LIPC = "LIPC"


# region-major order used by FourColumn, SingleVector and Dcm16
REGION_ORDER: tuple[Region, ...] = (Region.PCC, Region.MPFC, Region.RIPC, Region.LIPC)

DCM_VALUES_PER_REGION = 4


class LayoutMode(str, Enum):
    PER_REGION = "per_region"
    FOUR_COLUMN = "four_column"
    SINGLE_VECTOR = "single_vector"
    DCM16 = "dcm16"


class LayoutDescriptor(BaseModel):
    """How a sample's feature vector is laid out."""

    model_config = ConfigDict(frozen=True)

    mode: LayoutMode
    region: Optional[Region] = Field(None, description="Only for per_region")
    timepoints: int = Field(145, gt=0)
    region_order: tuple[Region, ...] = REGION_ORDER

    @model_validator(mode="after")
    def check_region(self):
        if self.mode == LayoutMode.PER_REGION and self.region is None:
            raise ValueError("per_region layout needs a region")
        if self.mode != LayoutMode.PER_REGION and self.region is not None:
            raise ValueError(f"{self.mode.value} layout takes no region")
        if self.region_order != REGION_ORDER:
            raise ValueError("region order is fixed to PCC, mPFC, RIPC, LIPC")
        return self

    @property
    def n_features(self) -> int:
        if self.mode == LayoutMode.PER_REGION:
            return self.timepoints
        if self.mode == LayoutMode.DCM16:
            return len(REGION_ORDER) * DCM_VALUES_PER_REGION
        return len(REGION_ORDER) * self.timepoints

    @property
    def frame_width(self) -> int:
        """Inputs per frame when a sample is streamed through a recurrent genome."""
        if self.mode == LayoutMode.FOUR_COLUMN:
            return len(REGION_ORDER)
        if self.mode == LayoutMode.DCM16:
            return self.n_features
        return 1

    @property
    def label(self) -> str:
        """Short name used in report tables."""
        if self.mode == LayoutMode.PER_REGION:
            return self.region.value
        return {
            LayoutMode.FOUR_COLUMN: "four-column",
            LayoutMode.SINGLE_VECTOR: "single-vector",
            LayoutMode.DCM16: "dcm16",
        }[self.mode]

    @classmethod
    def from_name(cls, name: str, timepoints: int = 145) -> "LayoutDescriptor":
        """Build a layout from a CLI name such as ``pcc`` or ``single-vector``."""
        key = name.strip().lower().replace("_", "-")
        regions = {region.value.lower(): region for region in Region}
        if key in regions:
            return cls(mode=LayoutMode.PER_REGION, region=regions[key], timepoints=timepoints)
        modes = {
            "four-column": LayoutMode.FOUR_COLUMN,
            "single-vector": LayoutMode.SINGLE_VECTOR,
            "dcm16": LayoutMode.DCM16,
        }
        if key not in modes:
            raise ValueError(f"Unknown layout: {name}")
        return cls(mode=modes[key], timepoints=timepoints)


class Sample(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    group_tag: str = ""
    label: Literal[0, 1]
    features: tuple[float, ...]
    synthetic: bool = False


class Dataset(BaseModel):
    """Immutable labelled sample collection."""

    model_config = ConfigDict(frozen=True)

    samples: tuple[Sample, ...]
    n_features: int = Field(..., gt=0)
    layout_meta: LayoutDescriptor
    role: Literal["full", "train", "val", "test"] = "full"

    @model_validator(mode="after")
    def check_samples(self):
        seen = set()
        for sample in self.samples:
            if len(sample.features) != self.n_features:
                raise ValueError(
                    f"Sample {sample.id} has {len(sample.features)} features, "
                    f"expected {self.n_features}"
                )
            if sample.id in seen:
                raise ValueError(f"Duplicate sample id: {sample.id}")
            seen.add(sample.id)
        return self

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def ids(self) -> list[str]:
        return [sample.id for sample in self.samples]

    @property
    def X(self) -> np.ndarray:
        if not self.samples:
            return np.empty((0, self.n_features), dtype=np.float64)
        return np.array([sample.features for sample in self.samples], dtype=np.float64)

    @property
    def y(self) -> np.ndarray:
        return np.array([sample.label for sample in self.samples], dtype=np.int64)

    def class_counts(self) -> dict[int, int]:
        labels = self.y
        return {0: int(np.sum(labels == 0)), 1: int(np.sum(labels == 1))}

    def subset(self, samples, role: Optional[str] = None) -> "Dataset":
        """New Dataset over ``samples`` with the same layout."""
        return Dataset(
            samples=tuple(samples),
            n_features=self.n_features,
            layout_meta=self.layout_meta,
            role=role or self.role,
        )


class RawSample(BaseModel):
    """One sample's per-region timeseries before a layout is applied."""

    id: str
    group_tag: str = ""
    label: Literal[0, 1]
    regions: dict[Region, tuple[float, ...]]


class SplitSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    train_frac: float = 0.70
    val_frac: float = 0.15
    test_frac: float = 0.15
    seed: int = 0

    @model_validator(mode="after")
    def check_fractions(self):
        validate_fractions((self.train_frac, self.val_frac, self.test_frac))
        return self


class Split(BaseModel):
    model_config = ConfigDict(frozen=True)

    train: Dataset
    val: Dataset
    test: Dataset
    spec: SplitSpec

    @model_validator(mode="after")
    def check_disjoint(self):
        train, val, test = set(self.train.ids), set(self.val.ids), set(self.test.ids)
        if train & val or train & test or val & test:
            raise ValueError("Split partitions overlap")
        return self


class SplitManifest(BaseModel):
    """JSON form of a split: the seed, fractions and ids per partition."""

    seed: int
    train_frac: float
    val_frac: float
    test_frac: float
    train: list[str]
    val: list[str]
    test: list[str]

    @field_validator("train", "val", "test")
    @classmethod
    def no_duplicates(cls, v):
        if len(set(v)) != len(v):
            raise ValueError("Duplicate ids in manifest partition")
        return v
