"""Pydantic schemas for ADASYN balancing."""

from pydantic import BaseModel, ConfigDict, Field

from rcgp.schemas.dataset import Dataset, Sample


class AdasynConfig(BaseModel):
    """K neighbours, balance degree beta and imbalance threshold d_th."""

    model_config = ConfigDict(frozen=True)

    k_neighbors: int = Field(5, ge=1)
    beta: float = Field(1.0, ge=0.0, le=1.0)
    imbalance_threshold: float = Field(1.0, gt=0.0, le=1.0)
    normalize: bool = False
    seed: int = 0


class Provenance(BaseModel):
    """Enough to rebuild a synthetic point: base + lambda * (neighbor - base)."""

    seed_index: int
    base_id: str
    neighbor_id: str
    lambda_: float = Field(..., ge=0.0, le=1.0, alias="lambda")

    model_config = ConfigDict(populate_by_name=True)


class SyntheticSample(BaseModel):
    sample: Sample
    provenance: Provenance


class DensityRecord(BaseModel):
    """Per-minority-point ratio r_i, normalised ratio r_hat_i and quota g_i."""

    sample_id: str
    ratio: float
    normalized: float
    n_generated: int


class BalancedSet(BaseModel):
    original: Dataset
    synthetic: list[SyntheticSample] = []
    densities: list[DensityRecord] = []
    minority_label: int

    def to_dataset(self) -> Dataset:
        """Original plus synthetic samples as one training Dataset."""
        return self.original.subset(
            list(self.original.samples) + [item.sample for item in self.synthetic],
            role="train",
        )
