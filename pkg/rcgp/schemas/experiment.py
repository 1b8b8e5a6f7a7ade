"""Pydantic schemas for a whole experiment and its persisted results."""

from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, model_validator

from rcgp.core.validate import ConfigError
from rcgp.schemas.adasyn import AdasynConfig
from rcgp.schemas.baselines import BaselineRun, MethodSummary, MlpConfig, SvmConfig
from rcgp.schemas.crossval import CvPlan, CvResult
from rcgp.schemas.dataset import LayoutDescriptor, SplitSpec
from rcgp.schemas.evolution import BatchResult, EvolutionConfig


class ExperimentConfig(BaseModel):
    """Everything a ``train`` or ``cv`` run needs, resolved from settings and flags."""

    model_config = ConfigDict(frozen=True)

    command: Literal["train", "cv"]
    data_path: Path
    layout: LayoutDescriptor
    split: Optional[SplitSpec] = None
    cv: Optional[CvPlan] = None
    evolution: EvolutionConfig
    balance: Optional[AdasynConfig] = None
    baselines: bool = False
    mlp: MlpConfig = MlpConfig()
    svm: SvmConfig = SvmConfig()
    out_dir: Path = Path("results")
    seed: int = 0
    jobs: Optional[int] = None

    @model_validator(mode="after")
    def check_protocol(self):
        if self.command == "train" and self.split is None:
            raise ValueError("train needs a split spec")
        if self.command == "cv" and self.cv is None:
            raise ValueError("cv needs a cross-validation plan")
        return self

    def check_paths(self) -> None:
        """Raises ConfigError if the dataset file does not exist."""
        if not self.data_path.is_file():
            raise ConfigError(f"Dataset file not found: {self.data_path}")


class ResultDocument(BaseModel):
    """Contents of ``results.json``; the ``report`` command merges these."""

    command: Literal["train", "cv"]
    inputs: str
    summaries: list[MethodSummary]
    batch: Optional[BatchResult] = None
    cv: Optional[CvResult] = None
    baselines: list[BaselineRun] = []
