"""Pydantic schemas for repeated stratified k-fold cross-validation."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from rcgp.schemas.adasyn import AdasynConfig
from rcgp.schemas.baselines import MethodSummary, MlpConfig, SvmConfig


class CvPlan(BaseModel):
    """Test = fold i, validation = fold (i + 1) mod k, training = the rest."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(10, ge=3)
    repeats: int = Field(10, ge=1)
    seed: int = 0
    balance: Optional[AdasynConfig] = None
    runs_per_cell: int = Field(1, ge=1)
    mlp: Optional[MlpConfig] = None
    svm: Optional[SvmConfig] = None


class CvCell(BaseModel):
    method: str
    repeat: int
    fold: int
    seed: int
    train_acc: float
    val_acc: Optional[float] = None
    test_acc: Optional[float] = None
    train_counts: dict[int, int] = {}


class CvResult(BaseModel):
    plan: CvPlan
    cells: list[CvCell]
    summaries: list[MethodSummary]

    def summary(self, method: str) -> MethodSummary:
        for summary in self.summaries:
            if summary.method == method:
                return summary
        raise KeyError(method)
