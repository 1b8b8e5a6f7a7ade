"""Pydantic schemas for the reference baseline classifiers."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from rcgp.schemas.evolution import AccuracySummary


class MlpConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    hidden_units: int = Field(10, ge=1)
    learning_rate: float = Field(0.01, gt=0.0)
    epochs: int = Field(500, ge=0)
    batch_size: int = Field(8, ge=1)
    seed: int = 0


class MlpModel(BaseModel):
    """One logistic hidden layer and a logistic output unit."""

    config: MlpConfig
    W1: list[list[float]]
    b1: list[float]
    W2: list[float]
    b2: float
    mean: list[float]
    scale: list[float]


class SvmConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    regularization: float = Field(1e-3, gt=0.0)
    learning_rate: float = Field(0.1, gt=0.0)
    epochs: int = Field(200, ge=0)
    batch_size: int = Field(16, ge=1)
    seed: int = 0


class SvmModel(BaseModel):
    """Linear decision rule w.x + b >= 0 -> class 1, on z-scored inputs."""

    config: SvmConfig
    weights: list[float]
    bias: float
    mean: list[float]
    scale: list[float]


class BaselineRun(BaseModel):
    method: str
    seed: int
    train_acc: float = Field(..., ge=0.0, le=1.0)
    val_acc: Optional[float] = Field(None, ge=0.0, le=1.0)
    test_acc: Optional[float] = Field(None, ge=0.0, le=1.0)


class MlpFit(BaseModel):
    model: MlpModel
    run: BaselineRun


class SvmFit(BaseModel):
    model: SvmModel
    run: BaselineRun


class MethodSummary(BaseModel):
    """Aggregated accuracies of one method, one row of a results table."""

    method: str
    train: AccuracySummary
    val: AccuracySummary
    test: AccuracySummary
    runs: list[BaselineRun] = []
