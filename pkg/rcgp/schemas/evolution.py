"""Pydantic schemas for the (1+lambda) evolutionary strategy and its results."""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from rcgp.core.validate import InvalidProbabilityError, validate_probability
from rcgp.schemas.genome import Genome, GenomeConfig


class EvolutionConfig(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lambda_: int = Field(4, ge=1, alias="lambda")
    mutation_rate: float = Field(0.1, gt=0.0, le=1.0)
    max_iterations: int = Field(15000, ge=0)
    n_runs: int = Field(10, ge=1)
    recurrent_prob: float = 0.0
    genome: GenomeConfig
    classify_mode: Literal["wide", "streamed"] = "wide"
    passes: int = Field(1, ge=1)
    select_on_validation: bool = False
    seed: int = 0

    @field_validator("recurrent_prob")
    @classmethod
    def check_recurrent_prob(cls, v):
        try:
            return validate_probability(v, "recurrent_prob")
        except InvalidProbabilityError as e:
            raise ValueError(str(e))

    @model_validator(mode="after")
    def check_mode(self):
        if self.recurrent_prob > 0.0 and not self.genome.recurrent:
            raise ValueError("recurrent_prob > 0 requires a recurrent genome")
        if self.classify_mode == "streamed" and not self.genome.recurrent:
            raise ValueError("streamed classification requires a recurrent genome")
        return self

    @property
    def method_name(self) -> str:
        return "RCGP" if self.genome.recurrent else "CGP"


class HistoryPoint(BaseModel):
    iteration: int
    fitness: float


class RunResult(BaseModel):
    """Winning chromosome and accuracies of one evolutionary run."""

    winning_genome: Genome
    train_acc: float = Field(..., ge=0.0, le=1.0)
    val_acc: Optional[float] = Field(None, ge=0.0, le=1.0)
    test_acc: Optional[float] = Field(None, ge=0.0, le=1.0)
    iterations_used: int
    evaluations: int
    best_train_fitness: float = Field(..., ge=0.0, le=1.0)
    seed: int
    fitness_history: list[HistoryPoint] = []
    best_val_genome: Optional[Genome] = None
    best_val_acc: Optional[float] = None


class AccuracySummary(BaseModel):
    """Mean and sample SD (n-1 denominator) of per-run accuracies."""

    mean: Optional[float] = None
    sd: float = 0.0
    sd_defined: bool = False
    n: int = 0
    min: Optional[float] = None
    max: Optional[float] = None


class BatchResult(BaseModel):
    method: str = "CGP"
    runs: list[RunResult]
    train: AccuracySummary
    val: AccuracySummary
    test: AccuracySummary
    seed: int
