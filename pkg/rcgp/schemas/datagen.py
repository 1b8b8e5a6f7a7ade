"""Pydantic schemas for the synthetic, class-imbalanced dataset generator."""

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from rcgp.core.validate import InvalidSpecError
from rcgp.schemas.dataset import LayoutDescriptor, LayoutMode

DEFAULT_INFORMATIVE = 4


class NoSignal(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["none"] = "none"


class LinearSignal(BaseModel):
    """Label 1 iff w . x >= threshold.

    Without explicit weights, the first four features carry unit weight.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["linear"] = "linear"
    weights: Optional[tuple[float, ...]] = None
    threshold: float = 0.5


class MeanShiftSignal(BaseModel):
    """Class 1 is shifted by ``delta`` on the informative features."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["mean_shift"] = "mean_shift"
    delta: float = 1.0
    informative: Optional[tuple[int, ...]] = None


Signal = Union[NoSignal, LinearSignal, MeanShiftSignal]


def check_signal_shape(signal: Signal, n_features: int) -> None:
    """Raise InvalidSpecError if the signal does not fit ``n_features``."""
    if isinstance(signal, LinearSignal) and signal.weights is not None:
        if len(signal.weights) != n_features:
            raise InvalidSpecError(
                f"Linear signal has {len(signal.weights)} weights for {n_features} features"
            )
        if not any(signal.weights):
            raise InvalidSpecError("Linear signal weights are all zero")
    if isinstance(signal, MeanShiftSignal) and signal.informative is not None:
        if not signal.informative:
            raise InvalidSpecError("Informative feature subset is empty")
        bad = [i for i in signal.informative if not 0 <= i < n_features]
        if bad:
            raise InvalidSpecError(f"Informative features {bad} outside 0..{n_features - 1}")


class GeneratorSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_minority: int = Field(39, ge=1)
    n_majority: int = Field(111, ge=1)
    layout: LayoutDescriptor = LayoutDescriptor(mode=LayoutMode.DCM16)
    signal: Signal = Field(NoSignal(), discriminator="kind")
    noise_sd: float = Field(1.0, gt=0.0)
    seed: int = 0

    @model_validator(mode="after")
    def check_signal(self):
        try:
            check_signal_shape(self.signal, self.layout.n_features)
        except InvalidSpecError as e:
            raise ValueError(str(e))
        return self

    def informative_features(self) -> tuple[int, ...]:
        """Feature indices carrying the planted signal (empty for no signal)."""
        n = self.layout.n_features
        signal = self.signal
        if isinstance(signal, MeanShiftSignal):
            if signal.informative is not None:
                return tuple(signal.informative)
            return tuple(range(min(DEFAULT_INFORMATIVE, n)))
        if isinstance(signal, LinearSignal):
            if signal.weights is not None:
                return tuple(i for i, w in enumerate(signal.weights) if w != 0.0)
            return tuple(range(min(DEFAULT_INFORMATIVE, n)))
        return ()
