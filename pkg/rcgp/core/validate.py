"""Exceptions and validation utilities shared by every module.

Services raise the exceptions below directly. Pydantic schemas call the
``validate_*`` helpers inside field validators and convert failures to
``ValueError`` so they surface as ``pydantic.ValidationError``.
"""

import math
from typing import Iterable


class RcgpError(Exception):
    """Base exception for all library errors."""
    pass


class ConfigError(RcgpError):
    """Raised when a settings file or experiment config is unusable."""
    pass


class InvalidSpecError(RcgpError):
    """Raised for an unusable dataset generator spec."""
    pass


# dataset


class DatasetError(RcgpError):
    """Base exception for dataset ingestion and splitting."""
    pass


class MissingColumnError(DatasetError):
    """A required CSV column is absent."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"Missing column: {column}")


class NonBinaryLabelError(DatasetError):
    """A label is not exactly 0 or 1."""

    def __init__(self, row: int, value):
        self.row = row
        self.value = value
        super().__init__(f"Non-binary label {value!r} at row {row}")


class NonFiniteFeatureError(DatasetError):
    """A feature value is NaN, infinite or unparsable."""

    def __init__(self, row: int, column: str):
        self.row = row
        self.column = column
        super().__init__(f"Non-finite feature at row {row}, column {column}")


class LayoutMismatchError(DatasetError):
    """Feature count disagrees with the layout descriptor."""
    pass


class MalformedCsvError(DatasetError):
    """A CSV file cannot be decoded or parsed."""
    pass


class EmptyDatasetError(DatasetError):
    """An operation needs at least one sample."""
    pass


class RegionCountMismatchError(DatasetError):
    """Raw timeseries do not cover exactly the four regions."""
    pass


class TimepointMismatchError(DatasetError):
    """A region series has the wrong number of timepoints."""
    pass


class MissingClassError(DatasetError):
    """One of the two classes has no samples."""
    pass


class ClassTooSmallError(DatasetError):
    """A class has too few samples for stratified splitting."""

    def __init__(self, label: int, n: int):
        self.label = label
        self.n = n
        super().__init__(f"Class {label} has only {n} samples (need at least 3)")


class ClassSmallerThanKError(DatasetError):
    """A class has fewer samples than there are folds."""

    def __init__(self, label: int, n: int, k: int):
        self.label = label
        self.n = n
        self.k = k
        super().__init__(f"Class {label} has {n} samples, fewer than k={k} folds")


# genome


class GenomeError(RcgpError):
    """Base exception for genome construction and execution."""
    pass


class InvalidProbabilityError(GenomeError):
    """A probability lies outside [0, 1] or is not allowed in this mode."""
    pass


class InputLengthMismatchError(GenomeError):
    """Input vector length differs from the genome's n_inputs."""
    pass


class NonFiniteInputError(GenomeError):
    """An input value is NaN or infinite."""
    pass


class EmptySeriesError(GenomeError):
    """Streamed execution received no frames."""
    pass


class NotRecurrentError(GenomeError):
    """Streamed execution requires a recurrent genome."""
    pass


class MalformedGenomeFileError(GenomeError):
    """A genome JSON document cannot be decoded into a valid genome."""
    pass


# balancing


class BalancingError(RcgpError):
    """Base exception for ADASYN balancing."""
    pass


class SingleClassError(BalancingError):
    """Balancing or SVM training needs both classes."""
    pass


class MinorityTooSmallError(BalancingError):
    """The minority class has fewer than two samples."""
    pass


class PoolTooSmallError(BalancingError):
    """K-NN pool holds fewer candidates than k."""
    pass


class LeakageError(BalancingError):
    """Balancing was attempted on a validation or test partition."""
    pass


def validate_probability(value: float, name: str = "probability") -> float:
    """Check that ``value`` is a finite probability in [0, 1].

    Raises:
        InvalidProbabilityError: If the value is outside [0, 1]
    """
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise InvalidProbabilityError(f"{name} must be a number")
    if not math.isfinite(value) or value < 0.0 or value > 1.0:
        raise InvalidProbabilityError(f"{name} must lie in [0, 1], got {value}")
    return float(value)


def validate_fractions(fractions: Iterable[float], tolerance: float = 1e-9) -> None:
    """Check split fractions lie in [0, 1] and sum to 1.

    Raises:
        ValueError: If any fraction is out of range or the sum is off
    """
    fractions = list(fractions)
    for fraction in fractions:
        if not 0.0 <= fraction <= 1.0:
            raise ValueError(f"Fraction {fraction} outside [0, 1]")
    if abs(sum(fractions) - 1.0) > tolerance:
        raise ValueError(f"Fractions must sum to 1, got {sum(fractions)}")


def validate_binary_label(value, row: int) -> int:
    """Return ``value`` as an int label, or raise NonBinaryLabelError."""
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise NonBinaryLabelError(row, value)
    if number not in (0.0, 1.0):
        raise NonBinaryLabelError(row, value)
    return int(number)


def validate_finite(values: Iterable[float]) -> None:
    """Raise NonFiniteInputError if any value is NaN or infinite."""
    for value in values:
        if not math.isfinite(value):
            raise NonFiniteInputError(f"Non-finite input value {value}")
