"""Planted-signal datasets shaped like the region timeseries and DCM features.

Class 1 is the minority class. Features are Gaussian noise; the signal, if
any, is either a linear decision rule (labels assigned by rejection sampling
so class counts stay exact) or a mean shift of class 1 on a feature subset.
"""

import logging

import numpy as np

from rcgp.core.seeding import make_rng
from rcgp.core.validate import InvalidSpecError
from rcgp.schemas.datagen import GeneratorSpec, LinearSignal, MeanShiftSignal
from rcgp.schemas.dataset import Dataset, Sample

logger = logging.getLogger(__name__)

MAX_REJECTION_ROUNDS = 1000

GROUP_TAGS = {0: "control", 1: "patient"}


def _weights(spec: GeneratorSpec) -> np.ndarray:
    signal = spec.signal
    n = spec.layout.n_features
    if signal.weights is not None:
        return np.asarray(signal.weights, dtype=np.float64)
    w = np.zeros(n)
    w[list(spec.informative_features())] = 1.0
    return w


def _linear_rows(spec: GeneratorSpec, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    w = _weights(spec)
    threshold = spec.signal.threshold
    n = spec.layout.n_features
    wanted = {1: spec.n_minority, 0: spec.n_majority}
    accepted = {0: [], 1: []}
    batch = 4 * (spec.n_minority + spec.n_majority)

    for _ in range(MAX_REJECTION_ROUNDS):
        draws = rng.normal(0.0, spec.noise_sd, size=(batch, n))
        labels = (draws @ w >= threshold).astype(np.int64)
        for label in (0, 1):
            room = wanted[label] - len(accepted[label])
            if room > 0:
                accepted[label].extend(draws[labels == label][:room])
        if all(len(accepted[label]) == wanted[label] for label in (0, 1)):
            break
    else:
        raise InvalidSpecError(
            f"Linear rule with threshold {threshold} cannot produce "
            f"{spec.n_minority}/{spec.n_majority} samples at noise_sd={spec.noise_sd}"
        )

    X = np.vstack([np.asarray(accepted[1]), np.asarray(accepted[0])])
    y = np.concatenate([np.ones(spec.n_minority, np.int64), np.zeros(spec.n_majority, np.int64)])
    order = rng.permutation(len(y))
    return X[order], y[order]


def _shifted_rows(spec: GeneratorSpec, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    # labels first, then noise: a zero shift reproduces the no-signal draw exactly
    y = np.concatenate([np.ones(spec.n_minority, np.int64), np.zeros(spec.n_majority, np.int64)])
    y = y[rng.permutation(len(y))]
    X = rng.normal(0.0, spec.noise_sd, size=(len(y), spec.layout.n_features))
    if isinstance(spec.signal, MeanShiftSignal):
        informative = list(spec.informative_features())
        X[np.ix_(y == 1, informative)] += spec.signal.delta
    return X, y


def generate(spec: GeneratorSpec) -> Dataset:
    """Generate a dataset; identical specs give identical datasets.

    Raises:
        InvalidSpecError: If a linear rule cannot yield the requested counts
    """
    rng = make_rng(spec.seed)
    if isinstance(spec.signal, LinearSignal):
        X, y = _linear_rows(spec, rng)
    else:
        X, y = _shifted_rows(spec, rng)

    width = len(str(len(y) - 1))
    samples = tuple(
        Sample(
            id=f"s{index:0{width}d}",
            group_tag=GROUP_TAGS[int(label)],
            label=int(label),
            features=tuple(row.tolist()),
        )
        for index, (row, label) in enumerate(zip(X, y))
    )
    logger.info(
        "Generated %d samples (%d minority / %d majority), %d features, %s signal",
        len(samples), spec.n_minority, spec.n_majority, spec.layout.n_features, spec.signal.kind,
    )
    return Dataset(samples=samples, n_features=spec.layout.n_features, layout_meta=spec.layout)
