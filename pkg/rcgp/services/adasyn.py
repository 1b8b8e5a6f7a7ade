"""ADASYN oversampling of the minority class in a training partition.

Density ratios use the K nearest neighbours in the whole training set; new
points interpolate towards one of the K nearest minority neighbours. The
number of points per minority sample is apportioned by largest remainder so
exactly G = round((m_l - m_s) * beta) points are produced.
"""

import json
import logging
import math
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from rcgp.core.seeding import make_rng
from rcgp.core.validate import (
    LeakageError,
    MinorityTooSmallError,
    PoolTooSmallError,
    SingleClassError,
)
from rcgp.schemas.adasyn import (
    AdasynConfig,
    BalancedSet,
    DensityRecord,
    Provenance,
    SyntheticSample,
)
from rcgp.schemas.dataset import Dataset, Sample
from rcgp.services.dataset_service import write_csv

logger = logging.getLogger(__name__)


def knn(
    query: Sequence[float],
    pool: np.ndarray,
    k: int,
    exclude: Optional[int] = None,
) -> list[int]:
    """Exact Euclidean k nearest neighbours; ties go to the lower index.

    Args:
        query: Query point
        pool: Candidate points, one per row
        k: Number of neighbours
        exclude: Pool index of the query itself, left out of its neighbourhood

    Raises:
        PoolTooSmallError: If fewer than k candidates remain
    """
    pool = np.asarray(pool, dtype=np.float64)
    available = len(pool) - (1 if exclude is not None else 0)
    if k > available:
        raise PoolTooSmallError(f"Need {k} neighbours, pool has {available}")
    distances = np.sum((pool - np.asarray(query, dtype=np.float64)) ** 2, axis=1)
    if exclude is not None:
        distances[exclude] = np.inf
    order = np.argsort(distances, kind="stable")
    if exclude is not None:
        order = order[order != exclude]
    return order[:k].tolist()


def largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    """Integer quotas proportional to ``weights`` that sum exactly to ``total``.

    Leftover units go to the largest fractional parts, lower index first.
    """
    quotas = np.asarray(weights, dtype=np.float64) * total
    counts = np.floor(quotas).astype(np.int64)
    leftover = total - int(counts.sum())
    if leftover > 0:
        fractional = quotas - counts
        order = np.lexsort((np.arange(len(quotas)), -fractional))
        counts[order[:leftover]] += 1
    return counts


def _distance_space(X: np.ndarray, normalize: bool) -> np.ndarray:
    if not normalize:
        return X
    scale = X.std(axis=0)
    scale[scale == 0.0] = 1.0
    return (X - X.mean(axis=0)) / scale


def synthetic_total(m_minority: int, m_majority: int, config: AdasynConfig) -> int:
    """G = round((m_l - m_s) * beta), or 0 when the imbalance degree reaches d_th."""
    if m_majority == 0 or m_minority / m_majority >= config.imbalance_threshold:
        return 0
    return int(math.floor((m_majority - m_minority) * config.beta + 0.5))


def adasyn_balance(train: Dataset, config: AdasynConfig) -> BalancedSet:
    """Generate synthetic minority samples for a training partition.

    Raises:
        LeakageError: If ``train`` is a validation or test partition
        SingleClassError: If only one class is present
        MinorityTooSmallError: If the minority class has fewer than 2 samples
    """
    if train.role in ("val", "test"):
        raise LeakageError(f"ADASYN must not touch the {train.role} partition")

    counts = train.class_counts()
    if counts[0] == 0 or counts[1] == 0:
        raise SingleClassError("ADASYN needs both classes")
    minority = 1 if counts[1] <= counts[0] else 0
    m_s, m_l = counts[minority], counts[1 - minority]
    if m_s < 2:
        raise MinorityTooSmallError(f"Minority class {minority} has {m_s} sample(s)")

    G = synthetic_total(m_s, m_l, config)
    if G == 0:
        logger.info("Training set needs no synthetic samples (%d/%d)", m_s, m_l)
        return BalancedSet(original=train, minority_label=minority)

    X, y = train.X, train.y
    D = _distance_space(X, config.normalize)
    minority_idx = np.flatnonzero(y == minority)

    k_density = min(config.k_neighbors, len(train) - 1)
    ratios = np.empty(m_s, dtype=np.float64)
    for i, index in enumerate(minority_idx):
        neighbors = knn(D[index], D, k_density, exclude=int(index))
        ratios[i] = np.sum(y[neighbors] != minority) / k_density

    if ratios.sum() == 0.0:
        logger.warning("No minority sample borders the majority class; generating uniformly")
        normalized = np.full(m_s, 1.0 / m_s)
    else:
        normalized = ratios / ratios.sum()
    quotas = largest_remainder(normalized, G)

    rng = make_rng(config.seed)
    D_min, X_min = D[minority_idx], X[minority_idx]
    k_gen = min(config.k_neighbors, m_s - 1)
    synthetic = []
    for i, base_index in enumerate(minority_idx):
        if quotas[i] == 0:
            continue
        base = train.samples[base_index]
        neighbors = knn(D_min[i], D_min, k_gen, exclude=i)
        for j in range(int(quotas[i])):
            z = neighbors[int(rng.integers(0, k_gen))]
            lam = float(rng.random())
            point = X_min[i] + lam * (X_min[z] - X_min[i])
            neighbor = train.samples[minority_idx[z]]
            synthetic.append(
                SyntheticSample(
                    sample=Sample(
                        id=f"{base.id}~syn{j}",
                        group_tag=base.group_tag,
                        label=minority,
                        features=tuple(point.tolist()),
                        synthetic=True,
                    ),
                    provenance=Provenance(
                        seed_index=i, base_id=base.id, neighbor_id=neighbor.id, lambda_=lam
                    ),
                )
            )

    densities = [
        DensityRecord(
            sample_id=train.samples[index].id,
            ratio=float(ratios[i]),
            normalized=float(normalized[i]),
            n_generated=int(quotas[i]),
        )
        for i, index in enumerate(minority_idx)
    ]
    logger.info(
        "ADASYN generated %d synthetic class-%d samples (%d -> %d vs %d)",
        len(synthetic), minority, m_s, m_s + len(synthetic), m_l,
    )
    return BalancedSet(
        original=train, synthetic=synthetic, densities=densities, minority_label=minority
    )


def reconstruct(item: SyntheticSample, train: Dataset) -> np.ndarray:
    """Recompute a synthetic point from its provenance."""
    by_id = {s.id: s for s in train.samples}
    base = np.asarray(by_id[item.provenance.base_id].features)
    neighbor = np.asarray(by_id[item.provenance.neighbor_id].features)
    return base + item.provenance.lambda_ * (neighbor - base)


def write_balanced(balanced: BalancedSet, csv_path: Path, provenance_path: Path) -> None:
    """CSV in the input schema with a ``synthetic`` marker, plus a provenance sidecar."""
    write_csv(balanced.to_dataset(), csv_path)
    records = [
        {"id": item.sample.id, **item.provenance.model_dump(by_alias=True)}
        for item in balanced.synthetic
    ]
    Path(provenance_path).write_text(json.dumps(records, indent=2, sort_keys=True) + "\n")
