"""(1+lambda) evolutionary strategy over Cartesian genomes."""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

import numpy as np

from rcgp.core.seeding import derive_seed, make_rng
from rcgp.core.validate import EmptyDatasetError, validate_probability
from rcgp.schemas.dataset import Dataset, Split
from rcgp.schemas.evolution import (
    AccuracySummary,
    BatchResult,
    EvolutionConfig,
    HistoryPoint,
    RunResult,
)
from rcgp.schemas.genome import FUNCTION_SET, Genome
from rcgp.services.cgp_engine import (
    ClassifyMode,
    check_recurrent_prob,
    predict,
    random_genome,
    sample_connection,
)

logger = logging.getLogger(__name__)


def mutation_mask(n_genes: int, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Boolean mask of genes selected for resampling, each with probability ``rate``."""
    return rng.random(n_genes) < rate


def mutate(
    parent: Genome,
    rate: float,
    recurrent_prob: float,
    rng: np.random.Generator,
) -> Genome:
    """Point mutation: each gene is independently redrawn with probability ``rate``.

    Genes are ordered node by node (function gene, then connection genes),
    followed by the output genes. The parent is left untouched.
    """
    validate_probability(rate, "mutation rate")
    config = parent.config
    check_recurrent_prob(config, recurrent_prob)

    mask = mutation_mask(config.n_genes, rate, rng)
    selected = np.flatnonzero(mask)
    if selected.size == 0:
        return parent

    functions = list(parent.function_genes)
    connections = [list(conns) for conns in parent.connection_genes]
    outputs = list(parent.output_genes)
    stride = 1 + config.arity
    node_genes = config.n_nodes * stride

    for gene in selected.tolist():
        if gene >= node_genes:
            outputs[gene - node_genes] = int(rng.integers(0, config.n_addresses))
            continue
        node, position = divmod(gene, stride)
        if position == 0:
            functions[node] = int(rng.integers(0, len(FUNCTION_SET)))
        else:
            connections[node][position - 1] = sample_connection(config, node, recurrent_prob, rng)

    return parent.model_copy(
        update={
            "function_genes": tuple(functions),
            "connection_genes": tuple(tuple(conns) for conns in connections),
            "output_genes": tuple(outputs),
        }
    )


def _accuracy(
    genome: Genome, X: np.ndarray, y: np.ndarray, mode: ClassifyMode, passes: int
) -> float:
    return float(np.mean(predict(genome, X, mode=mode, passes=passes) == y))


def fitness(genome: Genome, data: Dataset, mode: ClassifyMode = "wide", passes: int = 1) -> float:
    """Classification accuracy of ``genome`` on ``data``.

    Raises:
        EmptyDatasetError: If ``data`` has no samples
    """
    if len(data) == 0:
        raise EmptyDatasetError("Cannot compute fitness on an empty dataset")
    return _accuracy(genome, data.X, data.y, mode, passes)


def _optional_accuracy(genome: Genome, data: Optional[Dataset], config: EvolutionConfig):
    if data is None or len(data) == 0:
        return None
    return fitness(genome, data, config.classify_mode, config.passes)


def evolve(
    train: Dataset,
    val: Optional[Dataset],
    config: EvolutionConfig,
    rng: np.random.Generator,
    test: Optional[Dataset] = None,
    seed: int = 0,
) -> RunResult:
    """One (1+lambda) run with neutral drift, fitness = training accuracy.

    Stops after ``max_iterations`` generations or at perfect training
    fitness. Validation never steers selection; with
    ``select_on_validation`` the best-validation parent is also reported.
    """
    if len(train) == 0:
        raise EmptyDatasetError("Training set is empty")

    mode, passes = config.classify_mode, config.passes
    X, y = train.X, train.y
    track_val = config.select_on_validation and val is not None and len(val) > 0

    parent = random_genome(config.genome, config.recurrent_prob, rng, seed=seed)
    parent_fit = _accuracy(parent, X, y, mode, passes)
    evaluations = 1
    history = [HistoryPoint(iteration=0, fitness=parent_fit)]

    best_val_genome, best_val_acc = None, None
    if track_val:
        best_val_genome, best_val_acc = parent, fitness(parent, val, mode, passes)

    iteration = 0
    while iteration < config.max_iterations and parent_fit < 1.0:
        iteration += 1
        best_child, best_fit = None, -1.0
        for _ in range(config.lambda_):
            child = mutate(parent, config.mutation_rate, config.recurrent_prob, rng)
            child_fit = _accuracy(child, X, y, mode, passes)
            evaluations += 1
            if child_fit > best_fit:
                best_child, best_fit = child, child_fit

        # offspring win ties: neutral drift
        if best_fit >= parent_fit:
            if best_fit > parent_fit:
                history.append(HistoryPoint(iteration=iteration, fitness=best_fit))
                logger.debug("iteration %d: training fitness %.4f", iteration, best_fit)
            parent, parent_fit = best_child, best_fit
            if track_val:
                val_acc = fitness(parent, val, mode, passes)
                if val_acc > best_val_acc:
                    best_val_genome, best_val_acc = parent, val_acc

    result = RunResult(
        winning_genome=parent,
        train_acc=parent_fit,
        val_acc=_optional_accuracy(parent, val, config),
        test_acc=_optional_accuracy(parent, test, config),
        iterations_used=iteration,
        evaluations=evaluations,
        best_train_fitness=max(point.fitness for point in history),
        seed=seed,
        fitness_history=history,
        best_val_genome=best_val_genome,
        best_val_acc=best_val_acc,
    )
    logger.debug(
        "run seed=%d finished after %d iterations: train=%.4f", seed, iteration, parent_fit
    )
    return result


def _evolve_seeded(args) -> RunResult:
    train, val, test, config, seed = args
    return evolve(train, val, config, make_rng(seed), test=test, seed=seed)


def summarize(values: Sequence[Optional[float]]) -> AccuracySummary:
    """Mean and sample SD; SD is reported as 0 and flagged when n < 2."""
    present = [value for value in values if value is not None]
    if not present:
        return AccuracySummary()
    arr = np.asarray(present, dtype=np.float64)
    sd_defined = arr.size >= 2
    if not sd_defined:
        logger.warning("Standard deviation undefined for a single value; reporting 0")
    return AccuracySummary(
        mean=float(np.mean(arr)),
        sd=float(np.std(arr, ddof=1)) if sd_defined else 0.0,
        sd_defined=sd_defined,
        n=int(arr.size),
        min=float(np.min(arr)),
        max=float(np.max(arr)),
    )


def map_jobs(function, tasks: list, jobs: Optional[int] = 1) -> list:
    """Apply ``function`` to every task, optionally in worker processes.

    Results come back in task order whatever the completion order.
    """
    if len(tasks) > 1 and (jobs is None or jobs > 1):
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(function, tasks))
    return [function(task) for task in tasks]


def run_batch(
    split: Split,
    config: EvolutionConfig,
    jobs: Optional[int] = 1,
) -> BatchResult:
    """``n_runs`` independent runs with per-run seeds derived from ``config.seed``."""
    seeds = [derive_seed(config.seed, run) for run in range(config.n_runs)]
    tasks = [(split.train, split.val, split.test, config, seed) for seed in seeds]
    logger.info(
        "Running %d %s runs (%d iterations, lambda=%d)",
        config.n_runs, config.method_name, config.max_iterations, config.lambda_,
    )
    runs = map_jobs(_evolve_seeded, tasks, jobs)

    batch = BatchResult(
        method=config.method_name,
        runs=runs,
        train=summarize([run.train_acc for run in runs]),
        val=summarize([run.val_acc for run in runs]),
        test=summarize([run.test_acc for run in runs]),
        seed=config.seed,
    )
    logger.info(
        "%s test accuracy %.4f (SD %.4f) over %d runs",
        batch.method, batch.test.mean or 0.0, batch.test.sd, len(runs),
    )

    return batch
