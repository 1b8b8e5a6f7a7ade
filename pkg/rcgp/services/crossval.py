"""Repeated stratified k-fold cross-validation with rotating validation folds.

Within a repeat, fold i is the test set, fold (i + 1) mod k the validation
set and the remaining k - 2 folds the training set, so every sample serves as
test and as validation exactly once per repeat. ADASYN, when enabled, only
ever sees the training portion.
"""

import logging
from typing import Optional

import numpy as np

from rcgp.core.seeding import derive_seed, make_rng
from rcgp.core.validate import ClassSmallerThanKError, LeakageError, MissingClassError
from rcgp.schemas.baselines import BaselineRun, MethodSummary
from rcgp.schemas.crossval import CvCell, CvPlan, CvResult
from rcgp.schemas.dataset import Dataset
from rcgp.schemas.evolution import EvolutionConfig
from rcgp.services.adasyn import adasyn_balance
from rcgp.services.baselines import majority_baseline, train_linear_svm, train_mlp
from rcgp.services.evolution import evolve, map_jobs, summarize

logger = logging.getLogger(__name__)


def make_folds(data: Dataset, k: int, seed: int) -> list[Dataset]:
    """Shuffle each class and deal it round-robin into ``k`` folds.

    Dealing continues from the fold where the previous class stopped, so fold
    sizes differ by at most one overall and per class.

    Raises:
        ClassSmallerThanKError: If a class has fewer than ``k`` samples
    """
    rng = make_rng(seed)
    labels = data.y
    fold_of = np.empty(len(data), dtype=np.int64)
    offset = 0
    for label in (0, 1):
        indices = np.flatnonzero(labels == label)
        if indices.size == 0:
            raise MissingClassError(f"Class {label} is absent")
        if indices.size < k:
            raise ClassSmallerThanKError(label, int(indices.size), k)
        for j, index in enumerate(rng.permutation(indices)):
            fold_of[index] = (offset + j) % k
        offset = (offset + indices.size) % k

    return [
        data.subset([s for s, f in zip(data.samples, fold_of) if f == fold], role="full")
        for fold in range(k)
    ]


def assemble(data: Dataset, folds: list[Dataset], fold: int) -> tuple[Dataset, Dataset, Dataset]:
    """Training, validation and test partitions for one fold index."""
    k = len(folds)
    test_ids = set(folds[fold].ids)
    val_ids = set(folds[(fold + 1) % k].ids)

    def pick(ids, role):
        return data.subset([s for s in data.samples if s.id in ids], role=role)

    train_ids = set(data.ids) - test_ids - val_ids
    return pick(train_ids, "train"), pick(val_ids, "val"), pick(test_ids, "test")


def _run_cell(task) -> list[CvCell]:
    data, folds, repeat, fold, plan, evo = task
    train, val, test = assemble(data, folds, fold)
    held_out = (val.model_dump_json(), test.model_dump_json())
    cell_seed = derive_seed(plan.seed, repeat, fold)

    fit_train = train
    if plan.balance is not None:
        balance = plan.balance.model_copy(update={"seed": cell_seed})
        fit_train = adasyn_balance(train, balance).to_dataset()
    if (val.model_dump_json(), test.model_dump_json()) != held_out:
        raise LeakageError("Validation or test partition changed during balancing")
    counts = fit_train.class_counts()

    cells = []
    seeds = [derive_seed(evo.seed, repeat, fold, run) for run in range(plan.runs_per_cell)]
    runs = [evolve(fit_train, val, evo, make_rng(seed), test=test, seed=seed) for seed in seeds]
    cells.append(
        CvCell(
            method=evo.method_name,
            repeat=repeat,
            fold=fold,
            seed=seeds[0],
            train_acc=float(np.mean([r.train_acc for r in runs])),
            val_acc=float(np.mean([r.val_acc for r in runs])),
            test_acc=float(np.mean([r.test_acc for r in runs])),
            train_counts=counts,
        )
    )

    baseline_runs: list[BaselineRun] = []
    if plan.mlp is not None:
        config = plan.mlp.model_copy(update={"seed": cell_seed})
        baseline_runs.append(train_mlp(fit_train, val, config, test=test).run)
    if plan.svm is not None:
        config = plan.svm.model_copy(update={"seed": cell_seed})
        baseline_runs.append(train_linear_svm(fit_train, config, test=test).run)
    # majority of the unbalanced training portion
    baseline_runs.append(majority_baseline(train, val, test))

    for run in baseline_runs:
        cells.append(
            CvCell(
                method=run.method,
                repeat=repeat,
                fold=fold,
                seed=run.seed,
                train_acc=run.train_acc,
                val_acc=run.val_acc,
                test_acc=run.test_acc,
                train_counts=counts if run.method != "Majority" else train.class_counts(),
            )
        )
    logger.debug(
        "repeat %d fold %d: %s test=%.4f", repeat, fold, evo.method_name, cells[0].test_acc
    )
    return cells


def summarize_cells(cells: list[CvCell]) -> list[MethodSummary]:
    """Uniform mean and sample SD over all cells, per method, in first-seen order."""
    methods: list[str] = []
    for cell in cells:
        if cell.method not in methods:
            methods.append(cell.method)
    summaries = []
    for method in methods:
        own = [cell for cell in cells if cell.method == method]
        summaries.append(
            MethodSummary(
                method=method,
                train=summarize([c.train_acc for c in own]),
                val=summarize([c.val_acc for c in own]),
                test=summarize([c.test_acc for c in own]),
            )
        )
    return summaries


def run_cv(
    data: Dataset,
    plan: CvPlan,
    evo: EvolutionConfig,
    jobs: Optional[int] = 1,
) -> CvResult:
    """Evolve one classifier per (repeat, fold) cell and aggregate accuracies."""
    tasks = []
    for repeat in range(plan.repeats):
        folds = make_folds(data, plan.k, derive_seed(plan.seed, repeat))
        tasks.extend((data, folds, repeat, fold, plan, evo) for fold in range(plan.k))

    logger.info(
        "Cross-validating %d samples: k=%d, %d repeats, %d cells%s",
        len(data), plan.k, plan.repeats, len(tasks),
        " with ADASYN" if plan.balance is not None else "",
    )
    cells = [cell for cell_list in map_jobs(_run_cell, tasks, jobs) for cell in cell_list]
    result = CvResult(plan=plan, cells=cells, summaries=summarize_cells(cells))
    main = result.summary(evo.method_name)
    logger.info(
        "%s CV test accuracy %.4f (SD %.4f)", evo.method_name, main.test.mean, main.test.sd
    )
    return result
