"""End-to-end train and cross-validation pipelines behind the CLI."""

import logging
from pathlib import Path
from typing import Optional

from rcgp.core.seeding import derive_seed
from rcgp.schemas.dataset import Dataset, Split
from rcgp.schemas.experiment import ExperimentConfig, ResultDocument
from rcgp.services.adasyn import adasyn_balance
from rcgp.services.baselines import majority_baseline, train_linear_svm, train_mlp
from rcgp.services.crossval import run_cv
from rcgp.services.evolution import run_batch
from rcgp.services.reporting import baseline_summary, batch_summary, write_run_artifacts

logger = logging.getLogger(__name__)

MLP_STREAM = 1
SVM_STREAM = 2


def balance_split(split: Split, experiment: ExperimentConfig) -> Split:
    """Replace the training partition by its ADASYN-balanced version."""
    if experiment.balance is None:
        return split
    balanced = adasyn_balance(split.train, experiment.balance)
    return Split(train=balanced.to_dataset(), val=split.val, test=split.test, spec=split.spec)


def run_train(
    split: Split,
    experiment: ExperimentConfig,
    artifact_dir: Optional[Path] = None,
) -> ResultDocument:
    """Optionally balance the training partition, evolve and run baselines."""
    fit_split = balance_split(split, experiment)

    batch = run_batch(fit_split, experiment.evolution, jobs=experiment.jobs)
    if artifact_dir is not None:
        write_run_artifacts(batch, artifact_dir)
    summaries = [batch_summary(batch)]
    baselines = []

    if experiment.baselines:
        n_runs = experiment.evolution.n_runs
        mlp_runs = [
            train_mlp(
                fit_split.train,
                fit_split.val,
                experiment.mlp.model_copy(update={"seed": derive_seed(experiment.seed, MLP_STREAM, run)}),
                test=fit_split.test,
            ).run
            for run in range(n_runs)
        ]
        svm_runs = [
            train_linear_svm(
                fit_split.train,
                experiment.svm.model_copy(update={"seed": derive_seed(experiment.seed, SVM_STREAM, run)}),
                test=fit_split.test,
            ).run
            for run in range(n_runs)
        ]
        majority = majority_baseline(split.train, split.val, split.test)
        summaries += [
            baseline_summary("ANN", mlp_runs),
            baseline_summary("SVM", svm_runs),
            baseline_summary("Majority", [majority]),
        ]
        baselines = mlp_runs + svm_runs + [majority]

    return ResultDocument(
        command="train",
        inputs=experiment.layout.label,
        summaries=summaries,
        batch=batch,
        baselines=baselines,
    )


def run_crossval(data: Dataset, experiment: ExperimentConfig) -> ResultDocument:
    """Repeated k-fold CV; baselines ride along in every cell when enabled."""
    plan = experiment.cv.model_copy(
        update={
            "balance": experiment.balance,
            "mlp": experiment.mlp if experiment.baselines else None,
            "svm": experiment.svm if experiment.baselines else None,
        }
    )
    result = run_cv(data, plan, experiment.evolution, jobs=experiment.jobs)
    return ResultDocument(
        command="cv",
        inputs=experiment.layout.label,
        summaries=result.summaries,
        cv=result,
    )
