"""Result tables, JSON documents and per-run artifacts."""

import json
import logging
from pathlib import Path
from typing import Any, Sequence, Union

import pandas as pd
from pydantic import BaseModel

from rcgp.schemas.baselines import BaselineRun, MethodSummary
from rcgp.schemas.evolution import AccuracySummary, BatchResult
from rcgp.schemas.experiment import ResultDocument
from rcgp.services.cgp_engine import genome_to_json, to_dot
from rcgp.services.evolution import summarize

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ["Inputs", "Method", "Train % (SD)", "Validation % (SD)", "Test % (SD)"]
NOT_EVALUATED = "-"


def format_cell(summary: AccuracySummary) -> str:
    """``"74.57 (1.82)"``: mean and SD in percent, or ``-`` if never evaluated."""
    if summary.mean is None:
        return NOT_EVALUATED
    return f"{100.0 * summary.mean:.2f} ({100.0 * summary.sd:.2f})"


def batch_summary(batch: BatchResult) -> MethodSummary:
    return MethodSummary(method=batch.method, train=batch.train, val=batch.val, test=batch.test)


def baseline_summary(method: str, runs: Sequence[BaselineRun]) -> MethodSummary:
    return MethodSummary(
        method=method,
        train=summarize([run.train_acc for run in runs]),
        val=summarize([run.val_acc for run in runs]),
        test=summarize([run.test_acc for run in runs]),
        runs=list(runs),
    )


def table_rows(inputs: str, summaries: Sequence[MethodSummary]) -> list[dict[str, str]]:
    return [
        {
            "Inputs": inputs,
            "Method": summary.method,
            "Train % (SD)": format_cell(summary.train),
            "Validation % (SD)": format_cell(summary.val),
            "Test % (SD)": format_cell(summary.test),
        }
        for summary in summaries
    ]


def results_table(documents: Sequence[ResultDocument]) -> pd.DataFrame:
    """One row per (inputs, method), in document order."""
    rows = []
    for document in documents:
        rows.extend(table_rows(document.inputs, document.summaries))
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)


def write_table(table: pd.DataFrame, path: Path) -> None:
    table.to_csv(path, index=False, lineterminator="\n")
    logger.info("Wrote table %s (%d rows)", path, len(table))


def to_jsonable(value: Union[BaseModel, Any]) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json", by_alias=True)
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(value: Union[BaseModel, Any], path: Path) -> None:
    """Sorted keys and a trailing newline so reruns are byte-identical."""
    text = json.dumps(to_jsonable(value), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n")


def read_result(path: Path) -> ResultDocument:
    return ResultDocument.model_validate_json(Path(path).read_text())


def write_run_artifacts(batch: BatchResult, directory: Path) -> None:
    """Winning genome JSON, DOT graph and fitness history CSV for every run."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for index, run in enumerate(batch.runs):
        stem = directory / f"run{index:02d}"
        Path(f"{stem}-genome.json").write_text(genome_to_json(run.winning_genome))
        Path(f"{stem}.dot").write_text(to_dot(run.winning_genome))
        history = pd.DataFrame(
            [(point.iteration, point.fitness) for point in run.fitness_history],
            columns=["iteration", "fitness"],
        )
        history.to_csv(f"{stem}-history.csv", index=False, lineterminator="\n")
    logger.info("Wrote artifacts for %d runs to %s", len(batch.runs), directory)
