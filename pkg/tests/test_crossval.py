"""Unit tests for stratified fold construction and repeated cross-validation."""

import pytest
from pydantic import ValidationError

from rcgp.core.seeding import derive_seed
from rcgp.core.validate import ClassSmallerThanKError, MissingClassError
from rcgp.schemas.adasyn import AdasynConfig
from rcgp.schemas.baselines import MlpConfig, SvmConfig
from rcgp.schemas.crossval import CvPlan
from rcgp.schemas.evolution import EvolutionConfig
from rcgp.schemas.genome import GenomeConfig
from rcgp.services.crossval import assemble, make_folds, run_cv, summarize_cells
from tests.builders import imbalanced_dataset


def tiny_evolution(**overrides):
    values = dict(genome=GenomeConfig(n_inputs=16, n_nodes=20), max_iterations=10, n_runs=1, seed=3)
    values.update(overrides)
    return EvolutionConfig(**values)


class TestMakeFolds:
    """Test cases for per-class round-robin fold assignment."""

    def test_fold_sizes(self, imbalanced_39_111):
        folds = make_folds(imbalanced_39_111, 10, seed=0)
        assert [len(fold) for fold in folds] == [15] * 10
        for fold in folds:
            counts = fold.class_counts()
            assert counts[1] in (3, 4)
            assert counts[0] in (11, 12)

    def test_one_sample_per_class_per_fold(self):
        data = imbalanced_dataset(n_minority=5, n_majority=5)
        folds = make_folds(data, 5, seed=1)
        assert all(fold.class_counts() == {0: 1, 1: 1} for fold in folds)

    def test_folds_partition_dataset(self, imbalanced_39_111):
        folds = make_folds(imbalanced_39_111, 7, seed=2)
        ids = [sample_id for fold in folds for sample_id in fold.ids]
        assert sorted(ids) == sorted(imbalanced_39_111.ids)

    def test_seeded(self, imbalanced_39_111):
        a = make_folds(imbalanced_39_111, 5, seed=4)
        b = make_folds(imbalanced_39_111, 5, seed=4)
        c = make_folds(imbalanced_39_111, 5, seed=5)
        assert [f.ids for f in a] == [f.ids for f in b]
        assert [f.ids for f in a] != [f.ids for f in c]

    def test_class_smaller_than_k(self):
        data = imbalanced_dataset(n_minority=2, n_majority=20)
        with pytest.raises(ClassSmallerThanKError) as exc_info:
            make_folds(data, 3, seed=0)
        assert exc_info.value.label == 1

    def test_missing_class(self):
        data = imbalanced_dataset(n_minority=0, n_majority=20)
        with pytest.raises(MissingClassError):
            make_folds(data, 3, seed=0)

    def test_k_at_least_three(self):
        with pytest.raises(ValidationError):
            CvPlan(k=2)


class TestAssemble:
    """Test cases for rotating test and validation folds."""

    def test_every_sample_tested_and_validated_once(self, imbalanced_39_111):
        folds = make_folds(imbalanced_39_111, 10, seed=0)
        tested, validated = [], []
        for fold in range(10):
            train, val, test = assemble(imbalanced_39_111, folds, fold)
            assert (train.role, val.role, test.role) == ("train", "val", "test")
            assert len(train) + len(val) + len(test) == 150
            assert not set(train.ids) & (set(val.ids) | set(test.ids))
            assert val.ids == folds[(fold + 1) % 10].ids
            tested += test.ids
            validated += val.ids
        assert sorted(tested) == sorted(imbalanced_39_111.ids)
        assert sorted(validated) == sorted(imbalanced_39_111.ids)


class TestRunCv:
    """Test cases for the cross-validation driver."""

    def test_cells_and_summaries(self, imbalanced_39_111):
        plan = CvPlan(k=3, repeats=2, seed=1)
        result = run_cv(imbalanced_39_111, plan, tiny_evolution())
        assert [s.method for s in result.summaries] == ["CGP", "Majority"]
        cgp = [c for c in result.cells if c.method == "CGP"]
        assert sorted((c.repeat, c.fold) for c in cgp) == [(r, f) for r in range(2) for f in range(3)]
        summary = result.summary("CGP")
        assert summary.test.n == 6
        assert summary.test.mean == pytest.approx(sum(c.test_acc for c in cgp) / 6)

    def test_majority_row(self, imbalanced_39_111):
        plan = CvPlan(k=3, repeats=1, seed=2)
        result = run_cv(imbalanced_39_111, plan, tiny_evolution())
        folds = make_folds(imbalanced_39_111, 3, derive_seed(plan.seed, 0))
        for cell in (c for c in result.cells if c.method == "Majority"):
            _, _, test = assemble(imbalanced_39_111, folds, cell.fold)
            assert cell.test_acc == pytest.approx(test.class_counts()[0] / len(test))

    def test_balancing_touches_training_only(self, imbalanced_39_111):
        plan = CvPlan(k=5, repeats=1, seed=3, balance=AdasynConfig())
        result = run_cv(imbalanced_39_111, plan, tiny_evolution())
        for cell in result.cells:
            counts = cell.train_counts
            if cell.method == "CGP":
                assert counts[0] == counts[1]
            else:
                assert counts[0] > counts[1]

    def test_baseline_rows(self, imbalanced_39_111):
        plan = CvPlan(
            k=3,
            repeats=1,
            mlp=MlpConfig(epochs=5),
            svm=SvmConfig(epochs=5),
        )
        result = run_cv(imbalanced_39_111, plan, tiny_evolution())
        assert [s.method for s in result.summaries] == ["CGP", "ANN", "SVM", "Majority"]
        assert all(s.test.n == 3 for s in result.summaries)

    def test_runs_per_cell(self, imbalanced_39_111):
        plan = CvPlan(k=3, repeats=1, runs_per_cell=2)
        result = run_cv(imbalanced_39_111, plan, tiny_evolution())
        assert len([c for c in result.cells if c.method == "CGP"]) == 3

    def test_deterministic(self, imbalanced_39_111):
        plan = CvPlan(k=3, repeats=2, seed=7, balance=AdasynConfig())
        first = run_cv(imbalanced_39_111, plan, tiny_evolution())
        second = run_cv(imbalanced_39_111, plan, tiny_evolution())
        assert first.model_dump_json() == second.model_dump_json()

    def test_summarize_cells_order(self, imbalanced_39_111):
        result = run_cv(imbalanced_39_111, CvPlan(k=3, repeats=1), tiny_evolution())
        assert [s.method for s in summarize_cells(list(reversed(result.cells)))] == ["Majority", "CGP"]

    @pytest.mark.slow
    def test_ten_by_ten(self, imbalanced_39_111):
        plan = CvPlan(k=10, repeats=10, seed=0, balance=AdasynConfig())
        result = run_cv(imbalanced_39_111, plan, tiny_evolution(), jobs=2)
        assert result.summary("CGP").test.n == 100
        assert result.summary("Majority").test.n == 100
