"""Unit tests for the planted-signal dataset generator."""

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from rcgp.core.validate import InvalidSpecError
from rcgp.schemas.crossval import CvPlan
from rcgp.schemas.datagen import GeneratorSpec, LinearSignal, MeanShiftSignal, NoSignal
from rcgp.schemas.dataset import LayoutDescriptor, LayoutMode, SplitSpec
from rcgp.schemas.evolution import EvolutionConfig
from rcgp.schemas.genome import GenomeConfig
from rcgp.services.crossval import run_cv
from rcgp.services.dataset_service import stratified_split
from rcgp.services.datagen import generate
from rcgp.services.evolution import run_batch


class TestGenerate:
    """Test cases for dataset generation."""

    def test_default_counts(self):
        data = generate(GeneratorSpec())
        assert data.class_counts() == {0: 111, 1: 39}
        assert data.n_features == 16
        assert data.ids[0] == "s000" and data.ids[-1] == "s149"
        assert {s.group_tag for s in data.samples if s.label == 1} == {"patient"}

    def test_deterministic(self):
        spec = GeneratorSpec(seed=11, signal=MeanShiftSignal())
        assert generate(spec).model_dump_json() == generate(spec).model_dump_json()
        assert generate(spec).X.tolist() != generate(GeneratorSpec(seed=12, signal=MeanShiftSignal())).X.tolist()

    def test_zero_shift_equals_no_signal(self):
        shifted = generate(GeneratorSpec(seed=3, signal=MeanShiftSignal(delta=0.0)))
        plain = generate(GeneratorSpec(seed=3, signal=NoSignal()))
        assert shifted.model_dump_json() == plain.model_dump_json()

    def test_mean_shift_is_detectable(self):
        data = generate(GeneratorSpec(seed=5, signal=MeanShiftSignal(delta=1.0, informative=(0, 5))))
        X, y = data.X, data.y
        for feature in (0, 5):
            result = stats.ttest_ind(X[y == 1, feature], X[y == 0, feature])
            assert result.pvalue < 0.01
            assert X[y == 1, feature].mean() > X[y == 0, feature].mean()

    def test_linear_rule_holds(self):
        spec = GeneratorSpec(seed=2, signal=LinearSignal())
        data = generate(spec)
        assert data.class_counts() == {0: 111, 1: 39}
        scores = data.X[:, :4].sum(axis=1)
        np.testing.assert_array_equal(scores >= 0.5, data.y == 1)
        assert spec.informative_features() == (0, 1, 2, 3)

    def test_explicit_weights(self):
        weights = (0.0,) * 15 + (2.0,)
        data = generate(GeneratorSpec(signal=LinearSignal(weights=weights, threshold=1.0)))
        np.testing.assert_array_equal(2.0 * data.X[:, 15] >= 1.0, data.y == 1)

    def test_timeseries_layout(self):
        spec = GeneratorSpec(
            n_minority=5,
            n_majority=10,
            layout=LayoutDescriptor(mode=LayoutMode.SINGLE_VECTOR),
        )
        data = generate(spec)
        assert data.n_features == 580
        assert len(data) == 15

    def test_unreachable_threshold(self):
        spec = GeneratorSpec(n_minority=5, n_majority=5, signal=LinearSignal(threshold=1000.0))
        with pytest.raises(InvalidSpecError):
            generate(spec)

    def test_invalid_specs(self):
        for bad in [
            dict(signal=LinearSignal(weights=(1.0, 2.0))),
            dict(signal=LinearSignal(weights=(0.0,) * 16)),
            dict(signal=MeanShiftSignal(informative=(16,))),
            dict(signal=MeanShiftSignal(informative=())),
            dict(noise_sd=0.0),
            dict(n_minority=0),
        ]:
            with pytest.raises(ValidationError):
                GeneratorSpec(**bad)

    def test_signal_from_dict(self):
        spec = GeneratorSpec.model_validate({"signal": {"kind": "mean_shift", "delta": 2.0}})
        assert isinstance(spec.signal, MeanShiftSignal)
        assert spec.informative_features() == (0, 1, 2, 3)


@pytest.mark.slow
class TestAcceptance:
    """Long-running checks of learnability and null calibration."""

    def test_planted_rule_is_learned(self):
        data = generate(GeneratorSpec(seed=0, signal=LinearSignal()))
        split = stratified_split(data, SplitSpec(seed=0))
        config = EvolutionConfig(genome=GenomeConfig(n_inputs=16), seed=0)
        batch = run_batch(split, config, jobs=None)
        assert batch.train.mean >= 0.95
        assert batch.test.mean >= 0.85

    def test_learnable_data_cross_validates(self):
        data = generate(GeneratorSpec(seed=1, signal=LinearSignal()))
        evo = EvolutionConfig(genome=GenomeConfig(n_inputs=16), max_iterations=3000, seed=1)
        result = run_cv(data, CvPlan(k=5, repeats=1, seed=1), evo, jobs=None)
        assert result.summary("CGP").test.mean >= 0.9

    def test_no_signal_scores_near_majority_rate(self):
        data = generate(GeneratorSpec(seed=2, signal=NoSignal()))
        evo = EvolutionConfig(genome=GenomeConfig(n_inputs=16), max_iterations=500, seed=2)
        result = run_cv(data, CvPlan(k=10, repeats=1, seed=2), evo, jobs=None)
        assert result.summary("Majority").test.mean == pytest.approx(111 / 150, abs=0.01)
        assert abs(result.summary("CGP").test.mean - 0.74) <= 0.06
