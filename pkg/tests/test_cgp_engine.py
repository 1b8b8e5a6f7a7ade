"""Unit tests for genome construction, execution and decoding."""

import ast
import json
import math
import re
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from rcgp.core.validate import (
    EmptySeriesError,
    InputLengthMismatchError,
    InvalidProbabilityError,
    MalformedGenomeFileError,
    NonFiniteInputError,
    NotRecurrentError,
)
from rcgp.schemas.genome import DIV_EPSILON, FUNCTION_SET, ExecutionState, Function, GenomeConfig
from rcgp.services.cgp_engine import (
    active_nodes,
    classify,
    describe_usage,
    execute,
    execute_batch,
    execute_streamed,
    genome_from_json,
    genome_to_json,
    load_genome,
    outputs_to_labels,
    predict,
    random_genome,
    to_dot,
    to_expression,
    to_frames,
)
from tests.builders import make_genome

GOLDEN = Path(__file__).parent / "golden"


def reference_value(genome, x, address, memo):
    """Recursive expression-tree evaluation of an acyclic genome."""
    n_inputs = genome.config.n_inputs
    if address < n_inputs:
        return float(x[address])
    node = address - n_inputs
    if node not in memo:
        a, b = (reference_value(genome, x, source, memo) for source in genome.connection_genes[node])
        function = genome.function_of(node)
        if function == Function.ADD:
            memo[node] = a + b
        elif function == Function.SUB:
            memo[node] = a - b
        elif function == Function.MUL:
            memo[node] = a * b
        else:
            memo[node] = 1.0 if abs(b) <= DIV_EPSILON else a / b
    return memo[node]


def evaluate_expression(text, x):
    """Re-parse ``to_expression`` text of an acyclic genome and evaluate it on ``x``."""
    env = {f"x{i}": np.float64(value) for i, value in enumerate(x)}
    outputs = []

    def walk(tree):
        if isinstance(tree, ast.Name):
            return env[tree.id]
        a, b = walk(tree.left), walk(tree.right)
        if isinstance(tree.op, ast.Add):
            return a + b
        if isinstance(tree.op, ast.Sub):
            return a - b
        if isinstance(tree.op, ast.Mult):
            return a * b
        return np.float64(1.0) if abs(b) <= DIV_EPSILON else a / b

    for statement in text.split("; "):
        name, _, body = statement.rpartition(" = ")
        value = walk(ast.parse(re.sub(r"node\[(\d+)\]", r"n\1", body), mode="eval").body)
        if name.startswith("node["):
            env["n" + name[5:-1]] = value
        else:
            outputs.append(value)
    return outputs


class TestRandomGenome:
    """Test cases for random genome construction."""

    def test_acyclic_when_probability_zero(self):
        config = GenomeConfig(n_inputs=4, n_nodes=50, recurrent=True)
        rng = np.random.default_rng(1)
        for _ in range(20):
            genome = random_genome(config, 0.0, rng)
            for node, conns in enumerate(genome.connection_genes):
                assert all(address < 4 + node for address in conns)

    def test_all_recurrent_when_probability_one(self):
        config = GenomeConfig(n_inputs=4, n_nodes=30, recurrent=True)
        genome = random_genome(config, 1.0, np.random.default_rng(2))
        for node, conns in enumerate(genome.connection_genes):
            assert all(genome.is_recurrent_edge(node, address) for address in conns)

    def test_recurrent_fraction(self):
        """About 10% of connection genes read a same-or-later node."""
        config = GenomeConfig(n_inputs=16, n_nodes=50, recurrent=True)
        rng = np.random.default_rng(3)
        recurrent, total = 0, 0
        for _ in range(100):
            genome = random_genome(config, 0.1, rng)
            for node, conns in enumerate(genome.connection_genes):
                recurrent += sum(genome.is_recurrent_edge(node, a) for a in conns)
                total += len(conns)
        assert total == 10000
        assert 0.08 <= recurrent / total <= 0.12

    def test_recurrent_probability_needs_recurrent_mode(self):
        config = GenomeConfig(n_inputs=4, n_nodes=10)
        with pytest.raises(InvalidProbabilityError):
            random_genome(config, 0.1, np.random.default_rng(0))
        with pytest.raises(InvalidProbabilityError):
            random_genome(GenomeConfig(n_inputs=4, recurrent=True), 1.5, np.random.default_rng(0))

    def test_seeded_construction_is_reproducible(self):
        config = GenomeConfig(n_inputs=16, n_nodes=50)
        a = random_genome(config, 0.0, np.random.default_rng(42), seed=42)
        b = random_genome(config, 0.0, np.random.default_rng(42), seed=42)
        assert a == b
        assert a.seed == 42


class TestGenomeInvariants:
    def test_acyclic_rejects_forward_reference(self):
        with pytest.raises(ValidationError):
            make_genome(2, [(Function.ADD, 2, 0)], [2])

    def test_recurrent_allows_self_reference(self):
        genome = make_genome(1, [(Function.ADD, 1, 0)], [1], recurrent=True)
        assert genome.is_recurrent_edge(0, 1)

    def test_output_out_of_range(self):
        with pytest.raises(ValidationError):
            make_genome(2, [(Function.ADD, 0, 1)], [5])


class TestActiveNodes:
    """Test cases for reachability analysis."""

    def test_passthrough_output(self):
        genome = make_genome(3, [(Function.ADD, 0, 1)], [0])
        active = active_nodes(genome)
        assert active.nodes == ()
        assert active.inputs == frozenset({0})

    def test_eleven_of_sixteen_inputs(self, chain_genome):
        active = active_nodes(chain_genome)
        assert active.inputs == frozenset(range(11))
        assert active.nodes == tuple(range(10))
        assert describe_usage(chain_genome) == "uses 11 of 16 inputs"

    def test_inactive_nodes_skipped(self):
        genome = make_genome(2, [(Function.ADD, 0, 1), (Function.MUL, 0, 0)], [2])
        assert active_nodes(genome).nodes == (0,)
        assert active_nodes(genome).inputs == frozenset({0, 1})


class TestExecute:
    """Test cases for single-vector and batch execution."""

    def test_add(self):
        genome = make_genome(2, [(Function.ADD, 0, 1)], [2])
        assert execute(genome, [2.0, 3.0]) == [5.0]

    def test_protected_division(self):
        genome = make_genome(2, [(Function.DIV, 0, 1)], [2])
        assert execute(genome, [1.0, 0.0]) == [1.0]
        assert execute(genome, [1.0, 1e-11]) == [1.0]
        assert execute(genome, [1.0, 4.0]) == [0.25]

    def test_input_length_mismatch(self):
        genome = make_genome(2, [(Function.ADD, 0, 1)], [2])
        with pytest.raises(InputLengthMismatchError):
            execute(genome, [1.0, 2.0, 3.0])

    def test_non_finite_input(self):
        genome = make_genome(2, [(Function.ADD, 0, 1)], [2])
        with pytest.raises(NonFiniteInputError):
            execute(genome, [1.0, math.nan])

    def test_matches_expression_tree_oracle(self):
        """500 random acyclic genomes x 20 inputs against recursive evaluation."""
        config = GenomeConfig(n_inputs=6, n_nodes=30)
        rng = np.random.default_rng(7)
        for _ in range(500):
            genome = random_genome(config, 0.0, rng)
            X = rng.uniform(-10.0, 10.0, size=(20, 6))
            actual = execute_batch(genome, X)[:, 0]
            expected = np.array([reference_value(genome, x, genome.output_genes[0], {}) for x in X])
            np.testing.assert_allclose(actual, expected, rtol=1e-12, equal_nan=True)

    def test_batch_matches_single_execution(self):
        config = GenomeConfig(n_inputs=5, n_nodes=20, n_outputs=2)
        rng = np.random.default_rng(11)
        genome = random_genome(config, 0.0, rng)
        X = rng.normal(size=(10, 5))
        batch = execute_batch(genome, X)
        for row, x in zip(batch, X):
            np.testing.assert_array_equal(row, execute(genome, x))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1), passes=st.integers(1, 5))
    def test_acyclic_genomes_are_pass_invariant(self, seed, passes):
        rng = np.random.default_rng(seed)
        genome = random_genome(GenomeConfig(n_inputs=4, n_nodes=15), 0.0, rng)
        X = rng.normal(size=(8, 4))
        np.testing.assert_array_equal(execute_batch(genome, X, passes=passes), execute_batch(genome, X))

    def test_state_persists_across_calls(self):
        """A recurrent self-loop accumulates while its state is kept."""
        genome = make_genome(1, [(Function.ADD, 1, 0)], [1], recurrent=True)
        state = ExecutionState(1)
        assert execute(genome, [1.0], state) == [1.0]
        assert execute(genome, [2.0], state) == [3.0]
        state.reset()
        assert execute(genome, [2.0], state) == [2.0]

    def test_previous_sweep_value_for_later_node(self):
        """Node 0 reads node 1 before node 1 is computed in the first sweep."""
        genome = make_genome(
            1, [(Function.ADD, 0, 2), (Function.MUL, 0, 0)], [1], recurrent=True
        )
        state = ExecutionState(2, passes=2)
        # sweep 1: n0 = 3 + 0, n1 = 9; sweep 2: n0 = 3 + 9 = 12, n1 = 9
        assert execute(genome, [3.0], state) == [12.0]
        assert state.node_values[0].tolist() == [12.0, 9.0]


class TestStreamedExecution:
    """Test cases for streaming frames through recurrent genomes."""

    def test_running_sum(self):
        genome = make_genome(1, [(Function.ADD, 1, 0)], [1], recurrent=True)
        assert execute_streamed(genome, [[1.0], [2.0], [3.0]]) == [6.0]

    def test_no_recurrent_edges_equals_last_frame(self):
        genome = make_genome(
            2, [(Function.SUB, 0, 1), (Function.MUL, 2, 0)], [3], recurrent=True
        )
        series = [[1.0, 2.0], [5.0, -1.0], [0.5, 0.25]]
        assert execute_streamed(genome, series) == execute(genome, series[-1])

    def test_single_frame_equals_fresh_execute(self):
        config = GenomeConfig(n_inputs=3, n_nodes=20, recurrent=True)
        rng = np.random.default_rng(5)
        for _ in range(20):
            genome = random_genome(config, 0.3, rng)
            x = rng.normal(size=3).tolist()
            np.testing.assert_array_equal(execute_streamed(genome, [x]), execute(genome, x))

    def test_requires_recurrent_genome(self):
        genome = make_genome(1, [(Function.ADD, 0, 0)], [1])
        with pytest.raises(NotRecurrentError):
            execute_streamed(genome, [[1.0]])

    def test_empty_series(self):
        genome = make_genome(1, [(Function.ADD, 1, 0)], [1], recurrent=True)
        with pytest.raises(EmptySeriesError):
            execute_streamed(genome, [])

    def test_four_column_frames(self):
        """Frame t holds the four regions' values at timepoint t."""
        features = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0])
        frames = to_frames(features, 4)
        assert frames.tolist() == [[1.0, 3.0, 5.0, 7.0], [2.0, 4.0, 6.0, 8.0]]
        assert to_frames(features, 1).tolist() == [[v] for v in features]
        assert to_frames(features, 8).tolist() == [features.tolist()]

    def test_frames_must_divide(self):
        with pytest.raises(InputLengthMismatchError):
            to_frames(np.zeros(6), 4)


class TestClassification:
    """Test cases for thresholding outputs into labels."""

    def test_threshold(self):
        assert outputs_to_labels(np.array([[0.5]])).tolist() == [1]
        assert outputs_to_labels(np.array([[-3.2]])).tolist() == [0]
        assert outputs_to_labels(np.array([[math.nan], [math.inf]])).tolist() == [0, 0]

    def test_difference_rule_is_perfect(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(60, 2))
        X[:30, 0] = X[:30, 1] + rng.uniform(0.5, 2.0, size=30)
        X[30:, 0] = X[30:, 1] - rng.uniform(0.1, 2.0, size=30)
        y = np.array([1] * 30 + [0] * 30)
        genome = make_genome(2, [(Function.SUB, 0, 1)], [2])
        np.testing.assert_array_equal(predict(genome, X), y)
        assert classify(genome, X[0]) == 1
        assert classify(genome, X[-1]) == 0

    def test_streamed_predict_matches_classify(self):
        config = GenomeConfig(n_inputs=4, n_nodes=20, recurrent=True)
        rng = np.random.default_rng(9)
        genome = random_genome(config, 0.2, rng)
        X = rng.normal(size=(10, 12))
        labels = predict(genome, X, mode="streamed")
        assert labels.tolist() == [classify(genome, x, mode="streamed") for x in X]


class TestDecoding:
    """Test cases for expressions, DOT export and JSON round trips."""

    def test_passthrough_expression(self):
        assert to_expression(make_genome(3, [(Function.ADD, 0, 1)], [2])) == "x2"

    def test_nested_expression(self):
        genome = make_genome(2, [(Function.MUL, 1, 1), (Function.ADD, 0, 2)], [3])
        assert to_expression(genome) == "(x0 + (x1 * x1))"

    def test_recurrent_reference(self):
        genome = make_genome(1, [(Function.ADD, 1, 0)], [1], recurrent=True)
        assert to_expression(genome) == "node[0] = (node[0]@prev + x0); out0 = node[0]"

    def test_recurrent_only_node_is_defined(self):
        genome = make_genome(1, [(Function.ADD, 2, 0), (Function.MUL, 0, 0)], [1], recurrent=True)
        assert active_nodes(genome).nodes == (0, 1)
        assert to_expression(genome) == "node[1] = (x0 * x0); out0 = (node[1]@prev + x0)"

    def test_shared_node_is_bound_once(self):
        genome = make_genome(2, [(Function.SUB, 0, 1), (Function.MUL, 2, 2)], [3])
        assert to_expression(genome) == "node[0] = (x0 - x1); out0 = (node[0] * node[0])"

    def test_doubling_chain_stays_linear(self):
        nodes = [(Function.ADD, 0, 0)] + [(Function.ADD, j, j) for j in range(1, 40)]
        genome = make_genome(1, nodes, [40])
        text = to_expression(genome)
        assert text.count(" = ") == 40
        assert text.endswith("out0 = (node[38] + node[38])")
        assert len(text) < 40 * 40
        assert evaluate_expression(text, [1.0]) == [2.0**40]

    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1), n_outputs=st.integers(1, 3))
    def test_expression_evaluates_like_execute(self, seed, n_outputs):
        rng = np.random.default_rng(seed)
        genome = random_genome(GenomeConfig(n_inputs=5, n_nodes=30, n_outputs=n_outputs), 0.0, rng)
        text = to_expression(genome)
        for x in rng.uniform(-10.0, 10.0, size=(5, 5)):
            with np.errstate(all="ignore"):
                expected = evaluate_expression(text, x)
            np.testing.assert_allclose(execute(genome, x), expected, rtol=1e-12, equal_nan=True)

    def test_dot_golden(self, chain_genome):
        assert to_dot(chain_genome) == (GOLDEN / "chain_genome.dot").read_text()

    def test_dot_input_count_matches_usage(self, chain_genome):
        dot = to_dot(chain_genome)
        assert dot.count("shape=box") == len(active_nodes(chain_genome).inputs) == 11

    def test_dot_empty_active_set(self):
        genome = make_genome(2, [(Function.ADD, 0, 1)], [0])
        assert to_dot(genome).splitlines() == [
            "digraph genome {",
            "  rankdir=LR;",
            '  in0 [label="x0", shape=box];',
            '  out0 [label="out0", shape=doublecircle];',
            "  in0 -> out0;",
            "}",
        ]

    def test_dot_full_graph_marks_inactive(self):
        genome = make_genome(2, [(Function.ADD, 0, 1), (Function.MUL, 0, 0)], [2])
        dot = to_dot(genome, active_only=False)
        assert '  n1 [label="MUL", style=dotted];' in dot
        assert "in1 [" in dot

    def test_dot_recurrent_edge_dashed(self):
        genome = make_genome(1, [(Function.ADD, 1, 0)], [1], recurrent=True)
        assert '  n0 -> n0 [label="a", style=dashed];' in to_dot(genome)

    def test_json_round_trip(self, chain_genome, tmp_path):
        text = genome_to_json(chain_genome)
        assert genome_from_json(text) == chain_genome
        path = tmp_path / "genome.json"
        path.write_text(text)
        assert genome_to_json(load_genome(path)) == text

    def test_malformed_json(self, tmp_path):
        for text in ["not json", "{}", '{"config": {"n_inputs": 2}}']:
            with pytest.raises(MalformedGenomeFileError):
                genome_from_json(text)
        with pytest.raises(MalformedGenomeFileError):
            load_genome(tmp_path / "missing.json")

    def test_invariant_violation_in_file(self, chain_genome):
        data = json.loads(genome_to_json(chain_genome))
        data["connection_genes"][0] = [20, 0]
        with pytest.raises(MalformedGenomeFileError):
            genome_from_json(json.dumps(data))

    def test_function_set(self):
        assert [f.value for f in FUNCTION_SET] == ["ADD", "SUB", "MUL", "DIV"]
