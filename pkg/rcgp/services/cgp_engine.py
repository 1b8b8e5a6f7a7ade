"""Construction, execution and white-box decoding of Cartesian genomes.

Execution is vectorised over samples: every active node is evaluated as one
numpy operation across all rows of the input matrix. Nodes are swept in
ascending index order; a node reading a same-or-later node gets that node's
value from the previous sweep (0.0 before the first), which is what makes
recurrent genomes stateful and acyclic ones pass-invariant.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional, Sequence, Union

import numpy as np
from pydantic import ValidationError

from rcgp.core.validate import (
    EmptySeriesError,
    InputLengthMismatchError,
    InvalidProbabilityError,
    MalformedGenomeFileError,
    NonFiniteInputError,
    NotRecurrentError,
    validate_probability,
)
from rcgp.schemas.genome import (
    FUNCTION_IMPLS,
    FUNCTION_SET,
    FUNCTION_SYMBOLS,
    ExecutionState,
    Genome,
    GenomeConfig,
)

logger = logging.getLogger(__name__)

ClassifyMode = Literal["wide", "streamed"]

THRESHOLD = 0.5


@dataclass(frozen=True)
class ActiveSet:
    nodes: tuple[int, ...]
    inputs: frozenset[int]


# construction


def sample_connection(
    config: GenomeConfig, node: int, recurrent_prob: float, rng: np.random.Generator
) -> int:
    """Draw one connection gene for ``node``.

    With probability ``recurrent_prob`` the source is a same-or-later node,
    otherwise an input or a strictly earlier node.
    """
    if recurrent_prob > 0.0 and rng.random() < recurrent_prob:
        return int(rng.integers(config.n_inputs + node, config.n_addresses))
    return int(rng.integers(0, config.n_inputs + node))


def check_recurrent_prob(config: GenomeConfig, recurrent_prob: float) -> None:
    validate_probability(recurrent_prob, "recurrent_prob")
    if recurrent_prob > 0.0 and not config.recurrent:
        raise InvalidProbabilityError("recurrent_prob > 0 requires a recurrent genome")


def random_genome(
    config: GenomeConfig,
    recurrent_prob: float,
    rng: np.random.Generator,
    seed: Optional[int] = None,
) -> Genome:
    """Uniformly random genome satisfying its mode's connection invariant."""
    check_recurrent_prob(config, recurrent_prob)

    functions = []
    connections = []
    for node in range(config.n_nodes):
        functions.append(int(rng.integers(0, len(FUNCTION_SET))))
        connections.append(
            tuple(
                sample_connection(config, node, recurrent_prob, rng)
                for _ in range(config.arity)
            )
        )
    outputs = tuple(int(rng.integers(0, config.n_addresses)) for _ in range(config.n_outputs))

    return Genome(
        config=config,
        function_genes=tuple(functions),
        connection_genes=tuple(connections),
        output_genes=outputs,
        seed=seed,
    )


# analysis


def active_nodes(genome: Genome) -> ActiveSet:
    """Nodes and inputs reachable backwards from the output genes.

    Recurrent edges count for reachability.
    """
    n_inputs = genome.config.n_inputs
    nodes: set[int] = set()
    inputs: set[int] = set()
    stack = list(genome.output_genes)
    while stack:
        address = stack.pop()
        if address < n_inputs:
            inputs.add(address)
            continue
        node = address - n_inputs
        if node in nodes:
            continue
        nodes.add(node)
        stack.extend(genome.connection_genes[node])
    return ActiveSet(nodes=tuple(sorted(nodes)), inputs=frozenset(inputs))


def describe_usage(genome: Genome) -> str:
    used = len(active_nodes(genome).inputs)
    return f"uses {used} of {genome.config.n_inputs} inputs"


# execution


def _sweep(genome: Genome, nodes: Sequence[int], X: np.ndarray, values: np.ndarray) -> None:
    n_inputs = genome.config.n_inputs
    for node in nodes:
        operands = [
            X[:, address] if address < n_inputs else values[:, address - n_inputs]
            for address in genome.connection_genes[node]
        ]
        values[:, node] = FUNCTION_IMPLS[FUNCTION_SET[genome.function_genes[node]]](*operands)


def _read_outputs(genome: Genome, X: np.ndarray, values: np.ndarray) -> np.ndarray:
    n_inputs = genome.config.n_inputs
    columns = [
        X[:, address] if address < n_inputs else values[:, address - n_inputs]
        for address in genome.output_genes
    ]
    return np.stack(columns, axis=1)


def _check_inputs(genome: Genome, X: np.ndarray) -> None:
    if X.shape[-1] != genome.config.n_inputs:
        raise InputLengthMismatchError(
            f"Expected {genome.config.n_inputs} inputs, got {X.shape[-1]}"
        )
    if not np.all(np.isfinite(X)):
        raise NonFiniteInputError("Inputs must be finite")


def execute(
    genome: Genome,
    input_vector: Sequence[float],
    state: Optional[ExecutionState] = None,
) -> list[float]:
    """Run ``state.passes`` sweeps on one input vector and read the outputs.

    ``state`` is updated in place; a fresh all-zero state is used when omitted.
    """
    x = np.asarray(input_vector, dtype=np.float64).reshape(1, -1)
    _check_inputs(genome, x)
    if state is None:
        state = ExecutionState(genome.config.n_nodes)

    nodes = active_nodes(genome).nodes
    with np.errstate(all="ignore"):
        for _ in range(state.passes):
            _sweep(genome, nodes, x, state.node_values)
    return _read_outputs(genome, x, state.node_values)[0].tolist()


def execute_batch(genome: Genome, X: np.ndarray, passes: int = 1) -> np.ndarray:
    """Outputs for every row of ``X``, each row starting from zero state.

    Returns:
        Array of shape (n_samples, n_outputs)
    """
    X = np.asarray(X, dtype=np.float64)
    _check_inputs(genome, X)
    values = np.zeros((X.shape[0], genome.config.n_nodes), dtype=np.float64)
    nodes = active_nodes(genome).nodes
    with np.errstate(all="ignore"):
        for _ in range(passes):
            _sweep(genome, nodes, X, values)
    return _read_outputs(genome, X, values)


def execute_streamed_batch(genome: Genome, frames: np.ndarray) -> np.ndarray:
    """Stream frames through a recurrent genome, one sweep per frame.

    Args:
        frames: Array of shape (n_samples, n_frames, n_inputs)

    Returns:
        Outputs after the final frame, shape (n_samples, n_outputs)
    """
    if not genome.config.recurrent:
        raise NotRecurrentError("Streamed execution requires a recurrent genome")
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 3 or frames.shape[1] == 0:
        raise EmptySeriesError("Series must contain at least one frame")
    _check_inputs(genome, frames)

    values = np.zeros((frames.shape[0], genome.config.n_nodes), dtype=np.float64)
    nodes = active_nodes(genome).nodes
    with np.errstate(all="ignore"):
        for t in range(frames.shape[1]):
            _sweep(genome, nodes, frames[:, t, :], values)
    return _read_outputs(genome, frames[:, -1, :], values)


def execute_streamed(genome: Genome, series: Sequence[Sequence[float]]) -> list[float]:
    """Stream one sample's frames; state starts at zero and persists across frames."""
    if len(series) == 0:
        raise EmptySeriesError("Series must contain at least one frame")
    frames = np.asarray(series, dtype=np.float64)[np.newaxis, :, :]
    return execute_streamed_batch(genome, frames)[0].tolist()


def to_frames(features: np.ndarray, frame_width: int) -> np.ndarray:
    """Reshape region-major feature vectors into frame sequences.

    ``(..., n_features)`` becomes ``(..., n_features // frame_width, frame_width)``;
    frame t holds the t-th value of each logical column.
    """
    features = np.asarray(features, dtype=np.float64)
    n_features = features.shape[-1]
    if frame_width < 1 or n_features % frame_width:
        raise InputLengthMismatchError(
            f"{n_features} features do not divide into frames of width {frame_width}"
        )
    shaped = features.reshape(*features.shape[:-1], frame_width, n_features // frame_width)
    return np.swapaxes(shaped, -1, -2)


def outputs_to_labels(outputs: np.ndarray) -> np.ndarray:
    """Label 1 where the first output is finite and >= 0.5, else 0."""
    first = np.asarray(outputs, dtype=np.float64)[..., 0]
    with np.errstate(invalid="ignore"):
        return (np.isfinite(first) & (first >= THRESHOLD)).astype(np.int64)


def predict(
    genome: Genome,
    X: np.ndarray,
    mode: ClassifyMode = "wide",
    passes: int = 1,
) -> np.ndarray:
    """Class labels for every row of a feature matrix."""
    if mode == "streamed":
        outputs = execute_streamed_batch(genome, to_frames(X, genome.config.n_inputs))
    else:
        outputs = execute_batch(genome, X, passes=passes)
    return outputs_to_labels(outputs)


def classify(
    genome: Genome,
    sample: Sequence[float],
    mode: ClassifyMode = "wide",
    passes: int = 1,
) -> int:
    """Label one feature vector. Each call starts from fresh state."""
    if mode == "streamed":
        outputs = execute_streamed(genome, to_frames(np.asarray(sample), genome.config.n_inputs))
    else:
        outputs = execute(genome, sample, ExecutionState(genome.config.n_nodes, passes=passes))
    return int(outputs_to_labels(np.asarray(outputs))) if outputs else 0


# decoding


def _expression_for(genome: Genome, address: int, bound: set[int], memo: dict[int, str]) -> str:
    n_inputs = genome.config.n_inputs
    if address < n_inputs:
        return f"x{address}"
    node = address - n_inputs
    if node in bound:
        return f"node[{node}]"
    return _node_body(genome, node, bound, memo)


def _node_body(genome: Genome, node: int, bound: set[int], memo: dict[int, str]) -> str:
    if node in memo:
        return memo[node]
    n_inputs = genome.config.n_inputs
    operands = []
    for source in genome.connection_genes[node]:
        if genome.is_recurrent_edge(node, source):
            operands.append(f"node[{source - n_inputs}]@prev")
        else:
            operands.append(_expression_for(genome, source, bound, memo))
    symbol = FUNCTION_SYMBOLS[genome.function_of(node)]
    memo[node] = "(" + f" {symbol} ".join(operands) + ")"
    return memo[node]


def _bound_nodes(genome: Genome) -> set[int]:
    """Active nodes rendered as ``node[i] = ...`` bindings.

    A node is bound when it is read more than once through forward edges
    and output genes, or when any node reads it through a recurrent edge.
    """
    n_inputs = genome.config.n_inputs
    uses: Counter[int] = Counter()
    bound: set[int] = set()
    for node in active_nodes(genome).nodes:
        for source in genome.connection_genes[node]:
            if source < n_inputs:
                continue
            if genome.is_recurrent_edge(node, source):
                bound.add(source - n_inputs)
            else:
                uses[source - n_inputs] += 1
    uses.update(address - n_inputs for address in genome.output_genes if address >= n_inputs)
    bound.update(node for node, count in uses.items() if count > 1)
    return bound


def to_expression(genome: Genome) -> str:
    """Infix expression of the active graph.

    ``/`` is the protected division. Nodes read more than once, or read
    through a recurrent edge, are written once as ``node[i] = ...`` in
    ascending index order and referenced as ``node[i]``; a recurrent read is
    shown as ``node[i]@prev``. Outputs then follow as ``outK = ...``, all
    separated by ``; ``. A single output with no bindings is the bare
    expression.
    """
    bound = _bound_nodes(genome)
    memo: dict[int, str] = {}
    bindings = [f"node[{node}] = {_node_body(genome, node, bound, memo)}" for node in sorted(bound)]
    expressions = [_expression_for(genome, address, bound, memo) for address in genome.output_genes]
    if len(expressions) == 1 and not bindings:
        return expressions[0]
    return "; ".join(bindings + [f"out{i} = {expr}" for i, expr in enumerate(expressions)])


def _dot_name(genome: Genome, address: int) -> str:
    if genome.is_input(address):
        return f"in{address}"
    return f"n{genome.node_index(address)}"


def to_dot(genome: Genome, active_only: bool = True) -> str:
    """Graphviz DOT text for the genome; stable output for identical genomes.

    With ``active_only`` only used inputs and active nodes are drawn;
    otherwise inactive nodes are drawn dotted. Recurrent edges are dashed.
    """
    active = active_nodes(genome)
    if active_only:
        inputs = sorted(active.inputs)
        nodes = list(active.nodes)
    else:
        inputs = list(range(genome.config.n_inputs))
        nodes = list(range(genome.config.n_nodes))
    active_set = set(active.nodes)

    lines = ["digraph genome {", "  rankdir=LR;"]
    for i in inputs:
        lines.append(f'  in{i} [label="x{i}", shape=box];')
    for node in nodes:
        style = "" if node in active_set else ", style=dotted"
        lines.append(f'  n{node} [label="{genome.function_of(node).value}"{style}];')
    for k in range(genome.config.n_outputs):
        lines.append(f'  out{k} [label="out{k}", shape=doublecircle];')

    for node in nodes:
        for port, source in zip("abcdefgh", genome.connection_genes[node]):
            attrs = f'label="{port}"'
            if genome.is_recurrent_edge(node, source):
                attrs += ", style=dashed"
            lines.append(f"  {_dot_name(genome, source)} -> n{node} [{attrs}];")
    for k, address in enumerate(genome.output_genes):
        lines.append(f"  {_dot_name(genome, address)} -> out{k};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# serialization


def genome_to_json(genome: Genome) -> str:
    return genome.model_dump_json(indent=2) + "\n"


def genome_from_json(text: Union[str, bytes]) -> Genome:
    """Parse a genome JSON document.

    Raises:
        MalformedGenomeFileError: If the document is not a valid genome
    """
    try:
        return Genome.model_validate_json(text)
    except (ValidationError, ValueError) as e:
        raise MalformedGenomeFileError(f"Malformed genome: {e}")


def load_genome(path: Path) -> Genome:
    path = Path(path)
    try:
        text = path.read_text()
    except (OSError, UnicodeDecodeError) as e:
        raise MalformedGenomeFileError(f"Cannot read genome file {path}: {e}")
    return genome_from_json(text)
