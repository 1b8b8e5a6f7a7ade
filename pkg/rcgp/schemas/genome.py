"""Pydantic schemas for Cartesian genomes."""

from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Function(str, Enum):
    ADD = "ADD"
    SUB = "SUB"
    MUL = "MUL"
    DIV = "DIV"


# function genes index into this tuple
FUNCTION_SET: tuple[Function, ...] = (Function.ADD, Function.SUB, Function.MUL, Function.DIV)

FUNCTION_SYMBOLS = {
    Function.ADD: "+",
    Function.SUB: "-",
    Function.MUL: "*",
    Function.DIV: "/",
}

DIV_EPSILON = 1e-10


def protected_div(a, b):
    """a / b, or 1.0 where |b| <= 1e-10. Works on floats and numpy arrays."""
    b_arr = np.asarray(b, dtype=np.float64)
    small = np.abs(b_arr) <= DIV_EPSILON
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        result = np.where(small, 1.0, np.asarray(a, dtype=np.float64) / np.where(small, 1.0, b_arr))
    if np.ndim(result) == 0:
        return float(result)
    return result


FUNCTION_IMPLS = {
    Function.ADD: np.add,
    Function.SUB: np.subtract,
    Function.MUL: np.multiply,
    Function.DIV: protected_div,
}


class GenomeConfig(BaseModel):
    """Grid geometry: one row, unrestricted levels-back."""

    model_config = ConfigDict(frozen=True)

    n_inputs: int = Field(..., gt=0)
    n_nodes: int = Field(50, gt=0)
    n_outputs: int = Field(1, gt=0)
    arity: int = Field(2, ge=2, le=2)
    recurrent: bool = False
    rows: int = Field(1, ge=1, le=1)

    @property
    def n_addresses(self) -> int:
        return self.n_inputs + self.n_nodes

    @property
    def n_genes(self) -> int:
        return self.n_nodes * (1 + self.arity) + self.n_outputs


class Genome(BaseModel):
    """Cartesian chromosome.

    Addresses 0..n_inputs-1 are inputs; n_inputs..n_inputs+n_nodes-1 are
    nodes. In acyclic mode a node only reads inputs and earlier nodes.
    """

    model_config = ConfigDict(frozen=True)

    config: GenomeConfig
    function_genes: tuple[int, ...]
    connection_genes: tuple[tuple[int, ...], ...]
    output_genes: tuple[int, ...]
    seed: Optional[int] = None

    @model_validator(mode="after")
    def check_genes(self):
        cfg = self.config
        if len(self.function_genes) != cfg.n_nodes:
            raise ValueError("function_genes length must equal n_nodes")
        if len(self.connection_genes) != cfg.n_nodes:
            raise ValueError("connection_genes length must equal n_nodes")
        if len(self.output_genes) != cfg.n_outputs:
            raise ValueError("output_genes length must equal n_outputs")
        for i, function in enumerate(self.function_genes):
            if not 0 <= function < len(FUNCTION_SET):
                raise ValueError(f"Node {i} has invalid function gene {function}")
        for i, conns in enumerate(self.connection_genes):
            if len(conns) != cfg.arity:
                raise ValueError(f"Node {i} must have {cfg.arity} connections")
            limit = cfg.n_addresses if cfg.recurrent else cfg.n_inputs + i
            for address in conns:
                if not 0 <= address < limit:
                    raise ValueError(f"Node {i} connection {address} out of range")
        for address in self.output_genes:
            if not 0 <= address < cfg.n_addresses:
                raise ValueError(f"Output address {address} out of range")
        return self

    def is_input(self, address: int) -> bool:
        return address < self.config.n_inputs

    def node_index(self, address: int) -> int:
        return address - self.config.n_inputs

    def function_of(self, node: int) -> Function:
        return FUNCTION_SET[self.function_genes[node]]

    def is_recurrent_edge(self, node: int, address: int) -> bool:
        """True if node ``node`` reads a same-or-later node (previous-sweep value)."""
        return not self.is_input(address) and self.node_index(address) >= node


class ExecutionState:
    """Node values carried between sweeps; never shared between evaluations."""

    def __init__(self, n_nodes: int, passes: int = 1, n_samples: int = 1):
        if passes < 1:
            raise ValueError("passes must be positive")
        self.passes = passes
        self.node_values = np.zeros((n_samples, n_nodes), dtype=np.float64)

    def reset(self) -> None:
        self.node_values.fill(0.0)
