"""Hamiltonian path and circuit search: a two-phase heuristic solver, an exact
oracle for small graphs, a validator, instance generators and a CLI."""

from .errors import DomainError, HamseqError, InvalidParams, ParseError
from .graph import Graph
from .io import parse_edge_list, to_dot
from .oracle import Mode, exact_solve, validate
from .policy import PolicyConfig
from .solver import SolveReport, run, solve, solve_split

__all__ = [
    "DomainError",
    "Graph",
    "HamseqError",
    "InvalidParams",
    "Mode",
    "ParseError",
    "PolicyConfig",
    "SolveReport",
    "exact_solve",
    "parse_edge_list",
    "run",
    "solve",
    "solve_split",
    "to_dot",
    "validate",
]
