"""Parse, resolve, validate and solve travelling-salesman variant definitions."""

from .grammar import parse, parse_file, render
from .instance import Instance, bind, load_native, load_native_file, load_tsplib, metric_closure
from .model import EdgeStep, Graph, NodeStep, Walk, lift_cost
from .semantics import explain, resolve, resolved_equal
from .solvers import SolveLimits, SolveResult, brute_force, christofides, double_tree, nearest_neighbor
from .validator import Solution, validate

__all__ = [
    "parse", "parse_file", "render", "Instance", "bind", "load_native", "load_native_file", "load_tsplib",
    "metric_closure", "EdgeStep", "Graph", "NodeStep", "Walk", "lift_cost", "explain", "resolve",
    "resolved_equal", "SolveLimits", "SolveResult", "brute_force", "christofides", "double_tree",
    "nearest_neighbor", "Solution", "validate",
]
