"""Graphs, walks and the lifted cost of a walk.

A walk alternates node and edge steps. Node steps carry a ``visited`` flag;
a node that is only passed through is ``visited=False``. Nodes may also be
dropped entirely, in which case the walk is not proper and its proper
completion is recovered by :func:`originating_proper_walk`.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import AmbiguousWalkError, InvalidWalkError

DIRECTEDNESS = ("undirected", "directed", "bidirected")


def natural_key(name: str):
    """Sort key that orders ``v2`` before ``v10``."""
    return tuple((0, int(tok)) if tok.isdigit() else (1, tok) for tok in re.findall(r"\d+|\D+", name))


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str

    def other(self, node: str) -> str:
        return self.v if node == self.u else self.u


@dataclass(frozen=True)
class Graph:
    """Multigraph with stable edge ids and one directedness for all edges."""

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    directedness: str = "undirected"
    _by_id: dict = field(default=None, compare=False, repr=False)
    _node_set: frozenset = field(default=None, compare=False, repr=False)
    _out: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.directedness not in DIRECTEDNESS:
            raise ValueError(f"unknown directedness {self.directedness!r}")
        nodes = set(self.nodes)
        if len(nodes) != len(self.nodes):
            raise ValueError("duplicate node id")
        by_id = {}
        for e in self.edges:
            if e.id in by_id or e.id in nodes:
                raise ValueError(f"duplicate id {e.id!r}")
            if e.u not in nodes or e.v not in nodes:
                raise ValueError(f"edge {e.id} has an unknown endpoint")
            by_id[e.id] = e
        if self.directedness == "bidirected":
            pairs = {(e.u, e.v) for e in self.edges}
            for u, v in pairs:
                if (v, u) not in pairs:
                    raise ValueError(f"bidirected graph lacks the reverse of {u}->{v}")
        out = {n: [] for n in self.nodes}
        for e in self.edges:
            out[e.u].append(e)
            if self.directedness == "undirected" and e.v != e.u:
                out[e.v].append(e)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_node_set", frozenset(nodes))
        object.__setattr__(self, "_out", out)

    @property
    def directed(self) -> bool:
        return self.directedness != "undirected"

    def edge(self, eid: str) -> Edge:
        return self._by_id[eid]

    def has_edge(self, eid: str) -> bool:
        return eid in self._by_id

    def has_node(self, nid: str) -> bool:
        return nid in self._node_set

    def step(self, node: str, eid: str) -> str | None:
        """Node reached by leaving ``node`` along ``eid``, or None if impossible."""
        e = self._by_id[eid]
        if e.u == node:
            return e.v
        if not self.directed and e.v == node:
            return e.u
        return None

    def incident(self, node: str) -> list[Edge]:
        """Edges that can be traversed out of ``node``."""
        return list(self._out[node])

    def edges_between(self, u: str, v: str) -> list[Edge]:
        if self.directed:
            return [e for e in self.edges if e.u == u and e.v == v]
        return [e for e in self.edges if {e.u, e.v} == {u, v}]


@dataclass(frozen=True)
class NodeStep:
    node: str
    visited: bool = True

    def __str__(self):
        return self.node if self.visited else self.node + "!"


@dataclass(frozen=True)
class EdgeStep:
    edge: str

    def __str__(self):
        return self.edge


@dataclass(frozen=True)
class Walk:
    steps: tuple

    @classmethod
    def of(cls, *items, graph: Graph | None = None) -> "Walk":
        """Build a walk from ids; a trailing ``!`` marks a non-visited node.

        Without a graph, ids starting with ``e`` are edges and all others nodes.
        """
        steps = []
        for item in items:
            if isinstance(item, (NodeStep, EdgeStep)):
                steps.append(item)
                continue
            name = item.rstrip("!")
            is_edge = graph.has_edge(name) if graph is not None else name.startswith("e")
            if is_edge:
                if item.endswith("!"):
                    raise InvalidWalkError(f"edge {name} cannot carry a visited marker")
                steps.append(EdgeStep(name))
            else:
                steps.append(NodeStep(name, not item.endswith("!")))
        return cls(tuple(steps))

    def __str__(self):
        return " ".join(str(s) for s in self.steps)

    def __len__(self):
        return len(self.steps)

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(s.edge for s in self.steps if isinstance(s, EdgeStep))

    @property
    def visited_nodes(self) -> tuple[str, ...]:
        return tuple(s.node for s in self.steps if isinstance(s, NodeStep) and s.visited)

    def is_proper(self) -> bool:
        prev_node = False
        if not self.steps or not isinstance(self.steps[0], NodeStep) or not isinstance(self.steps[-1], NodeStep):
            return False
        for s in self.steps:
            is_node = isinstance(s, NodeStep)
            if is_node == prev_node:
                return False
            prev_node = is_node
        return True


def _slots(walk: Walk):
    """Split a walk into its edge list and the optional node step before each slot."""
    edges: list[str] = []
    slots: list[NodeStep | None] = [None]
    for s in walk.steps:
        if isinstance(s, EdgeStep):
            edges.append(s.edge)
            slots.append(None)
        else:
            if slots[-1] is not None:
                raise InvalidWalkError("two consecutive node steps")
            slots[-1] = s
    return edges, slots


def _completions(graph: Graph, walk: Walk) -> list[list[str]]:
    if not walk.steps:
        raise InvalidWalkError("empty walk")
    edges, slots = _slots(walk)
    for s in slots:
        if s is not None and not graph.has_node(s.node):
            raise InvalidWalkError(f"unknown node {s.node}")
    for e in edges:
        if not graph.has_edge(e):
            raise InvalidWalkError(f"unknown edge {e}")
    if not edges:
        return [[slots[0].node]]
    if slots[0] is not None:
        starts = [slots[0].node]
    else:
        first = graph.edge(edges[0])
        starts = list(dict.fromkeys([first.u] if graph.directed else [first.u, first.v]))
    found = []
    for start in starts:
        seq = [start]
        ok = True
        for j, e in enumerate(edges, start=1):
            nxt = graph.step(seq[-1], e)
            if nxt is None or (slots[j] is not None and slots[j].node != nxt):
                ok = False
                break
            seq.append(nxt)
        if ok and seq not in found:
            found.append(seq)
    return found


def is_valid_walk(graph: Graph, walk: Walk) -> bool:
    try:
        return bool(_completions(graph, walk))
    except InvalidWalkError:
        return False


def originating_proper_walk(graph: Graph, walk: Walk) -> Walk:
    """Fill in dropped nodes; restored nodes are traversed but not visited."""
    found = _completions(graph, walk)
    if not found:
        raise InvalidWalkError(f"not a walk in the graph: {walk}")
    if len(found) > 1:
        raise AmbiguousWalkError(
            "dropped nodes admit several completions: " + "; ".join(" ".join(f) for f in found)
        )
    nodes = found[0]
    edges, slots = _slots(walk)
    steps = []
    for j, node in enumerate(nodes):
        steps.append(slots[j] if slots[j] is not None else NodeStep(node, False))
        if j < len(edges):
            steps.append(EdgeStep(edges[j]))
    return Walk(tuple(steps))


def _occurrences(graph: Graph, walk: Walk) -> list[NodeStep]:
    """Node occurrences of the proper walk, closing endpoint merged into the first."""
    proper = originating_proper_walk(graph, walk)
    occ = [s for s in proper.steps if isinstance(s, NodeStep)]
    if len(occ) > 1 and occ[0].node == occ[-1].node:
        occ[0] = NodeStep(occ[0].node, occ[0].visited or occ[-1].visited)
        occ.pop()
    return occ


def is_closed(graph: Graph, walk: Walk) -> bool:
    proper = originating_proper_walk(graph, walk)
    return bool(proper.edge_ids) and proper.steps[0].node == proper.steps[-1].node


def traversals_count(graph: Graph, walk: Walk) -> Counter:
    """How often each node is passed through (visited or not)."""
    return Counter(s.node for s in _occurrences(graph, walk))


def visits_count(graph: Graph, walk: Walk) -> Counter:
    """How often each node is visited."""
    return Counter(s.node for s in _occurrences(graph, walk) if s.visited)


@dataclass(frozen=True)
class WalkParts:
    sequence_visited: tuple[str, ...]  # S_V
    visited_set: frozenset  # V_S
    sequence_edges: tuple[str, ...]  # S_E
    edge_set: frozenset  # E_S
    start: str
    end: str

    def visited_index(self) -> int:
        return len(self.sequence_visited)


def walk_parts(graph: Graph, walk: Walk) -> WalkParts:
    proper = originating_proper_walk(graph, walk)
    sv = walk.visited_nodes
    se = walk.edge_ids
    return WalkParts(sv, frozenset(sv), se, frozenset(se), proper.steps[0].node, proper.steps[-1].node)


def prefix_through(walk: Walk, i: int, inclusive: bool = True) -> Walk:
    """Prefix ending at the i-th visited node (0-based); without it when not inclusive."""
    seen = -1
    for k, s in enumerate(walk.steps):
        if isinstance(s, NodeStep) and s.visited:
            seen += 1
            if seen == i:
                return Walk(walk.steps[: k + 1] if inclusive else walk.steps[:k])
    raise IndexError(f"walk has no visited node with index {i}")


def visited_step(walk: Walk, i: int) -> str:
    return walk.visited_nodes[i]


def lift_cost(walk: Walk, cost: Mapping[str, Fraction]) -> Fraction:
    """Sum of costs over the edge sequence plus the visited-node sequence.

    Elements without an entry contribute nothing; binding checks make sure a
    cost function covers its whole domain before this is called.
    """
    total = Fraction(0)
    for e in walk.edge_ids:
        total += cost.get(e, 0)
    for v in walk.visited_nodes:
        total += cost.get(v, 0)
    return total


def complement_cost(nodes: Iterable[str], walk: Walk, penalty: Mapping[str, Fraction]) -> Fraction:
    """Sum of penalties over the nodes the walk does not visit."""
    seen = set(walk.visited_nodes)
    return sum((Fraction(penalty.get(v, 0)) for v in nodes if v not in seen), Fraction(0))


def bottleneck(walk: Walk, cost: Mapping[str, Fraction]) -> Fraction:
    return max(Fraction(cost[e]) for e in walk.edge_ids)


def scatter(walk: Walk, cost: Mapping[str, Fraction]) -> Fraction:
    return min(Fraction(cost[e]) for e in walk.edge_ids)
