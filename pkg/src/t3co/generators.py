"""Random instance families used by the tests and the experiment scripts."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .instance import Instance
from .model import Edge, Graph


def node_names(n: int) -> tuple[str, ...]:
    return tuple(f"v{i}" for i in range(1, n + 1))


def complete_instance(weights: dict, n: int, directed: bool = False, node_costs: dict | None = None) -> Instance:
    """Complete graph on v1..vn with ``weights[(i, j)]`` on the edge between vi and vj (1-based)."""
    nodes = node_names(n)
    edges, table = [], {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j or (not directed and j < i):
                continue
            eid = f"e{i}_{j}"
            edges.append(Edge(eid, nodes[i - 1], nodes[j - 1]))
            table[eid] = Fraction(weights[(i, j)])
    for v in nodes:
        table[v] = Fraction((node_costs or {}).get(v, 0))
    g = Graph(nodes, tuple(edges), "directed" if directed else "undirected")
    return Instance(g, {"c": table})


def unit_complete(n: int) -> Instance:
    return complete_instance({(i, j): 1 for i in range(1, n + 1) for j in range(1, n + 1)}, n)


def random_connected(rng: random.Random, n: int, extra: int = 2, max_cost: int = 9) -> Instance:
    """Undirected connected graph: a random spanning tree plus ``extra`` random edges."""
    nodes = node_names(n)
    pairs = []
    for i in range(1, n):
        pairs.append((rng.randrange(i), i))
    others = [(a, b) for a in range(n) for b in range(a + 1, n) if (a, b) not in pairs]
    rng.shuffle(others)
    pairs += others[:extra]
    edges, table = [], {}
    for k, (a, b) in enumerate(pairs, start=1):
        eid = f"e{k}"
        edges.append(Edge(eid, nodes[a], nodes[b]))
        table[eid] = Fraction(rng.randint(1, max_cost))
    for v in nodes:
        table[v] = Fraction(0)
    return Instance(Graph(nodes, tuple(edges)), {"c": table})


def random_points(rng: random.Random, n: int, size: int = 20) -> list[tuple[int, int]]:
    cells = rng.sample([(x, y) for x in range(size) for y in range(size)], n)
    return cells


def random_metric(rng: random.Random, n: int, size: int = 20) -> Instance:
    """Complete graph with rounded-up euclidean distances between distinct grid points.

    Rounding up keeps the triangle inequality exact.
    """
    pts = random_points(rng, n, size)
    w = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                (x1, y1), (x2, y2) = pts[i - 1], pts[j - 1]
                w[(i, j)] = math.ceil(math.hypot(x1 - x2, y1 - y2))
    return complete_instance(w, n)


def with_tables(inst: Instance, **tables) -> Instance:
    merged = dict(inst.tables)
    merged.update({k: {e: Fraction(x) for e, x in t.items()} for k, t in tables.items()})
    return Instance(inst.graph, merged, dict(inst.params), inst.groups, inst.clusters, dict(inst.sets),
                    inst.precedences, dict(inst.temporal), dict(inst.coords), dict(inst.kinetic))


def with_params(inst: Instance, **params) -> Instance:
    merged = dict(inst.params)
    merged.update(params)
    return Instance(inst.graph, dict(inst.tables), merged, inst.groups, inst.clusters, dict(inst.sets),
                    inst.precedences, dict(inst.temporal), dict(inst.coords), dict(inst.kinetic))


def random_windows(rng: random.Random, n: int, horizon: int = 30) -> Instance:
    """Small complete instance with integer travel times and release/deadline windows."""
    w = {(i, j): rng.randint(1, 6) for i in range(1, n + 1) for j in range(1, n + 1) if i < j}
    w.update({(j, i): x for (i, j), x in list(w.items())})
    inst = complete_instance(w, n)
    r, d = {}, {}
    for v in inst.nodes:
        lo = rng.randint(0, horizon // 2)
        r[v] = lo
        d[v] = lo + rng.randint(0, horizon)
    r[inst.nodes[0]], d[inst.nodes[0]] = 0, horizon * 3
    return with_tables(inst, r=r, d=d)


def random_tpp(rng: random.Random, n: int, m: int) -> Instance:
    """Complete instance with m products: prices p_i, availabilities q_i, demands d_i."""
    w = {(i, j): rng.randint(1, 9) for i in range(1, n + 1) for j in range(1, n + 1) if i < j}
    w.update({(j, i): x for (i, j), x in list(w.items())})
    inst = complete_instance(w, n)
    tables, params = {}, {"m": m}
    for i in range(1, m + 1):
        tables[f"p_{i}"] = {v: rng.randint(1, 9) for v in inst.nodes}
        tables[f"q_{i}"] = {v: rng.randint(0, 3) for v in inst.nodes}
        params[f"d_{i}"] = Fraction(rng.randint(1, 4))
    return with_params(with_tables(inst, **tables), **params)
