"""Exact enumeration oracle and classical tour heuristics.

The oracle has its own feasibility predicate, written separately from the
validator so the two can be compared against each other.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .errors import BindingError, UnsupportedSemanticsError, UnverifiedPropertyError
from .expr import Call, Name, Num, RelPrefix, Sub, render_expr
from .instance import Instance, check_symmetric, check_triangle, PairCosts, metric_closure, expand_walk, shortest_paths
from .model import EdgeStep, NodeStep, Walk, natural_key
from .semantics import (
    CardinalityVisited, ComplementCost, LowerBound, MaxLateness, MaxMinEdge, Maximize, MinMaxEdge,
    Minimize, PriceShareSum, PurchaseDemand, ResolvedVariant, SpecValue, TagValue, TimeWindow,
    TotalCost, UpperBound,
)
from .validator import Solution, ensure_supported, evaluate_expr


@dataclass(frozen=True)
class SolveLimits:
    max_nodes: int = 10
    max_walk_edges: int | None = None  # defaults to 2·|V|
    time_budget: float | None = None  # seconds
    max_candidates: int = 5_000_000

    def walk_edges(self, n: int) -> int:
        return self.max_walk_edges if self.max_walk_edges is not None else 2 * n


@dataclass(frozen=True)
class SolveResult:
    status: str  # optimal | infeasible | limit-exceeded
    best: Solution | None = None
    value: Fraction | None = None
    explored: int = 0
    strategy: str = ""


class _LimitHit(Exception):
    pass


# ------------------------------------------------------------------ oracle


def _goal(variant: ResolvedVariant):
    stmts = [s for s in variant.objectives if isinstance(s, (Minimize, Maximize, MinMaxEdge, MaxMinEdge))]
    if len(stmts) > 1:
        raise UnsupportedSemanticsError("the oracle optimises a single statement")
    if not stmts:
        return None, 1
    s = stmts[0]
    return s, (1 if isinstance(s, (Minimize, MinMaxEdge)) else -1)


class Oracle:
    """Feasibility and objective value of walks, independent of the validator."""

    def __init__(self, variant: ResolvedVariant, inst: Instance):
        ensure_supported(variant)
        self.v = variant
        self.inst = inst
        self.g = inst.graph
        self.goal, self.sense = _goal(variant)
        self.structure_ok = self._structure()
        self.windows = [s for s in variant.objectives if isinstance(s, TimeWindow)]
        self.bounds = [s for s in variant.objectives if isinstance(s, (LowerBound, UpperBound))]
        self.purchase = [s for s in variant.objectives if isinstance(s, PurchaseDemand)]
        self.needs_shares = bool(self.purchase)

    # instance-level conditions do not depend on the walk
    def _structure(self) -> bool:
        g = self.g
        et = self.v.edgetype
        if isinstance(et, TagValue) and et.word != g.directedness:
            return False
        gt = self.v.graphtype
        if not isinstance(gt, TagValue):
            return True
        simple = {(e.u, e.v) for e in g.edges if e.u != e.v}
        und = nx.Graph()
        und.add_nodes_from(g.nodes)
        und.add_edges_from(simple)
        if gt.word == "complete":
            return all((u, w) in simple or (not g.directed and (w, u) in simple)
                       for u in g.nodes for w in g.nodes if u != w)
        if gt.word == "strongly connected":
            dg = nx.DiGraph()
            dg.add_nodes_from(g.nodes)
            dg.add_edges_from(simple if g.directed else simple | {(b, a) for a, b in simple})
            return nx.is_strongly_connected(dg) if g.nodes else True
        if gt.word == "cycle":
            return len(g.nodes) >= 3 and nx.is_connected(und) and all(d == 2 for _, d in und.degree()) \
                and und.number_of_edges() == len(g.nodes)
        if gt.word in ("path", "tree", "binary tree"):
            if not (g.nodes and nx.is_tree(und)) or len(g.edges) != und.number_of_edges() * (2 if g.directed else 1):
                return False
            deg = dict(und.degree())
            if gt.word == "path":
                return max(deg.values(), default=0) <= 2
            if gt.word == "binary tree":
                return max(deg.values(), default=0) <= 3
            if gt.params:
                return sum(1 for d in deg.values() if d <= 1) == evaluate_expr(gt.params[0], self.inst)
        return True

    def _rhs(self, node: str):
        e = self.v.traversals.expr
        if isinstance(e, Num):
            return Fraction(e.text)
        if isinstance(e, Name):
            return self.inst.tables[e.text][node] if e.text in self.inst.tables else self.inst.params[e.text]
        if isinstance(e, Sub):
            return self.inst.tables[e.base.text][node]
        if isinstance(e, Call):
            return self.inst.tables[e.func.text][node]
        raise UnsupportedSemanticsError(f"traversal bound {render_expr(e)}")

    def feasible(self, walk: Walk, shares: dict | None = None) -> bool:
        shares = shares or {}
        if not self.structure_ok:
            return False
        steps = walk.steps
        if not walk.is_proper():
            raise UnsupportedSemanticsError("the oracle works on proper walks")
        nodes = [s.node for s in steps[0::2]]
        flags = [s.visited for s in steps[0::2]]
        edges = [s.edge for s in steps[1::2]]
        for a, e, b in zip(nodes, edges, nodes[1:]):
            if not self.g.has_edge(e):
                return False
            ed = self.g.edge(e)
            if not ((ed.u, ed.v) == (a, b) or (not self.g.directed and (ed.v, ed.u) == (a, b))):
                return False
        closed = len(edges) > 0 and nodes[0] == nodes[-1]
        trav: dict[str, int] = {}
        vis: dict[str, int] = {}
        occ = list(zip(nodes, flags))
        if closed:
            occ[0] = (nodes[0], flags[0] or flags[-1])
            occ.pop()
        for node, f in occ:
            trav[node] = trav.get(node, 0) + 1
            vis[node] = vis.get(node, 0) + (1 if f else 0)
        v = self.v
        if isinstance(v.traversals, SpecValue):
            op = v.traversals.relation
            for node in self.g.nodes:
                if not _cmp(op, trav.get(node, 0), self._rhs(node)):
                    return False
        if isinstance(v.visits, TagValue):
            for node in self.g.nodes:
                t, k = trav.get(node, 0), vis.get(node, 0)
                if v.visits.word == "always":
                    if k != t:
                        return False
                elif t > 0 and not _cmp(v.visits.relation, k, 1):
                    return False
        sv = [n for n, f in zip(nodes, flags) if f]
        vs = set(sv)
        if isinstance(v.group, TagValue):
            op = "≥"
            for p in v.group.params:
                if isinstance(p, RelPrefix):
                    op = p.op
                elif isinstance(p, Name) and p.text == "once":
                    op = "="
            for ns in self.inst.groups:
                if not _cmp(op, len(vs & set(ns.nodes)), 1):
                    return False
        if isinstance(v.covering, TagValue):
            if not self._covered(vs):
                return False
        if v.start is True and nodes[0] != str(self.inst.params["start"]):
            return False
        if v.end is True and nodes[-1] != str(self.inst.params["end"]):
            return False
        if v.circuit is True and edges and not closed:
            return False
        order = list(sv)
        if closed and len(order) > 1 and flags[-1] and order[0] == order[-1]:
            order.pop()
        if isinstance(v.precedences, TagValue):
            for u, w in self.inst.precedences:
                if w in order:
                    j = order.index(w)
                    if u not in order[:j]:
                        return False
        if isinstance(v.cluster, TagValue) and not self._clusters_ok(v.cluster, order):
            return False
        for b in self.bounds:
            val = self._term(b.term, walk, nodes, sv, edges, shares, None)
            lim = evaluate_expr(b.bound, self.inst)
            if isinstance(b, UpperBound) and not (val < lim if b.strict else val <= lim):
                return False
            if isinstance(b, LowerBound) and not (val > lim if b.strict else val >= lim):
                return False
        for tw in self.windows:
            if self._schedule(tw, sv, nodes, flags, edges) is None:
                return False
        if self.purchase and not self._purchase_ok(shares, vs):
            return False
        return True

    def _covered(self, vs: set) -> bool:
        cov = self.v.covering
        fn = cov.params[0].text
        lim = cov.params[1].operand if isinstance(cov.params[1], RelPrefix) else cov.params[1]
        bound = evaluate_expr(lim, self.inst)
        dist, _ = shortest_paths(self.g, self.inst.tables[fn])
        targets = self.g.nodes if cov.word == "all" else self.inst.sets.get("D", ())
        return all(t in vs or any(dist.get((u, t), math.inf) <= bound for u in vs) for t in targets)

    def _clusters_ok(self, tag: TagValue, order: list) -> bool:
        words = {render_expr(p) for p in tag.params}
        cl = self.inst.clusters
        for k, ns in enumerate(cl):
            pos = [i for i, x in enumerate(order) if x in ns.nodes]
            if not pos:
                continue
            if pos != list(range(pos[0], pos[0] + len(pos))):
                return False
            first, last = order[pos[0]], order[pos[-1]]
            if words & {"start", "startend"} and ns.start and first != ns.start:
                return False
            if "startend" in words and ns.end and last != ns.end:
                return False
            if "terminals" in words and ns.terminals and (first not in ns.terminals or last not in ns.terminals):
                return False
        if "ordered" in words:
            rank = []
            for x in order:
                rank.append([k for k, ns in enumerate(cl) if x in ns.nodes])
            for i in range(len(order)):
                for j in range(i + 1, len(order)):
                    if any(a > b for a in rank[i] for b in rank[j]):
                        return False
        return True

    def _edge_values(self, name: str, edges: list):
        tt = self.inst.temporal.get(name)
        sig = self.v.cost(name)
        if tt is not None and sig is not None and isinstance(sig.temporal, TagValue):
            out, clock = [], Fraction(0)
            for k, e in enumerate(edges):
                val = tt.value(e, k if tt.kind == "position" else clock)
                out.append(val)
                clock += val
            return out
        tab = self.inst.tables[name]
        return [tab[e] for e in edges]

    def _schedule(self, tw: TimeWindow, sv, nodes, flags, edges):
        """Service times with least waiting, or None when a window is missed."""
        a = tw.arrival
        travel = self._edge_values(a.travel, edges)
        hand = self.inst.tables.get(a.handling, {}) if a.handling else {}
        times, waits = [], []
        clock = Fraction(0)
        prev = None
        k = 0
        for idx, (node, f) in enumerate(zip(nodes, flags)):
            if idx > 0:
                clock += travel[idx - 1]
            if not f:
                continue
            if prev is not None and a.handling:
                clock += hand[prev]
            wait = Fraction(0)
            if tw.release is not None:
                r = evaluate_expr(tw.release, self.inst, node)
                if clock < r:
                    if a.waiting is None:
                        return None
                    wait = r - clock
            clock += wait
            if tw.deadline is not None and clock > evaluate_expr(tw.deadline, self.inst, node):
                return None
            times.append(clock)
            waits.append(wait)
            prev = node
            k += 1
        return times, waits

    def _purchase_ok(self, shares: dict, vs: set) -> bool:
        m = int(self.inst.params["m"])
        for (i, node), amt in shares.items():
            if amt < 0 or (amt > 0 and node not in vs):
                return False
        for s in self.purchase:
            if s.kind == "demand":
                for i in range(1, m + 1):
                    need = self.inst.params[f"d_{i}"] if render_expr(s.bound) == "d_i" else evaluate_expr(s.bound, self.inst)
                    got = sum((amt for (j, node), amt in shares.items() if j == i and node in vs), Fraction(0))
                    if got < need:
                        return False
            else:
                name = s.bound.text
                for (i, node), amt in shares.items():
                    if amt > self.inst.tables[f"{name}_{i}"][node]:
                        return False
        return True

    def _term(self, term, walk, nodes, sv, edges, shares, waits) -> Fraction:
        total = Fraction(0)
        for coef, atom in term.parts:
            total += coef * self._atom(atom, walk, nodes, sv, edges, shares, waits)
        return total

    def _atom(self, atom, walk, nodes, sv, edges, shares, waits):
        inst = self.inst
        if isinstance(atom, TotalCost):
            sig = self.v.cost(atom.fn)
            if sig is not None and isinstance(sig.temporal, TagValue) and sig.temporal.word == "waiting":
                return sum(waits or (), Fraction(0))
            domain = sig.domain if sig is not None else "E ∪ V"
            val = Fraction(0)
            if "E" in domain:
                val += sum(self._edge_values(atom.fn, edges), Fraction(0))
            if "V" in domain:
                tab = inst.tables[atom.fn]
                val += sum((tab[n] for n in sv), Fraction(0))
            return val
        if isinstance(atom, ComplementCost):
            tab = inst.tables[atom.fn]
            return sum((tab[n] for n in self.g.nodes if n not in set(sv)), Fraction(0))
        if isinstance(atom, CardinalityVisited):
            return Fraction(len(set(sv)))
        if isinstance(atom, PriceShareSum):
            vs = set(sv)
            return sum((inst.tables[f"{atom.price}_{i}"][n] * amt for (i, n), amt in shares.items() if n in vs),
                       Fraction(0))
        if isinstance(atom, MaxLateness):
            a = atom.arrival
            travel = self._edge_values(a.travel, edges)
            hand = inst.tables.get(a.handling, {}) if a.handling else {}
            clock, worst, prev = Fraction(0), Fraction(0), None
            for idx, node in enumerate(nodes):
                if idx > 0:
                    clock += travel[idx - 1]
                if not walk.steps[2 * idx].visited:
                    continue
                if prev is not None and a.handling:
                    clock += hand[prev]
                worst = max(worst, clock - evaluate_expr(atom.deadline, inst, node))
                prev = node
            return worst
        raise UnsupportedSemanticsError(f"the oracle cannot evaluate {atom!r}")

    def value(self, walk: Walk, shares: dict | None = None) -> Fraction | None:
        shares = shares or {}
        if self.goal is None:
            return Fraction(0)
        nodes = [s.node for s in walk.steps[0::2]]
        flags = [s.visited for s in walk.steps[0::2]]
        edges = [s.edge for s in walk.steps[1::2]]
        sv = [n for n, f in zip(nodes, flags) if f]
        if isinstance(self.goal, (MinMaxEdge, MaxMinEdge)):
            vals = self._edge_values(self.goal.fn, edges)
            if not vals:
                return None
            return max(vals) if isinstance(self.goal, MinMaxEdge) else min(vals)
        waits = None
        if self.windows:
            sched = self._schedule(self.windows[0], sv, nodes, flags, edges)
            waits = sched[1] if sched else None
        return self._term(self.goal.term, walk, nodes, sv, edges, shares, waits)

    def greedy_shares(self, walk: Walk) -> dict | None:
        """Buy each product at the cheapest visited nodes first; None if demand cannot be met."""
        if not self.needs_shares:
            return {}
        m = int(self.inst.params["m"])
        price = next((a.price for s in self.v.objectives if isinstance(s, (Minimize, Maximize))
                      for _, a in s.term.parts if isinstance(a, PriceShareSum)), None)
        avail_name = next((s.bound.text for s in self.purchase if s.kind == "availability"), None)
        demand = next((s for s in self.purchase if s.kind == "demand"), None)
        visited = sorted(set(walk.visited_nodes), key=natural_key)
        shares = {}
        for i in range(1, m + 1):
            need = Fraction(self.inst.params[f"d_{i}"]) if demand is not None else Fraction(0)
            ptab = self.inst.tables[f"{price}_{i}"] if price else {}
            order = sorted(visited, key=lambda n: (ptab.get(n, 0), natural_key(n)))
            for node in order:
                if need <= 0:
                    break
                cap = self.inst.tables[f"{avail_name}_{i}"][node] if avail_name else need
                amt = min(cap, need)
                if amt > 0:
                    shares[(i, node)] = Fraction(amt)
                    need -= amt
            if need > 0:
                return None
        return shares


def _cmp(op: str, a, b) -> bool:
    if op == "=":
        return a == b
    if op == "≤":
        return a <= b
    if op == "≥":
        return a >= b
    if op == "<":
        return a < b
    if op == ">":
        return a > b
    return a != b


# ------------------------------------------------------------- candidates


def _order_key(walk: Walk):
    return tuple(natural_key(str(s)) for s in walk.steps)


def _better(sense, value, walk, best):
    if best is None:
        return True
    bv, bw = best
    if value * sense != bv * sense:
        return value * sense < bv * sense
    return _order_key(walk) < _order_key(bw)


def _pair_edges(inst: Instance):
    g = inst.graph
    out: dict[tuple, list[str]] = {}
    for e in sorted(g.edges, key=lambda e: natural_key(e.id)):
        out.setdefault((e.u, e.v), []).append(e.id)
        if not g.directed and e.u != e.v:
            out.setdefault((e.v, e.u), []).append(e.id)
    return out


def _tour_walks(seq: list, closed: bool, pairs: dict):
    """Every walk through ``seq`` in order using direct edges."""
    hops = list(zip(seq, seq[1:])) + ([(seq[-1], seq[0])] if closed and len(seq) > 1 else [])
    options = []
    for hop in hops:
        ids = pairs.get(hop)
        if not ids:
            return
        options.append(ids)
    for choice in itertools.product(*options):
        steps = [NodeStep(seq[0])]
        for k, eid in enumerate(choice):
            nxt = hops[k][1]
            closing = closed and k == len(choice) - 1
            steps += [EdgeStep(eid), NodeStep(nxt, not closing)]
        yield Walk(tuple(steps))


def _rotation_free(variant: ResolvedVariant) -> bool:
    if variant.circuit is not True or variant.start is True or variant.end is True:
        return False
    if variant.precedences is not None or variant.cluster is not None:
        return False
    for s in variant.objectives:
        if isinstance(s, TimeWindow):
            return False
        term = getattr(s, "term", None)
        if term is not None and any(isinstance(a, MaxLateness) for _, a in term.parts):
            return False
    return True


def _sequences(variant, inst, subset, chunk: tuple[int, int]):
    """Orders of ``subset`` honouring fixed endpoints, split into worker chunks."""
    nodes = sorted(subset, key=natural_key)
    start = str(inst.params["start"]) if variant.start is True else None
    end = str(inst.params["end"]) if variant.end is True else None
    if start is not None and start not in subset:
        return
    if end is not None and end not in subset and not (variant.circuit is True and end == start):
        return
    if variant.circuit is True and start is None and _rotation_free(variant):
        start = nodes[0]
    if variant.circuit is True and end is not None and start is not None and end != start:
        return
    if variant.circuit is True and end is not None and start is None:
        start = end
    first = [start] if start is not None else nodes
    k, K = chunk
    counter = 0
    for f in first:
        rest = [x for x in nodes if x != f]
        if counter % K != k:
            counter += 1
            continue
        counter += 1
        for perm in itertools.permutations(rest):
            seq = [f, *perm]
            if end is not None and variant.circuit is not True and seq[-1] != end:
                continue
            yield seq


def _fast_edge_sum(variant: ResolvedVariant, inst: Instance):
    """Cost name when the objective is a plain static edge sum, else None."""
    goal, sense = _goal(variant)
    if not isinstance(goal, Minimize):
        return None
    atom = goal.term.single()
    if not isinstance(atom, TotalCost):
        return None
    sig = variant.cost(atom.fn)
    if sig is None or sig.domain != "E" or atom.fn in inst.temporal or sig.temporal is not None:
        return None
    if any(not isinstance(s, (Minimize,)) for s in variant.objectives):
        return None
    if any(getattr(variant, n) is not None for n in ("group", "covering", "precedences", "cluster")):
        return None
    return atom.fn


def _permutation_chunk(variant, inst, chunk, deadline, cap):
    oracle = Oracle(variant, inst)
    pairs = _pair_edges(inst)
    closed = variant.circuit is True
    best, explored = None, 0
    fast = _fast_edge_sum(variant, inst)
    if fast is not None and oracle.structure_ok:
        tab = inst.tables[fast]
        scale = math.lcm(*(Fraction(x).denominator for x in tab.values())) if tab else 1
        cheapest = {hop: min(ids, key=lambda e: (tab[e], natural_key(e))) for hop, ids in pairs.items()}
        icost = {hop: int(tab[e] * scale) for hop, e in cheapest.items()}
        best_seq, best_val = None, None
        for seq in _sequences(variant, inst, set(inst.nodes), chunk):
            explored += 1
            if explored % 4096 == 0:
                _tick(deadline, explored, cap)
            hops = list(zip(seq, seq[1:])) + ([(seq[-1], seq[0])] if closed and len(seq) > 1 else [])
            total = 0
            for hop in hops:
                c = icost.get(hop)
                if c is None:
                    break
                total += c
            else:
                if best_val is None or total < best_val:
                    best_val, best_seq = total, seq
        if best_seq is None:
            return None, explored
        walk = _cheapest_walk(best_seq, closed, cheapest)
        if not oracle.feasible(walk):
            return None, explored
        return (oracle.value(walk), walk, {}), explored
    for seq in _sequences(variant, inst, set(inst.nodes), chunk):
        for walk in _tour_walks(seq, closed, pairs) if len(seq) > 1 else [Walk((NodeStep(seq[0]),))]:
            explored += 1
            if explored % 1024 == 0:
                _tick(deadline, explored, cap)
            best = _consider(oracle, walk, best)
    return best, explored


def _cheapest_walk(seq, closed, cheapest):
    if len(seq) == 1:
        return Walk((NodeStep(seq[0]),))
    hops = list(zip(seq, seq[1:])) + ([(seq[-1], seq[0])] if closed else [])
    steps = [NodeStep(seq[0])]
    for k, hop in enumerate(hops):
        closing = closed and k == len(hops) - 1
        steps += [EdgeStep(cheapest[hop]), NodeStep(hop[1], not closing)]
    return Walk(tuple(steps))


def _consider(oracle: Oracle, walk: Walk, best):
    shares = oracle.greedy_shares(walk) if oracle.needs_shares else {}
    if shares is None:
        return best
    if not oracle.feasible(walk, shares):
        return best
    val = oracle.value(walk, shares)
    if val is None:
        return best
    if best is None or _better(oracle.sense, val, walk, (best[0], best[1])):
        return (val, walk, shares)
    return best


def _tick(deadline, explored, cap):
    if deadline is not None and time.monotonic() > deadline:
        raise _LimitHit()
    if explored > cap:
        raise _LimitHit()


def _subset_chunk(variant, inst, chunk, deadline, cap):
    oracle = Oracle(variant, inst)
    pairs = _pair_edges(inst)
    closed = variant.circuit is True
    best, explored = None, 0
    nodes = sorted(inst.nodes, key=natural_key)
    for size in range(1, len(nodes) + 1):
        for subset in itertools.combinations(nodes, size):
            for seq in _sequences(variant, inst, set(subset), chunk):
                walks = _tour_walks(seq, closed, pairs) if len(seq) > 1 else [Walk((NodeStep(seq[0]),))]
                for walk in walks:
                    explored += 1
                    if explored % 1024 == 0:
                        _tick(deadline, explored, cap)
                    best = _consider(oracle, walk, best)
    return best, explored


def enumerate_walks(inst: Instance, max_edges: int, starts=None):
    """All proper walks with up to ``max_edges`` edges, all nodes marked visited."""
    pairs_out: dict[str, list] = {v: [] for v in inst.nodes}
    for e in sorted(inst.graph.edges, key=lambda e: natural_key(e.id)):
        pairs_out[e.u].append((e.id, e.v))
        if not inst.graph.directed and e.u != e.v:
            pairs_out[e.v].append((e.id, e.u))
    stack = [(NodeStep(s),) for s in reversed(list(starts if starts is not None else inst.nodes))]
    while stack:
        steps = stack.pop()
        yield Walk(steps)
        if (len(steps) - 1) // 2 >= max_edges:
            continue
        for eid, nxt in reversed(pairs_out[steps[-1].node]):
            stack.append(steps + (EdgeStep(eid), NodeStep(nxt)))


def flag_patterns(walk: Walk):
    """All-visited and first-occurrence-visited forms of a walk; a closing endpoint is not visited."""
    nodes = [s.node for s in walk.steps[0::2]]
    closed = len(nodes) > 1 and nodes[0] == nodes[-1]
    seen, first = set(), []
    for k, n in enumerate(nodes):
        first.append(n not in seen)
        seen.add(n)
    out = []
    for flags in ([True] * len(nodes), first):
        flags = list(flags)
        if closed:
            flags[-1] = False
        w = Walk(tuple(NodeStep(s.node, flags[k // 2]) if isinstance(s, NodeStep) else s
                       for k, s in enumerate(walk.steps)))
        if w not in out:
            out.append(w)
    return out


def _walk_chunk(variant, inst, chunk, deadline, cap, max_edges):
    oracle = Oracle(variant, inst)
    k, K = chunk
    starts = sorted(inst.nodes, key=natural_key)
    if variant.start is True:
        starts = [str(inst.params["start"])]
    mine = [s for i, s in enumerate(starts) if i % K == k]
    best, explored = None, 0
    for walk in enumerate_walks(inst, max_edges, mine):
        if variant.circuit is True and len(walk.steps) > 1 and walk.steps[0].node != walk.steps[-1].node:
            continue
        for w in flag_patterns(walk):
            explored += 1
            if explored % 1024 == 0:
                _tick(deadline, explored, cap)
            best = _consider(oracle, w, best)
    return best, explored


def _multiset_chunk(variant, inst, chunk, deadline, cap):
    """Closed covering walks from edge multiplicities in {0, 1, 2} with even degrees."""
    oracle = Oracle(variant, inst)
    g = inst.graph
    cost = _goal(variant)[0].term.single().fn
    tab = inst.tables[cost]
    edges = sorted((e for e in g.edges if e.u != e.v), key=lambda e: natural_key(e.id))
    nodes = list(g.nodes)
    if len(nodes) == 1:
        w = Walk((NodeStep(nodes[0]),))
        return (oracle.value(w), w, {}) if oracle.feasible(w) else None, 1
    last_use = {}
    for i, e in enumerate(edges):
        last_use[e.u] = i
        last_use[e.v] = i
    if len(last_use) < len(nodes):
        return None, 0
    closes_at = {}
    for v, i in last_use.items():
        closes_at.setdefault(i, []).append(v)
    best = None
    explored = 0
    k, K = chunk
    mult = [0] * len(edges)
    deg = {v: 0 for v in nodes}

    def connected() -> bool:
        adj = {v: [] for v in nodes}
        for e, m in zip(edges, mult):
            if m:
                adj[e.u].append(e.v)
                adj[e.v].append(e.u)
        seen, stack = {nodes[0]}, [nodes[0]]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(nodes)

    def rec(i, total):
        nonlocal best, explored
        if i == len(edges):
            explored += 1
            if explored % 1024 == 0:
                _tick(deadline, explored, cap)
            if connected() and (best is None or total < best[0]):
                best = (total, list(mult))
            return
        e = edges[i]
        choices = (0, 1, 2)
        if i == 0:
            choices = tuple(c for c in choices if c % K == k)
        for m in choices:
            mult[i] = m
            deg[e.u] += m
            deg[e.v] += m
            if all(deg[v] % 2 == 0 for v in closes_at.get(i, ())):
                rec(i + 1, total + m * tab[e.id])
            deg[e.u] -= m
            deg[e.v] -= m
        mult[i] = 0

    rec(0, Fraction(0))
    if best is None:
        return None, explored
    walk = _euler_walk(nodes, edges, best[1])
    if not oracle.feasible(walk):
        raise AssertionError("multiset walk rejected by the oracle")
    return (oracle.value(walk), walk, {}), explored


def _euler_walk(nodes, edges, mult) -> Walk:
    mg = nx.MultiGraph()
    mg.add_nodes_from(nodes)
    for e, m in zip(edges, mult):
        for r in range(m):
            mg.add_edge(e.u, e.v, key=f"{e.id}#{r}", eid=e.id)
    start = sorted(nodes, key=natural_key)[0]
    steps = [NodeStep(start)]
    circuit = list(nx.eulerian_circuit(mg, source=start, keys=True))
    seen = {start}
    for k, (u, v, key) in enumerate(circuit):
        closing = k == len(circuit) - 1
        steps += [EdgeStep(mg.edges[u, v, key]["eid"]), NodeStep(v, not closing and v not in seen)]
        seen.add(v)
    return Walk(tuple(steps))


# ------------------------------------------------------------------ driver


def _strategy(variant: ResolvedVariant, inst: Instance) -> str:
    spec = variant.traversals
    if not isinstance(spec, SpecValue) or not isinstance(spec.expr, Num):
        return "walks"
    op, k = spec.relation, Fraction(spec.expr.text)
    complete = all(inst.graph.edges_between(u, v) for u in inst.nodes for v in inst.nodes if u != v)
    if op == "=" and k == 1:
        return "permutation"
    if op == "≥" and k == 1:
        simple = (_fast_edge_sum(variant, inst) is not None and variant.visits is None
                  and all(isinstance(s, Minimize) for s in variant.objectives))
        return "closure" if simple else "walks"
    if (op == "≤" and k == 1) or (op == "≥" and k == 0 and complete):
        return "subsets"
    return "walks"


def brute_force(variant: ResolvedVariant, inst: Instance, limits: SolveLimits = SolveLimits(),
                workers: int = 1, strategy: str = "auto") -> SolveResult:
    """Exact optimum by exhaustive enumeration within the given limits."""
    ensure_supported(variant)
    n = len(inst.nodes)
    if n > limits.max_nodes:
        return SolveResult("limit-exceeded", strategy=strategy)
    if n == 0:
        return SolveResult("infeasible", strategy=strategy)
    if strategy == "auto":
        strategy = _strategy(variant, inst)
    if strategy == "closure":
        cost = _fast_edge_sum(variant, inst)
        if cost is None:
            raise UnsupportedSemanticsError("the closure route needs a static edge-sum objective")
        closure = metric_closure(inst, cost)
        res = _run(variant, closure, limits, workers, "permutation")
        if res.best is None:
            return SolveResult(res.status, explored=res.explored, strategy="closure")
        walk = expand_walk(closure, res.best.walk)
        oracle = Oracle(variant, inst)
        if not oracle.feasible(walk):
            raise AssertionError("expanded closure tour rejected by the oracle")
        return SolveResult("optimal", Solution(walk), oracle.value(walk), res.explored, "closure")
    if strategy == "multiset":
        if inst.graph.directed or _fast_edge_sum(variant, inst) is None or variant.circuit is not True:
            raise UnsupportedSemanticsError("the multiset route covers undirected closed edge-sum variants")
    return _run(variant, inst, limits, workers, strategy)


def _chunk_job(args):
    variant, inst, strategy, chunk, deadline, cap, max_edges = args
    if strategy == "permutation":
        return _permutation_chunk(variant, inst, chunk, deadline, cap)
    if strategy == "subsets":
        return _subset_chunk(variant, inst, chunk, deadline, cap)
    if strategy == "multiset":
        return _multiset_chunk(variant, inst, chunk, deadline, cap)
    return _walk_chunk(variant, inst, chunk, deadline, cap, max_edges)


def _run(variant, inst, limits: SolveLimits, workers: int, strategy: str) -> SolveResult:
    if strategy not in ("permutation", "subsets", "walks", "multiset"):
        raise UnsupportedSemanticsError(f"unknown strategy {strategy!r}")
    deadline = time.monotonic() + limits.time_budget if limits.time_budget else None
    max_edges = limits.walk_edges(len(inst.nodes))
    K = max(1, workers)
    if strategy == "multiset":
        K = min(K, 3)
    jobs = [(variant, inst, strategy, (k, K), deadline, limits.max_candidates, max_edges) for k in range(K)]
    try:
        if K == 1:
            results = [_chunk_job(jobs[0])]
        else:
            with ProcessPoolExecutor(max_workers=K) as pool:
                results = list(pool.map(_chunk_job, jobs))
    except _LimitHit:
        return SolveResult("limit-exceeded", strategy=strategy)
    oracle_sense = _goal(variant)[1]
    best, explored = None, 0
    for res, count in results:
        explored += count
        if res is not None and (best is None or _better(oracle_sense, res[0], res[1], (best[0], best[1]))):
            best = res
    if best is None:
        return SolveResult("infeasible", explored=explored, strategy=strategy)
    return SolveResult("optimal", Solution(best[1], best[2]), best[0], explored, strategy)


# --------------------------------------------------------------- heuristics


def _require_complete(inst: Instance):
    g = inst.graph
    for u in g.nodes:
        for v in g.nodes:
            if u != v and not g.edges_between(u, v):
                raise UnverifiedPropertyError(f"graph is not complete: no edge {u} {v}")


def _cheapest(inst: Instance, cost: str):
    tab = inst.table(cost)
    best: dict[tuple, str] = {}
    for hop, ids in _pair_edges(inst).items():
        best[hop] = min(ids, key=lambda e: (tab[e], natural_key(e)))
    return best, tab


def _tour(seq: list, cheapest: dict) -> Walk:
    return _cheapest_walk(seq, True, cheapest)


def tour_value(walk: Walk, tab: dict) -> Fraction:
    return sum((tab[e] for e in walk.edge_ids), Fraction(0))


def nearest_neighbor(inst: Instance, start: str | None = None, cost: str = "c") -> tuple[Solution, Fraction]:
    """Greedy tour; ties go to the smallest node id."""
    _require_complete(inst)
    for val in inst.table(cost).values():
        if val < 0:
            raise UnverifiedPropertyError("nearest neighbour needs nonnegative costs")
    cheapest, tab = _cheapest(inst, cost)
    nodes = sorted(inst.nodes, key=natural_key)
    cur = start if start is not None else nodes[0]
    seq, left = [cur], [v for v in nodes if v != cur]
    while left:
        nxt = min(left, key=lambda v: (tab[cheapest[(cur, v)]], natural_key(v)))
        seq.append(nxt)
        left.remove(nxt)
        cur = nxt
    walk = _tour(seq, cheapest)
    return Solution(walk), tour_value(walk, tab)


def _require_metric(inst: Instance, cost: str):
    _require_complete(inst)
    pc = PairCosts(inst.graph, inst.table(cost))
    bad = check_symmetric(pc)
    if bad:
        raise UnverifiedPropertyError(f"costs are not symmetric at {bad}")
    bad = check_triangle(pc)
    if bad:
        raise UnverifiedPropertyError(f"triangle inequality fails at {bad}")


def _mst(inst: Instance, cheapest: dict, tab: dict) -> nx.Graph:
    g = nx.Graph()
    nodes = sorted(inst.nodes, key=natural_key)
    g.add_nodes_from(nodes)
    for i, u in enumerate(nodes):
        for v in nodes[i + 1:]:
            g.add_edge(u, v, weight=tab[cheapest[(u, v)]])
    return nx.minimum_spanning_tree(g, algorithm="kruskal")


def double_tree(inst: Instance, cost: str = "c") -> tuple[Solution, Fraction]:
    """Preorder walk of a minimum spanning tree with repeated nodes skipped."""
    _require_metric(inst, cost)
    cheapest, tab = _cheapest(inst, cost)
    nodes = sorted(inst.nodes, key=natural_key)
    if len(nodes) == 1:
        return Solution(Walk((NodeStep(nodes[0]),))), Fraction(0)
    tree = _mst(inst, cheapest, tab)
    seq, stack, seen = [], [nodes[0]], set()
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        seq.append(x)
        for y in sorted(tree.neighbors(x), key=natural_key, reverse=True):
            if y not in seen:
                stack.append(y)
    walk = _tour(seq, cheapest)
    return Solution(walk), tour_value(walk, tab)


def min_weight_perfect_matching(nodes: list, weight) -> list[tuple]:
    """Exact minimum-weight perfect matching by dynamic programming over subsets."""
    n = len(nodes)
    if n % 2:
        raise ValueError("perfect matching needs an even number of nodes")
    if n > 20:
        m = nx.Graph()
        for i in range(n):
            for j in range(i + 1, n):
                m.add_edge(nodes[i], nodes[j], weight=weight(nodes[i], nodes[j]))
        return sorted(tuple(sorted(p, key=natural_key)) for p in nx.min_weight_matching(m))
    full = (1 << n) - 1
    memo: dict[int, tuple] = {0: (Fraction(0), ())}

    def solve(mask: int):
        if mask in memo:
            return memo[mask]
        i = (mask & -mask).bit_length() - 1
        best = None
        rest = mask & ~(1 << i)
        j_bits = rest
        while j_bits:
            j = (j_bits & -j_bits).bit_length() - 1
            j_bits &= j_bits - 1
            sub_val, sub_pairs = solve(rest & ~(1 << j))
            val = sub_val + weight(nodes[i], nodes[j])
            cand = (val, ((nodes[i], nodes[j]),) + sub_pairs)
            if best is None or val < best[0]:
                best = cand
        memo[mask] = best
        return best

    return list(solve(full)[1])


def christofides(inst: Instance, cost: str = "c") -> tuple[Solution, Fraction]:
    """Spanning tree plus exact matching on odd nodes, Euler tour, then shortcuts."""
    _require_metric(inst, cost)
    nodes = sorted(inst.nodes, key=natural_key)
    if len(nodes) < 3:
        raise UnverifiedPropertyError("christofides needs at least three nodes")
    cheapest, tab = _cheapest(inst, cost)
    tree = _mst(inst, cheapest, tab)
    odd = sorted((v for v, d in tree.degree() if d % 2), key=natural_key)
    pairs = min_weight_perfect_matching(odd, lambda a, b: tab[cheapest[(a, b)]])
    multi = nx.MultiGraph()
    multi.add_nodes_from(nodes)
    multi.add_edges_from(sorted(tree.edges(), key=lambda e: (natural_key(e[0]), natural_key(e[1]))))
    multi.add_edges_from(pairs)
    seq, seen = [], set()
    for u, _ in nx.eulerian_circuit(multi, source=nodes[0]):
        if u not in seen:
            seen.add(u)
            seq.append(u)
    walk = _tour(seq, cheapest)
    return Solution(walk), tour_value(walk, tab)


def ratio_check(variant: ResolvedVariant, inst: Instance, approx: Solution, bound,
                limits: SolveLimits = SolveLimits()) -> bool | None:
    """Whether the heuristic value is within ``bound`` of the optimum; None when the oracle gives up."""
    res = brute_force(variant, inst, limits)
    if res.status != "optimal":
        return None
    oracle = Oracle(variant, inst)
    val = oracle.value(approx.walk, approx.shares)
    bound = Fraction(bound)
    if oracle.sense > 0:
        return val <= bound * res.value
    return val * bound >= res.value
