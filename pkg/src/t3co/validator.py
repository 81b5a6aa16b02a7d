"""Feasibility checks and objective values for a candidate solution."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import AmbiguousWalkError, BindingError, InvalidWalkError, UnsupportedSemanticsError
from .expr import BinOp, Call, Group, Juxt, Name, Neg, Num, RelPrefix, Sub, render_expr
from .instance import INF, Instance, family_size, format_number, shortest_paths
from .model import (
    EdgeStep, NodeStep, Walk, bottleneck, complement_cost, originating_proper_walk, scatter,
    traversals_count, visits_count,
)
from .semantics import (
    AnyValue, CardinalityVisited, Choice, ComplementCost, LowerBound, MaxLateness, MaxMinEdge,
    Maximize, MinMaxEdge, Minimize, PriceShareSum, PurchaseDemand, ResolvedVariant, SpecValue,
    TagValue, TimeWindow, TotalCost, UpperBound, WildcardTerm, _fmt_stmt,
)


@dataclass(frozen=True)
class Solution:
    walk: Walk
    shares: dict = field(default_factory=dict)  # (product, node) -> amount


@dataclass(frozen=True)
class Check:
    id: str
    passed: bool
    witness: str = ""


@dataclass(frozen=True)
class ValidationReport:
    feasible: bool
    checks: tuple
    objectives: tuple = ()  # (label, value)
    arrival_times: tuple | None = None
    extensions_unchecked: bool = False

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "checks": [{"id": c.id, "passed": c.passed, "witness": c.witness} for c in self.checks],
            "objectives": [{"statement": lbl, "value": format_number(v)} for lbl, v in self.objectives],
            "arrivalTimes": None if self.arrival_times is None else [format_number(t) for t in self.arrival_times],
            "extensionsUnchecked": self.extensions_unchecked,
        }


# ------------------------------------------------------------- solution text


def parse_solution(text: str, graph=None) -> Solution:
    """Walk ids in order, then an optional ``shares:`` section of ``product node = amount`` lines."""
    body, _, share_text = text.partition("shares:")
    items = [t for line in body.splitlines() for t in line.split("#", 1)[0].split()]
    walk = Walk.of(*items, graph=graph)
    shares = {}
    for line in share_text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        left, _, amount = line.partition("=")
        tok = left.split()
        if len(tok) != 2 or not amount.strip():
            raise BindingError(f"share line must read 'product node = amount': {line!r}")
        shares[(int(tok[0]), tok[1])] = Fraction(amount.strip())
    return Solution(walk, shares)


def format_solution(sol: Solution) -> str:
    out = str(sol.walk) + "\n"
    if sol.shares:
        out += "shares:\n"
        for (i, v), amt in sorted(sol.shares.items()):
            out += f"{i} {v} = {format_number(amt)}\n"
    return out


# ---------------------------------------------------------------- helpers


def ensure_supported(variant: ResolvedVariant) -> None:
    """Reject semantics this validator cannot execute."""
    cnt = variant.count
    if not (isinstance(cnt, SpecValue) and cnt.relation == "=" and cnt.constant() == 1):
        raise UnsupportedSemanticsError(f"only a single traveler is supported, got count {cnt}")
    for name in ("traversals", "visits", "group", "covering", "start", "end", "circuit",
                 "graphtype", "edgetype", "precedences", "cluster"):
        v = variant.attribute(name)
        if isinstance(v, (AnyValue, Choice)):
            raise UnsupportedSemanticsError(f"{name} = {v} must be fixed before validation")
    if isinstance(variant.precedences, TagValue) and variant.precedences.word == "arbitrary":
        raise UnsupportedSemanticsError("arbitrary precedences live in the extension and are not executable")
    for c in variant.costs:
        t = c.temporal
        if isinstance(t, (AnyValue, Choice)):
            raise UnsupportedSemanticsError(f"temporal = {t} on {c.name} must be fixed before validation")
        if isinstance(t, TagValue) and t.word == "kinetic":
            raise UnsupportedSemanticsError("kinetic costs are parsed but not evaluated")
    for s in variant.objectives:
        term = getattr(s, "term", None)
        if term is not None and any(isinstance(a, WildcardTerm) for _, a in term.parts):
            raise UnsupportedSemanticsError("objective '*' must be fixed before validation")


def evaluate_expr(expr, inst: Instance, node: str | None = None, extra: dict | None = None):
    """Numeric value of a bound or deadline expression at the current node."""
    extra = extra or {}
    if isinstance(expr, Num):
        return Fraction(expr.text)
    if isinstance(expr, Name):
        if expr.text in extra:
            return extra[expr.text]
        if expr.text == "∞":
            return INF
        return _param(inst, expr.text)
    if isinstance(expr, Sub) and isinstance(expr.base, Name):
        key = render_expr(expr)
        if key in extra:
            return extra[key]
        if key in inst.params:
            return inst.params[key]
        if node is not None and expr.base.text in inst.tables:
            return _table_at(inst, expr.base.text, node)
        return _param(inst, key)
    if isinstance(expr, Call) and isinstance(expr.func, Name) and len(expr.args) == 1:
        if node is None:
            raise BindingError(f"{render_expr(expr)} needs a node")
        return _table_at(inst, expr.func.text, node, extra)
    if isinstance(expr, Group) and len(expr.items) == 1:
        return evaluate_expr(expr.items[0], inst, node, extra)
    if isinstance(expr, Neg):
        return -evaluate_expr(expr.operand, inst, node, extra)
    if isinstance(expr, BinOp):
        a = evaluate_expr(expr.left, inst, node, extra)
        b = evaluate_expr(expr.right, inst, node, extra)
        if expr.op == "+":
            return a + b
        if expr.op == "−":
            return a - b
        if expr.op in ("·", "×"):
            return a * b
        if expr.op == "/":
            return a / b
    if isinstance(expr, Juxt):
        out = Fraction(1)
        for item in expr.items:
            out *= evaluate_expr(item, inst, node, extra)
        return out
    raise UnsupportedSemanticsError(f"cannot evaluate {render_expr(expr)!r}")


def _param(inst: Instance, name: str):
    if name not in inst.params or isinstance(inst.params[name], str):
        raise BindingError(f"missing numeric parameter {name}")
    return inst.params[name]


def _table_at(inst: Instance, name: str, node: str, extra: dict | None = None):
    tab = inst.tables.get(name)
    if tab is None:
        if extra and name in extra:
            return extra[name]
        raise BindingError(f"missing table {name}")
    if node not in tab:
        raise BindingError(f"table {name} has no value for {node}")
    return tab[node]


def order_sequence(walk: Walk, closed: bool) -> list[str]:
    """Visited nodes for order-based checks; a closed walk's repeated endpoint is dropped."""
    seq = list(walk.visited_nodes)
    if closed and len(seq) > 1 and seq[0] == seq[-1] and _last_is_visited(walk):
        seq.pop()
    return seq


def _last_is_visited(walk: Walk) -> bool:
    last = walk.steps[-1]
    return isinstance(last, NodeStep) and last.visited


def _rel(op: str, a, b) -> bool:
    return {"=": a == b, "≤": a <= b, "≥": a >= b, "<": a < b, ">": a > b, "≠": a != b}[op]


# --------------------------------------------------------- edge cost lists


def edge_costs(variant: ResolvedVariant, inst: Instance, walk: Walk, name: str) -> list:
    """Cost of each edge step of ``walk`` under cost function ``name``."""
    sig = variant.cost(name)
    tt = inst.temporal.get(name)
    if sig is not None and isinstance(sig.temporal, TagValue) and sig.temporal.word in (
            "time", "position", "costzone", "poszone"):
        if tt is None:
            raise BindingError(f"missing temporal table {name}")
        out, clock = [], Fraction(0)
        for k, eid in enumerate(walk.edge_ids):
            key = k if tt.kind == "position" else clock
            val = tt.value(eid, key)
            out.append(val)
            clock += val
        return out
    tab = inst.table(name)
    try:
        return [tab[e] for e in walk.edge_ids]
    except KeyError as exc:
        raise BindingError(f"table {name} has no value for {exc.args[0]}") from None


def lifted(variant: ResolvedVariant, inst: Instance, walk: Walk, name: str) -> Fraction:
    """c(S) over the declared domain of ``name``."""
    sig = variant.cost(name)
    domain = sig.domain if sig is not None else "E ∪ V"
    total = Fraction(0)
    if "E" in domain:
        total += sum(edge_costs(variant, inst, walk, name), Fraction(0))
    if "V" in domain:
        tab = inst.table(name)
        for v in walk.visited_nodes:
            if v not in tab:
                raise BindingError(f"table {name} has no value for {v}")
            total += tab[v]
    return total


# --------------------------------------------------------------- schedule


@dataclass(frozen=True)
class Schedule:
    times: tuple  # service start per visited node
    waits: tuple  # wait before each visited node
    ok: bool
    witness: str = ""


def _segments(walk: Walk) -> list[list[int]]:
    """Edge positions travelled before each visited node."""
    segs, cur, k = [], [], 0
    for s in walk.steps:
        if isinstance(s, EdgeStep):
            cur.append(k)
            k += 1
        elif s.visited:
            segs.append(cur)
            cur = []
    return segs


def arrival_schedule(variant: ResolvedVariant, inst: Instance, walk: Walk, tw: TimeWindow | None = None) -> Schedule:
    """Service start times with minimal greedy waiting."""
    if tw is None:
        tws = [s for s in variant.objectives if isinstance(s, TimeWindow)]
        if not tws:
            raise UnsupportedSemanticsError("variant declares no time window")
        tw = tws[0]
    a = tw.arrival
    travel = edge_costs(variant, inst, walk, a.travel)
    handling = inst.table(a.handling) if a.handling else {}
    visited = walk.visited_nodes
    segs = _segments(walk)
    times, waits = [], []
    t = Fraction(0)
    ok, witness = True, ""
    for i, v in enumerate(visited):
        if i > 0:
            t += handling.get(visited[i - 1], 0) if a.handling else 0
        t += sum((travel[k] for k in segs[i]), Fraction(0))
        wait = Fraction(0)
        if tw.release is not None:
            r = evaluate_expr(tw.release, inst, v)
            if t < r:
                if a.waiting is not None:
                    wait = r - t
                elif ok:
                    ok, witness = False, f"release: {v} (index {i}) reached at {format_number(t)} < {format_number(r)}"
        t += wait
        if tw.deadline is not None:
            d = evaluate_expr(tw.deadline, inst, v)
            if t > d and ok:
                ok, witness = False, f"deadline: {v} (index {i}) served at {format_number(t)} > {format_number(d)}"
        times.append(t)
        waits.append(wait)
    return Schedule(tuple(times), tuple(waits), ok, witness)


def _lateness(variant, inst, walk, ml: MaxLateness) -> Fraction:
    a = ml.arrival
    travel = edge_costs(variant, inst, walk, a.travel)
    handling = inst.table(a.handling) if a.handling else {}
    visited = walk.visited_nodes
    t, worst = Fraction(0), Fraction(0)
    for i, (v, seg) in enumerate(zip(visited, _segments(walk))):
        if i > 0 and a.handling:
            t += handling.get(visited[i - 1], 0)
        t += sum((travel[k] for k in seg), Fraction(0))
        worst = max(worst, t - evaluate_expr(ml.deadline, inst, v))
    return worst


# ------------------------------------------------------------------ terms


def _term_value(term, variant, inst, sol: Solution, schedule: Schedule | None) -> Fraction:
    total = Fraction(0)
    for coef, atom in term.parts:
        total += coef * _atom_value(atom, variant, inst, sol, schedule)
    return total


def _atom_value(atom, variant, inst, sol, schedule):
    walk = sol.walk
    if isinstance(atom, TotalCost):
        sig = variant.cost(atom.fn)
        if sig is not None and isinstance(sig.temporal, TagValue) and sig.temporal.word == "waiting":
            return sum(schedule.waits, Fraction(0)) if schedule is not None else Fraction(0)
        return lifted(variant, inst, walk, atom.fn)
    if isinstance(atom, ComplementCost):
        return complement_cost(inst.nodes, walk, inst.table(atom.fn))
    if isinstance(atom, CardinalityVisited):
        return Fraction(len(set(walk.visited_nodes)))
    if isinstance(atom, PriceShareSum):
        total = Fraction(0)
        visited = set(walk.visited_nodes)
        for (i, v), amt in sol.shares.items():
            if v in visited:
                total += _table_at(inst, f"{atom.price}_{i}", v) * amt
        return total
    if isinstance(atom, MaxLateness):
        return _lateness(variant, inst, walk, atom)
    raise UnsupportedSemanticsError(f"cannot evaluate {atom!r}")


def evaluate_objective(variant: ResolvedVariant, inst: Instance, sol: Solution,
                       schedule: Schedule | None = None) -> list[tuple[str, Fraction]]:
    """Exact value of every optimization statement."""
    out = []
    for s in variant.objectives:
        if isinstance(s, (Minimize, Maximize)):
            out.append((_fmt_stmt(s), _term_value(s.term, variant, inst, sol, schedule)))
        elif isinstance(s, (MinMaxEdge, MaxMinEdge)):
            if not sol.walk.edge_ids:
                raise UnsupportedSemanticsError("edge aggregates need at least one edge")
            if s.fn in inst.temporal:
                costs = edge_costs(variant, inst, sol.walk, s.fn)
                value = max(costs) if isinstance(s, MinMaxEdge) else min(costs)
            else:
                fold = bottleneck if isinstance(s, MinMaxEdge) else scatter
                value = fold(sol.walk, inst.table(s.fn))
            out.append((_fmt_stmt(s), value))
    return out


# --------------------------------------------------------------- validate


def _group_rule(tag: TagValue) -> tuple[str, str]:
    """(relation, word) of a group parameter such as ``once`` or ``≥ once``."""
    for p in tag.params:
        if isinstance(p, RelPrefix) and render_expr(p.operand) == "once":
            return p.op, "once"
        if isinstance(p, Name) and p.text == "once":
            return "=", "once"
    return "≥", "once"


def _graph_checks(variant: ResolvedVariant, inst: Instance) -> list[Check]:
    out = []
    g = inst.graph
    et = variant.edgetype
    if isinstance(et, TagValue):
        out.append(Check("edgetype", g.directedness == et.word,
                         "" if g.directedness == et.word else f"graph is {g.directedness}"))
    gt = variant.graphtype
    if isinstance(gt, TagValue) and gt.word != "arbitrary":
        ok, why = _graph_shape(g, gt, inst)
        out.append(Check("graphtype", ok, why))
    return out


def _graph_shape(g, tag: TagValue, inst: Instance) -> tuple[bool, str]:
    nodes = g.nodes
    pairs = {(e.u, e.v) for e in g.edges if e.u != e.v}
    und = {frozenset(p) for p in pairs}
    word = tag.word
    if word == "complete":
        for u in nodes:
            for v in nodes:
                if u == v:
                    continue
                present = frozenset((u, v)) in und if not g.directed else (u, v) in pairs
                if not present:
                    return False, f"missing edge {u} {v}"
        return True, ""
    if word == "strongly connected":
        adj = {v: set() for v in nodes}
        for u, v in pairs:
            adj[u].add(v)
            if not g.directed:
                adj[v].add(u)
        for s in nodes[:1]:
            for forward in (True, False):
                seen, stack = {s}, [s]
                while stack:
                    x = stack.pop()
                    nbrs = adj[x] if forward else {y for y in nodes if x in adj[y]}
                    for y in nbrs - seen:
                        seen.add(y)
                        stack.append(y)
                if len(seen) != len(nodes):
                    return False, f"{sorted(set(nodes) - seen)[0]} is not mutually reachable with {s}"
        return True, ""
    if word == "planar":
        return True, "declared only"
    deg = Counter()
    for p in und:
        for x in p:
            deg[x] += 1
    connected = _connected(nodes, und)
    if word == "cycle":
        ok = connected and len(nodes) >= 3 and all(deg[v] == 2 for v in nodes) and len(und) == len(nodes)
        return ok, "" if ok else "graph is not a cycle"
    is_tree = connected and len(und) == len(nodes) - 1 and len(g.edges) == len(und) * (2 if g.directed else 1)
    if not is_tree:
        return False, "graph is not a tree"
    leaves = sum(1 for v in nodes if deg[v] <= 1)
    if word == "path":
        return all(deg[v] <= 2 for v in nodes), "graph is a tree but not a path"
    if word == "binary tree":
        ok = all(deg[v] <= 3 for v in nodes)
        return ok, "" if ok else "a node has more than three neighbours"
    if word == "tree":
        if tag.params:
            b = evaluate_expr(tag.params[0], inst)
            return leaves == b, "" if leaves == b else f"tree has {leaves} leaves, not {format_number(b)}"
        return True, ""
    return True, "declared only"


def _connected(nodes, und) -> bool:
    if not nodes:
        return True
    adj = {v: set() for v in nodes}
    for p in und:
        a, b = tuple(p)
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {nodes[0]}, [nodes[0]]
    while stack:
        x = stack.pop()
        for y in adj[x] - seen:
            seen.add(y)
            stack.append(y)
    return len(seen) == len(nodes)


def _spec_rhs(spec: SpecValue, inst: Instance, v: str):
    e = spec.expr
    if isinstance(e, Num):
        return Fraction(e.text)
    if isinstance(e, Name):
        if e.text in inst.tables:
            return _table_at(inst, e.text, v)
        return _param(inst, e.text)
    if isinstance(e, Sub) and isinstance(e.base, Name):
        return _table_at(inst, e.base.text, v)
    if isinstance(e, Call) and isinstance(e.func, Name):
        return _table_at(inst, e.func.text, v)
    raise UnsupportedSemanticsError(f"cannot evaluate traversal bound {render_expr(e)!r}")


def validate(variant: ResolvedVariant, inst: Instance, sol: Solution, evaluate: bool = True) -> ValidationReport:
    ensure_supported(variant)
    has_partial = any(c.partial is True for c in variant.costs)
    needs_shares = any(isinstance(s, PurchaseDemand) for s in variant.objectives)
    if sol.shares and not has_partial:
        raise BindingError("shares given but the variant has no partial cost function")
    if needs_shares and not sol.shares and has_partial:
        raise BindingError("the variant needs shares for its purchase constraints")
    checks: list[Check] = []
    ext = variant.extension is not None
    g = inst.graph
    walk = sol.walk
    try:
        proper = originating_proper_walk(g, walk)
    except (InvalidWalkError, AmbiguousWalkError) as exc:
        checks.append(Check("walk", False, str(exc)))
        return ValidationReport(False, tuple(checks), extensions_unchecked=ext)
    checks.append(Check("walk", True))
    closed = bool(proper.edge_ids) and proper.steps[0].node == proper.steps[-1].node
    trav = traversals_count(g, walk)
    vis = visits_count(g, walk)

    spec = variant.traversals
    if isinstance(spec, SpecValue):
        bad = None
        for v in g.nodes:
            rhs = _spec_rhs(spec, inst, v)
            if spec.restriction is not None:
                allowed = {Fraction(x.text) for x in getattr(spec.restriction, "items", ()) if isinstance(x, Num)}
                if allowed and rhs not in allowed:
                    raise BindingError(f"traversal bound at {v} is {format_number(rhs)}, outside {render_expr(spec.restriction)}")
            if not _rel(spec.relation, trav[v], rhs):
                bad = f"traversals({v}) = {trav[v]} violates {spec.relation}{format_number(rhs)}"
                break
        checks.append(Check("traversals", bad is None, bad or ""))

    vs = variant.visits
    if isinstance(vs, TagValue):
        bad = None
        for v in g.nodes:
            t, k = trav[v], vis[v]
            if vs.word == "always":
                ok = k == t
            elif t == 0:
                ok = True
            else:
                ok = _rel(vs.relation, k, 1)
            if not ok:
                bad = f"visits({v}) = {k} with traversals {t} violates {vs}"
                break
        checks.append(Check("visits", bad is None, bad or ""))

    visited_set = set(walk.visited_nodes)
    grp = variant.group
    if isinstance(grp, TagValue):
        rel, _ = _group_rule(grp)
        bad = None
        for ns in inst.groups:
            hit = len(visited_set & set(ns.nodes))
            if not _rel(rel, hit, 1):
                bad = f"group {ns.index} has {hit} visited nodes, needs {rel} 1"
                break
        checks.append(Check("group", bad is None, bad or ""))
    cov = variant.covering
    if isinstance(cov, TagValue):
        checks.append(_covering_check(cov, inst, visited_set))

    for flag in ("start", "end"):
        if variant.attribute(flag) is True and flag not in inst.params:
            raise BindingError(f"the variant fixes the {flag} node but the instance has no {flag} parameter")
    if variant.start is True:
        s = str(inst.params["start"])
        checks.append(Check("start", proper.steps[0].node == s,
                            "" if proper.steps[0].node == s else f"walk starts at {proper.steps[0].node}, not {s}"))
    if variant.end is True:
        t = str(inst.params["end"])
        checks.append(Check("end", proper.steps[-1].node == t,
                            "" if proper.steps[-1].node == t else f"walk ends at {proper.steps[-1].node}, not {t}"))
    if variant.circuit is True:
        ok = closed or not proper.edge_ids
        checks.append(Check("circuit", ok, "" if ok else
                            f"walk runs from {proper.steps[0].node} to {proper.steps[-1].node}"))
    checks.extend(_graph_checks(variant, inst))

    seq = order_sequence(walk, closed)
    if isinstance(variant.precedences, TagValue):
        bad = None
        pos: dict[str, int] = {}
        for i, v in enumerate(seq):
            pos.setdefault(v, i)
        for u, v in inst.precedences:
            if v in pos and (u not in pos or pos[u] >= pos[v]):
                bad = f"{v} visited at index {pos[v]} without {u} before it"
                break
        checks.append(Check("precedences", bad is None, bad or ""))
    if isinstance(variant.cluster, TagValue):
        checks.append(_cluster_check(variant.cluster, inst, seq))

    schedule = None
    for s in variant.objectives:
        if isinstance(s, (UpperBound, LowerBound)):
            val = _term_value(s.term, variant, inst, sol, schedule)
            bound = evaluate_expr(s.bound, inst)
            if isinstance(s, UpperBound):
                ok = val < bound if s.strict else val <= bound
            else:
                ok = val > bound if s.strict else val >= bound
            kind = type(s).__name__
            label = f"{kind}({_term_label(s.term)}, {format_number(bound)})"
            checks.append(Check(kind, ok, "" if ok else f"{label}: value {format_number(val)}"))
        elif isinstance(s, TimeWindow):
            schedule = arrival_schedule(variant, inst, walk, s)
            checks.append(Check("time-window", schedule.ok, schedule.witness))
        elif isinstance(s, PurchaseDemand):
            checks.append(_purchase_check(s, inst, sol, visited_set))
    feasible = all(c.passed for c in checks)
    objectives = evaluate_objective(variant, inst, sol, schedule) if evaluate else []
    return ValidationReport(feasible, tuple(checks), tuple(objectives),
                            None if schedule is None else schedule.times, ext)


def _term_label(term) -> str:
    atom = term.single()
    if isinstance(atom, TotalCost):
        return atom.fn
    if isinstance(atom, CardinalityVisited):
        return "|V_S|"
    return _fmt_stmt(Minimize(term))[len("Minimize("):-1]


def _covering_check(cov: TagValue, inst: Instance, visited: set) -> Check:
    if len(cov.params) != 2:
        raise UnsupportedSemanticsError("covering needs (cost, ≤ bound)")
    fn = head_text(cov.params[0])
    b = cov.params[1].operand if isinstance(cov.params[1], RelPrefix) else cov.params[1]
    bound = evaluate_expr(b, inst)
    dist, _ = shortest_paths(inst.graph, inst.table(fn))
    targets = inst.nodes if cov.word == "all" else inst.sets.get("D", ())
    for v in targets:
        if v in visited:
            continue
        if not any((u, v) in dist and dist[(u, v)] <= bound for u in visited):
            return Check("covering", False, f"{v} is farther than {format_number(bound)} from the walk")
    return Check("covering", True)


def head_text(e) -> str:
    return e.text if isinstance(e, Name) else render_expr(e)


def _cluster_check(tag: TagValue, inst: Instance, seq: list[str]) -> Check:
    clusters = inst.clusters
    member = {ns.index: set(ns.nodes) for ns in clusters}
    for ns in clusters:
        idx = [i for i, v in enumerate(seq) if v in member[ns.index]]
        if idx and idx[-1] - idx[0] + 1 != len(idx):
            gap = next(i for i in range(idx[0], idx[-1]) if i not in idx)
            return Check("cluster", False, f"cluster {ns.index} is interrupted at index {gap} by {seq[gap]}")
    params = set(tag.param_words())
    if "ordered" in params:
        rank = {ns.index: k for k, ns in enumerate(clusters)}
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                for a in clusters:
                    if seq[i] not in member[a.index]:
                        continue
                    for b in clusters:
                        if seq[j] in member[b.index] and rank[a.index] > rank[b.index]:
                            return Check("cluster", False,
                                         f"cluster {a.index} at index {i} comes after cluster {b.index} at index {j}")
    for ns in clusters:
        idx = [i for i, v in enumerate(seq) if v in member[ns.index]]
        if not idx:
            continue
        first, last = seq[idx[0]], seq[idx[-1]]
        if params & {"start", "startend"} and ns.start is not None and first != ns.start:
            return Check("cluster", False, f"cluster {ns.index} entered at {first}, not {ns.start}")
        if "startend" in params and ns.end is not None and last != ns.end:
            return Check("cluster", False, f"cluster {ns.index} left at {last}, not {ns.end}")
        if "terminals" in params and ns.terminals and not {first, last} <= set(ns.terminals):
            return Check("cluster", False, f"cluster {ns.index} uses non-terminal {first if first not in ns.terminals else last}")
    return Check("cluster", True)


def _purchase_check(s: PurchaseDemand, inst: Instance, sol: Solution, visited: set) -> Check:
    m = family_size(inst)
    for (i, v), amt in sorted(sol.shares.items()):
        if amt < 0:
            return Check(f"purchase-{s.kind}", False, f"share_{i}({v}) is negative")
        if amt > 0 and v not in visited:
            return Check(f"purchase-{s.kind}", False, f"share_{i}({v}) bought at an unvisited node")
    if s.kind == "demand":
        for i in range(1, m + 1):
            got = sum((a for (k, v), a in sol.shares.items() if k == i and v in visited), Fraction(0))
            need = evaluate_expr(s.bound, inst, extra={"d_i": _param(inst, f"d_{i}")}
                                 if render_expr(s.bound) == "d_i" else None)
            if got < need:
                return Check("purchase-demand", False, f"product {i}: bought {format_number(got)} < {format_number(need)}")
        return Check("purchase-demand", True)
    name = head_text(s.bound)
    for (i, v), amt in sorted(sol.shares.items()):
        cap = _table_at(inst, f"{name}_{i}", v)
        if amt > cap:
            return Check("purchase-availability", False, f"share_{i}({v}) = {format_number(amt)} > {format_number(cap)}")
    return Check("purchase-availability", True)
