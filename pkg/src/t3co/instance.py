"""Concrete instances: the native ``.t3i`` format, a TSPLIB subset, property checks and metric closure."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from .errors import BindingError, ClosureError, InstanceFormatError, RangeError, UnsupportedFormatError
from .model import Edge, Graph, natural_key
from .semantics import AnyValue, Choice, LowerBound, PurchaseDemand, ResolvedVariant, TagValue, TimeWindow, UpperBound

INF = math.inf

SECTIONS = ("NODES", "EDGES", "COSTS", "TEMPORAL", "PARAMS", "GROUPS", "CLUSTERS", "SETS",
            "PRECEDENCES", "COORDS", "KINETIC")


def parse_number(text: str):
    """Exact rational from ``p/q``, an integer or a decimal; ``inf`` and ``∞`` give infinity."""
    t = text.strip()
    if t in ("inf", "∞", "+inf"):
        return INF
    try:
        return Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise InstanceFormatError(f"not a number: {text!r}") from None


def format_number(x) -> str:
    if x == INF:
        return "inf"
    return str(Fraction(x))


@dataclass(frozen=True)
class NodeSet:
    """Group or cluster with optional start, end and terminal designations."""

    index: str
    nodes: tuple
    start: str | None = None
    end: str | None = None
    terminals: tuple = ()


@dataclass(frozen=True)
class TemporalTable:
    """Piecewise constant costs over arrival time (``time``) or edge position (``position``)."""

    kind: str
    entries: dict  # element -> tuple of (breakpoint, value), breakpoints ascending

    def value(self, element: str, key) -> Fraction:
        points = self.entries.get(element)
        if not points:
            raise BindingError(f"no temporal entry for {element}")
        best = None
        for bp, val in points:
            if bp <= key:
                best = val
            else:
                break
        if best is None:
            raise BindingError(f"temporal entry for {element} starts after {key}")
        return best


@dataclass(frozen=True)
class Instance:
    graph: Graph
    tables: dict = field(default_factory=dict)  # name -> {element id: value}
    params: dict = field(default_factory=dict)
    groups: tuple = ()
    clusters: tuple = ()
    sets: dict = field(default_factory=dict)
    precedences: tuple = ()
    temporal: dict = field(default_factory=dict)
    coords: dict = field(default_factory=dict)
    kinetic: dict = field(default_factory=dict)
    # closure edge id -> path as alternating edge and node ids, set by metric_closure
    expansion: dict = field(default_factory=dict, compare=False)

    @property
    def nodes(self) -> tuple:
        return self.graph.nodes

    def table(self, name: str) -> dict:
        try:
            return self.tables[name]
        except KeyError:
            raise BindingError(f"instance has no table {name!r}") from None

    def scalar(self, name: str):
        if name not in self.params:
            raise BindingError(f"instance has no parameter {name!r}")
        return self.params[name]


# ------------------------------------------------------------------ native


def _split_sections(text: str):
    current = None
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()
        if head[0] in SECTIONS:
            current = (head[0], head[1:], lineno, [])
            out.append(current)
            continue
        if current is None:
            raise InstanceFormatError(f"line {lineno}: content before the first section")
        current[3].append((lineno, line))
    return out


def _node_set(index: str, rest: str, lineno: int) -> NodeSet:
    parts = [p.strip() for p in rest.split(";")]
    nodes = tuple(parts[0].split())
    extra = {}
    for p in parts[1:]:
        if "=" not in p:
            raise InstanceFormatError(f"line {lineno}: expected key=value, got {p!r}")
        k, v = (s.strip() for s in p.split("=", 1))
        if k not in ("start", "end", "terminals"):
            raise InstanceFormatError(f"line {lineno}: unknown designation {k!r}")
        extra[k] = v
    return NodeSet(index, nodes, extra.get("start"), extra.get("end"),
                   tuple(extra.get("terminals", "").split()))


def load_native(text: str, variant: ResolvedVariant | None = None) -> Instance:
    nodes: list[str] = []
    edges: list[Edge] = []
    kinds: set[str] = set()
    tables: dict[str, dict] = {}
    temporal: dict[str, TemporalTable] = {}
    params: dict = {}
    groups, clusters, precedences = [], [], []
    sets: dict[str, tuple] = {}
    coords, kinetic = {}, {}
    for name, args, hline, lines in _split_sections(text):
        def need(n, where=hline):
            if len(args) != n:
                raise InstanceFormatError(f"line {where}: {name} takes {n} argument(s)")

        if name == "NODES":
            need(0)
            for _, line in lines:
                nodes.extend(line.split())
        elif name == "EDGES":
            need(0)
            for lineno, line in lines:
                tok = line.split()
                if len(tok) not in (3, 4):
                    raise InstanceFormatError(f"line {lineno}: expected 'id u v [direction]'")
                kinds.add(tok[3] if len(tok) == 4 else "undirected")
                edges.append(Edge(*tok[:3]))
        elif name == "COSTS":
            need(1)
            tab = tables.setdefault(args[0], {})
            for lineno, line in lines:
                tok = line.split()
                if len(tok) != 2:
                    raise InstanceFormatError(f"line {lineno}: expected 'element value'")
                if tok[0] in tab:
                    raise InstanceFormatError(f"line {lineno}: {tok[0]} listed twice in {args[0]}")
                tab[tok[0]] = _num(tok[1], lineno)
        elif name == "TEMPORAL":
            need(2)
            if args[1] not in ("time", "position"):
                raise InstanceFormatError(f"line {hline}: temporal kind must be time or position")
            entries = {}
            for lineno, line in lines:
                tok = line.split()
                pts = []
                for t in tok[1:]:
                    if ":" not in t:
                        raise InstanceFormatError(f"line {lineno}: expected breakpoint:value, got {t!r}")
                    bp, val = t.split(":", 1)
                    pts.append((_num(bp, lineno), _num(val, lineno)))
                if [p[0] for p in pts] != sorted(p[0] for p in pts):
                    raise InstanceFormatError(f"line {lineno}: breakpoints must ascend")
                entries[tok[0]] = tuple(pts)
            temporal[args[0]] = TemporalTable(args[1], entries)
        elif name == "PARAMS":
            need(0)
            for lineno, line in lines:
                if "=" not in line:
                    raise InstanceFormatError(f"line {lineno}: expected key = value")
                k, v = (s.strip() for s in line.split("=", 1))
                try:
                    params[k] = parse_number(v)
                except InstanceFormatError:
                    params[k] = v
        elif name in ("GROUPS", "CLUSTERS"):
            need(0)
            target = groups if name == "GROUPS" else clusters
            for lineno, line in lines:
                if ":" not in line:
                    raise InstanceFormatError(f"line {lineno}: expected 'index: nodes'")
                idx, rest = line.split(":", 1)
                target.append(_node_set(idx.strip(), rest, lineno))
        elif name == "SETS":
            need(1)
            sets[args[0]] = tuple(t for _, line in lines for t in line.split())
        elif name == "PRECEDENCES":
            need(0)
            for lineno, line in lines:
                tok = line.split()
                if len(tok) != 2:
                    raise InstanceFormatError(f"line {lineno}: expected 'before after'")
                precedences.append((tok[0], tok[1]))
        elif name == "COORDS":
            need(0)
            for lineno, line in lines:
                tok = line.split()
                if len(tok) != 3:
                    raise InstanceFormatError(f"line {lineno}: expected 'node x y'")
                coords[tok[0]] = (_num(tok[1], lineno), _num(tok[2], lineno))
        elif name == "KINETIC":
            need(0)
            for lineno, line in lines:
                tok = line.split()
                if len(tok) != 5:
                    raise InstanceFormatError(f"line {lineno}: expected 'node x y speed angle'")
                kinetic[tok[0]] = tuple(_num(t, lineno) for t in tok[1:])
    if len(kinds) > 1:
        raise InstanceFormatError(f"mixed edge directions {sorted(kinds)}")
    try:
        graph = Graph(tuple(nodes), tuple(edges), kinds.pop() if kinds else "undirected")
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None
    inst = Instance(graph, tables, params, tuple(groups), tuple(clusters), sets,
                    tuple(precedences), temporal, coords, kinetic)
    _check_references(inst)
    if variant is not None:
        bind(inst, variant)
    return inst


def _num(text: str, lineno: int):
    try:
        return parse_number(text)
    except InstanceFormatError as exc:
        raise InstanceFormatError(f"line {lineno}: {exc}") from None


def _check_references(inst: Instance) -> None:
    g = inst.graph
    known = set(g.nodes) | {e.id for e in g.edges}
    for name, tab in inst.tables.items():
        for k in tab:
            if k not in known:
                raise InstanceFormatError(f"table {name} mentions unknown element {k!r}")
    for name, tt in inst.temporal.items():
        for k in tt.entries:
            if k not in known:
                raise InstanceFormatError(f"temporal table {name} mentions unknown element {k!r}")
    for ns in (*inst.groups, *inst.clusters):
        for v in (*ns.nodes, *([ns.start] if ns.start else []), *([ns.end] if ns.end else []), *ns.terminals):
            if not g.has_node(v):
                raise InstanceFormatError(f"set {ns.index} mentions unknown node {v!r}")
    for a, b in inst.precedences:
        if not (g.has_node(a) and g.has_node(b)):
            raise InstanceFormatError(f"precedence {a} {b} mentions an unknown node")
    for sname, members in inst.sets.items():
        for v in members:
            if not g.has_node(v):
                raise InstanceFormatError(f"set {sname} mentions unknown node {v!r}")
    for v in (*inst.coords, *inst.kinetic):
        if not g.has_node(v):
            raise InstanceFormatError(f"coordinates given for unknown node {v!r}")
    r, d = inst.tables.get("r"), inst.tables.get("d")
    if r and d:
        for v in g.nodes:
            if v in r and v in d and r[v] > d[v]:
                raise InstanceFormatError(f"time window of {v} is empty: r={format_number(r[v])} > d={format_number(d[v])}")


def load_native_file(path, variant=None) -> Instance:
    return load_native(Path(path).read_text(encoding="utf-8"), variant)


def save_native(inst: Instance) -> str:
    g = inst.graph
    out = ["NODES", " ".join(g.nodes)]
    if g.edges:
        out += ["", "EDGES"]
        suffix = "" if g.directedness == "undirected" else " " + g.directedness
        out += [f"{e.id} {e.u} {e.v}{suffix}" for e in g.edges]
    for name, tab in inst.tables.items():
        out += ["", f"COSTS {name}"] + [f"{k} {format_number(v)}" for k, v in tab.items()]
    for name, tt in inst.temporal.items():
        out += ["", f"TEMPORAL {name} {tt.kind}"]
        for k, pts in tt.entries.items():
            out.append(k + " " + " ".join(f"{format_number(b)}:{format_number(v)}" for b, v in pts))
    if inst.params:
        out += ["", "PARAMS"]
        for k, v in inst.params.items():
            out.append(f"{k} = {v if isinstance(v, str) else format_number(v)}")
    for title, seq in (("GROUPS", inst.groups), ("CLUSTERS", inst.clusters)):
        if seq:
            out += ["", title]
            for ns in seq:
                line = f"{ns.index}: " + " ".join(ns.nodes)
                if ns.start:
                    line += f"; start={ns.start}"
                if ns.end:
                    line += f"; end={ns.end}"
                if ns.terminals:
                    line += "; terminals=" + " ".join(ns.terminals)
                out.append(line)
    for name, members in inst.sets.items():
        out += ["", f"SETS {name}", " ".join(members)]
    if inst.precedences:
        out += ["", "PRECEDENCES"] + [f"{a} {b}" for a, b in inst.precedences]
    if inst.coords:
        out += ["", "COORDS"] + [f"{v} {format_number(x)} {format_number(y)}" for v, (x, y) in inst.coords.items()]
    if inst.kinetic:
        out += ["", "KINETIC"] + [v + " " + " ".join(format_number(t) for t in vals)
                                  for v, vals in inst.kinetic.items()]
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------- binding


def domain_elements(graph: Graph, domain: str) -> list[str]:
    """Element ids a cost function with the given domain text must cover."""
    parts = {p.strip() for p in domain.replace("∪", " ").split()}
    elems: list[str] = []
    if "E" in parts:
        elems += [e.id for e in graph.edges]
    if "V" in parts:
        elems += list(graph.nodes)
    return elems


def restrict(table: dict, graph: Graph, domain: str) -> dict:
    """Entries of ``table`` on the declared domain only."""
    keep = set(domain_elements(graph, domain))
    if not keep:
        return dict(table)
    return {k: v for k, v in table.items() if k in keep}


_RANGE = re.compile(r"^([ℝℤℕ])(≥0|>0)?$")


def in_range(value, range_text: str) -> bool:
    t = range_text.replace(" ", "")
    m = _RANGE.match(t)
    if m:
        base, sign = m.groups()
        if value == INF:
            return False
        if base in "ℤℕ" and Fraction(value).denominator != 1:
            return False
        if base == "ℕ" and value < 0:
            return False
        if sign == "≥0":
            return value >= 0
        if sign == ">0":
            return value > 0
        return True
    if t.startswith("{") and t.endswith("}") and "…" not in t and ":" not in t:
        allowed = set()
        for item in t[1:-1].split(","):
            try:
                allowed.add(parse_number(item))
            except InstanceFormatError:
                return True  # symbolic members are not checked
        return value in allowed
    return True


def family_size(inst: Instance) -> int:
    m = inst.params.get("m")
    if m is None or m == INF or Fraction(m).denominator != 1 or m < 1:
        raise BindingError("indexed cost families need an integer parameter m ≥ 1")
    return int(m)


def _bound_names(expr) -> set[str]:
    from .expr import Name, Sub, render_expr, walk_tree
    out = set()
    for x in walk_tree(expr):
        if isinstance(x, Sub) and isinstance(x.base, Name):
            out.add(render_expr(x))
        elif isinstance(x, Name):
            out.add(x.text)
    return out


def binding_problems(inst: Instance, variant: ResolvedVariant) -> list[str]:
    g = inst.graph
    problems: list[str] = []

    def cover(tname, domain, rng):
        tab = inst.tables.get(tname)
        if tab is None:
            problems.append(f"missing table {tname}")
            return
        for el in domain_elements(g, domain):
            if el not in tab:
                problems.append(f"table {tname} has no value for {el}")
            elif not in_range(tab[el], rng):
                problems.append(f"range: {tname}({el}) = {format_number(tab[el])} is outside {rng}")

    for c in variant.costs:
        temporal = c.temporal
        if isinstance(temporal, TagValue) and temporal.word in ("kinetic", "waiting"):
            continue  # kinetic data is not evaluated; waits come from the schedule
        if isinstance(temporal, TagValue) and temporal.word in ("time", "position", "costzone", "poszone"):
            if c.name not in inst.temporal:
                problems.append(f"missing temporal table {c.name}")
            continue
        if c.indexed:
            try:
                m = family_size(inst)
            except BindingError as exc:
                problems.append(str(exc))
                continue
            for i in range(1, m + 1):
                cover(f"{c.name}_{i}", c.domain, c.range)
        else:
            cover(c.name, c.domain, c.range)
    for stmt in variant.objectives:
        if isinstance(stmt, (LowerBound, UpperBound)):
            for n in _bound_names(stmt.bound):
                if n not in inst.params:
                    problems.append(f"missing parameter {n}")
        elif isinstance(stmt, TimeWindow):
            for expr in (stmt.release, stmt.deadline):
                if expr is None:
                    continue
                from .expr import Call, Name, walk_tree
                for x in walk_tree(expr):
                    if isinstance(x, Call) and isinstance(x.func, Name):
                        if x.func.text not in inst.tables and variant.cost(x.func.text) is None:
                            problems.append(f"missing table {x.func.text}")
        elif isinstance(stmt, PurchaseDemand) and stmt.kind == "demand":
            try:
                m = family_size(inst)
            except BindingError as exc:
                problems.append(str(exc))
                continue
            for i in range(1, m + 1):
                if f"d_{i}" not in inst.params:
                    problems.append(f"missing parameter d_{i}")
    for flag in ("start", "end"):
        if variant.attribute(flag) is True and flag not in inst.params:
            problems.append(f"missing parameter {flag} (the fixed {flag} node)")
        elif variant.attribute(flag) is True and not g.has_node(str(inst.params[flag])):
            problems.append(f"parameter {flag} names unknown node {inst.params[flag]}")
    if isinstance(variant.group, TagValue) and not inst.groups:
        problems.append("variant declares groups but the instance has none")
    if isinstance(variant.cluster, TagValue) and not inst.clusters:
        problems.append("variant declares clusters but the instance has none")
    if isinstance(variant.precedences, TagValue) and variant.precedences.word == "atomic" and not inst.precedences:
        problems.append("variant declares precedences but the instance has none")
    for name, ns_kind in (("group", variant.group), ("cluster", variant.cluster)):
        sets = inst.groups if name == "group" else inst.clusters
        if isinstance(ns_kind, TagValue) and "partition" in ns_kind.word and sets:
            seen: dict[str, str] = {}
            for ns in sets:
                for v in ns.nodes:
                    if v in seen:
                        problems.append(f"{name} partition: {v} lies in sets {seen[v]} and {ns.index}")
                    seen[v] = ns.index
            if name == "cluster":
                missing = [v for v in g.nodes if v not in seen]
                if missing:
                    problems.append(f"cluster partition misses {', '.join(missing)}")
    return problems


def bind(inst: Instance, variant: ResolvedVariant) -> Instance:
    """Raise if a symbol the variant needs is unbound or out of range."""
    problems = binding_problems(inst, variant)
    ranges = [p for p in problems if p.startswith("range:")]
    if ranges and len(ranges) == len(problems):
        raise RangeError("; ".join(ranges))
    if problems:
        raise BindingError("; ".join(problems))
    return inst


# ------------------------------------------------------------------ TSPLIB


def load_tsplib(text: str) -> Instance:
    spec: dict[str, str] = {}
    lines = [ln.strip() for ln in text.splitlines()]
    i = 0
    coords: dict[str, tuple] = {}
    weights: list = []
    while i < len(lines):
        line = lines[i]
        i += 1
        if not line or line == "EOF":
            continue
        if line == "NODE_COORD_SECTION":
            while i < len(lines) and lines[i] and lines[i][0].isdigit() or (i < len(lines) and lines[i][:1] == "-"):
                tok = lines[i].split()
                coords[tok[0]] = (float(tok[1]), float(tok[2]))
                i += 1
            continue
        if line == "EDGE_WEIGHT_SECTION":
            while i < len(lines) and re.match(r"^[-\d.eE+\s]+$", lines[i] or "x"):
                weights.extend(lines[i].split())
                i += 1
            continue
        if line.endswith("_SECTION"):
            raise UnsupportedFormatError(f"unsupported TSPLIB section {line}")
        if ":" not in line:
            raise InstanceFormatError(f"TSPLIB line without keyword: {line!r}")
        k, v = (s.strip() for s in line.split(":", 1))
        spec[k] = v
    typ = spec.get("TYPE", "TSP")
    if typ not in ("TSP", "ATSP"):
        raise UnsupportedFormatError(f"unsupported TSPLIB TYPE {typ}")
    n = int(spec.get("DIMENSION", "0"))
    ewt = spec.get("EDGE_WEIGHT_TYPE")
    nodes = tuple(str(k) for k in range(1, n + 1))
    dist: dict[tuple, Fraction] = {}
    if ewt == "EUC_2D":
        if typ == "ATSP":
            raise UnsupportedFormatError("EDGE_WEIGHT_TYPE EUC_2D with TYPE ATSP")
        if set(coords) != set(nodes):
            raise InstanceFormatError("NODE_COORD_SECTION must list nodes 1..DIMENSION")
        for a in range(n):
            for b in range(a + 1, n):
                (x1, y1), (x2, y2) = coords[nodes[a]], coords[nodes[b]]
                dist[(nodes[a], nodes[b])] = Fraction(int(math.sqrt((x1 - x2) ** 2 + (y1 - y2) ** 2) + 0.5))
    elif ewt == "EXPLICIT":
        fmt = spec.get("EDGE_WEIGHT_FORMAT")
        if fmt != "FULL_MATRIX":
            raise UnsupportedFormatError(f"unsupported EDGE_WEIGHT_FORMAT {fmt}")
        if len(weights) != n * n:
            raise InstanceFormatError(f"FULL_MATRIX needs {n * n} weights, found {len(weights)}")
        w = [[Fraction(weights[a * n + b]) for b in range(n)] for a in range(n)]
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                if typ == "TSP":
                    if w[a][b] != w[b][a]:
                        raise InstanceFormatError(f"TYPE TSP with asymmetric weights at {a + 1},{b + 1}")
                    if a < b:
                        dist[(nodes[a], nodes[b])] = w[a][b]
                else:
                    dist[(nodes[a], nodes[b])] = w[a][b]
    else:
        raise UnsupportedFormatError(f"unsupported EDGE_WEIGHT_TYPE {ewt}")
    edges = tuple(Edge(f"e{u}_{v}", u, v) for (u, v) in dist)
    graph = Graph(nodes, edges, "undirected" if typ == "TSP" else "directed")
    table = {f"e{u}_{v}": c for (u, v), c in dist.items()}
    cc = {v: (Fraction(x), Fraction(y)) for v, (x, y) in coords.items()}
    return Instance(graph, {"c": table}, {"name": spec["NAME"]} if "NAME" in spec else {}, coords=cc)


# -------------------------------------------------------------- properties


@dataclass(frozen=True)
class PropertyResult:
    cost: str
    prop: str
    status: str  # verified | violated | declared-only
    witness: tuple = ()


@dataclass(frozen=True)
class PropertyReport:
    results: tuple

    @property
    def ok(self) -> bool:
        return all(r.status != "violated" for r in self.results)

    def status(self, cost: str, prop: str) -> str | None:
        for r in self.results:
            if r.cost == cost and r.prop == prop:
                return r.status
        return None


class PairCosts:
    """Edge costs seen as a function of ordered node pairs.

    With parallel edges a property must hold for every choice, so the left
    side of an inequality takes the largest and the right side the smallest.
    """

    def __init__(self, graph: Graph, table: dict):
        self.nodes = graph.nodes
        self.hi: dict[tuple, Fraction] = {}
        self.lo: dict[tuple, Fraction] = {}
        for e in graph.edges:
            if e.id not in table:
                raise BindingError(f"edge {e.id} has no cost")
            c = table[e.id]
            pairs = [(e.u, e.v)] if graph.directed else [(e.u, e.v), (e.v, e.u)]
            for p in pairs:
                self.hi[p] = max(self.hi.get(p, c), c)
                self.lo[p] = min(self.lo.get(p, c), c)


def _pc(inst: Instance, cost: str) -> PairCosts:
    return PairCosts(inst.graph, inst.table(cost))


def check_identity(pc: PairCosts):
    for (u, v), c in sorted(pc.hi.items()):
        lo = pc.lo[(u, v)]
        if u == v and c != 0:
            return (u, v)
        if u != v and lo <= 0:
            return (u, v)
    return None


def check_symmetric(pc: PairCosts):
    for (u, v) in sorted(pc.hi):
        if (v, u) not in pc.hi or pc.hi[(u, v)] != pc.lo[(v, u)] or pc.lo[(u, v)] != pc.hi[(v, u)]:
            return (u, v)
    return None


def check_triangle(pc: PairCosts, alpha=Fraction(1)):
    for (u, v), c in sorted(pc.hi.items()):
        for w in pc.nodes:
            if w in (u, v):
                continue
            a, b = pc.lo.get((u, w)), pc.lo.get((w, v))
            if a is not None and b is not None and c > alpha * (a + b):
                return (u, w, v)
    return None


def check_euclidean(pc: PairCosts, coords: dict, rel_tol: float = 1e-9):
    missing = [v for v in pc.nodes if v not in coords]
    if missing:
        return (missing[0],)
    for (u, v) in sorted(pc.hi):
        (x1, y1), (x2, y2) = coords[u], coords[v]
        d = math.hypot(float(x1 - x2), float(y1 - y2))
        for c in (pc.hi[(u, v)], pc.lo[(u, v)]):
            if not math.isclose(float(c), d, rel_tol=rel_tol, abs_tol=1e-12):
                return (u, v)
    return None


def check_shoreline(pc: PairCosts):
    """Symmetric costs on nodes in declaration order, monotone along the line."""
    nodes = pc.nodes
    for v in nodes:
        if (v, v) in pc.hi and pc.hi[(v, v)] != 0:
            return (v, v)
    bad = check_symmetric(pc)
    if bad:
        return bad
    n = len(nodes)
    for i in range(n):
        for k in range(i, n):
            for j in range(k, n):
                vi, vk, vj = nodes[i], nodes[k], nodes[j]
                cij = _c(pc, vi, vj)
                cik = _c(pc, vi, vk)
                ckj = _c(pc, vk, vj)
                if None in (cij, cik, ckj):
                    return (vi, vk, vj)
                if cij < cik or cij < ckj or cij > cik + ckj:
                    return (vi, vk, vj)
    return None


def _c(pc: PairCosts, u, v):
    if u == v:
        return pc.hi.get((u, v), Fraction(0))
    return pc.hi.get((u, v))


_ALPHA_KEYS = {"α": ("α", "alpha"), "τ": ("τ", "tau"), "λ": ("λ", "lambda")}


def _alpha(inst: Instance, word: str):
    prefix = word[: -len("-triangle")]
    for key in _ALPHA_KEYS.get(prefix, (prefix,)):
        if key in inst.params:
            return inst.params[key]
    raise BindingError(f"{word} needs parameter {prefix}")


def check_property(inst: Instance, cost: str, word: str) -> PropertyResult:
    pc = _pc(inst, cost)
    if word in ("identity", "symmetric", "triangle", "metric", "shoreline") or word.endswith("-triangle"):
        if word == "identity":
            w = check_identity(pc)
        elif word == "symmetric":
            w = check_symmetric(pc)
        elif word == "triangle":
            w = check_triangle(pc)
        elif word == "shoreline":
            w = check_shoreline(pc)
        elif word == "metric":
            w = check_identity(pc) or check_symmetric(pc) or check_triangle(pc)
        else:
            w = check_triangle(pc, Fraction(_alpha(inst, word)))
        return PropertyResult(cost, word, "violated" if w else "verified", w or ())
    if word.startswith("euclid"):
        w = check_euclidean(pc, inst.coords)
        return PropertyResult(cost, word, "violated" if w else "verified", w or ())
    return PropertyResult(cost, word, "declared-only")


def check_declared_properties(inst: Instance, variant: ResolvedVariant) -> PropertyReport:
    out = []
    for c in variant.costs:
        if c.domain != "E":
            continue
        for p in c.properties:
            options = p.options if isinstance(p, Choice) else (p,)
            for opt in options:
                if isinstance(opt, AnyValue):
                    continue
                words = opt.param_words() if opt.word == "params" else (opt.word,)
                for w in words:
                    out.append(check_property(inst, c.name, w))
    return PropertyReport(tuple(out))


# ---------------------------------------------------------- metric closure


def shortest_paths(graph: Graph, table: dict):
    """Floyd-Warshall distances and next-edge table over the given edge costs."""
    nodes = graph.nodes
    dist: dict[tuple, Fraction] = {}
    nxt: dict[tuple, tuple] = {}
    for v in nodes:
        dist[(v, v)] = Fraction(0)
    for e in sorted(graph.edges, key=lambda e: natural_key(e.id)):
        c = table[e.id]
        if c < 0:
            raise ClosureError(f"edge {e.id} has negative cost")
        ends = [(e.u, e.v)] if graph.directed else [(e.u, e.v), (e.v, e.u)]
        for a, b in ends:
            if a != b and ((a, b) not in dist or c < dist[(a, b)]):
                dist[(a, b)] = c
                nxt[(a, b)] = (e.id, b)
    for k in nodes:
        for i in nodes:
            dik = dist.get((i, k))
            if dik is None:
                continue
            for j in nodes:
                dkj = dist.get((k, j))
                if dkj is None:
                    continue
                if (i, j) not in dist or dik + dkj < dist[(i, j)]:
                    dist[(i, j)] = dik + dkj
                    nxt[(i, j)] = nxt[(i, k)]
    return dist, nxt


def path_steps(nxt: dict, u: str, v: str) -> tuple:
    """Alternating edge and node ids of the shortest u-v path, without u."""
    out = []
    while u != v:
        eid, u = nxt[(u, v)]
        out += [eid, u]
    return tuple(out)


def closure_edge_id(u: str, v: str) -> str:
    return f"{u}~{v}"


def metric_closure(inst: Instance, cost: str = "c") -> Instance:
    """Complete graph on the same nodes with shortest-path costs."""
    g = inst.graph
    table = inst.table(cost)
    dist, nxt = shortest_paths(g, table)
    nodes = g.nodes
    for u in nodes:
        for v in nodes:
            if (u, v) not in dist:
                raise ClosureError(f"{v} is unreachable from {u}")
    edges, costs, expansion = [], {}, {}
    for i, u in enumerate(nodes):
        for j, v in enumerate(nodes):
            if u == v or (not g.directed and j < i):
                continue
            eid = closure_edge_id(u, v)
            edges.append(Edge(eid, u, v))
            costs[eid] = dist[(u, v)]
            expansion[eid] = path_steps(nxt, u, v)
    directedness = "undirected" if not g.directed else "directed"
    graph = Graph(nodes, tuple(edges), directedness)
    node_ids = set(nodes)
    tables = {}
    for name, tab in inst.tables.items():
        kept = {k: val for k, val in tab.items() if k in node_ids}
        if name == cost:
            kept = {**costs, **kept}
        if kept or name == cost:
            tables[name] = kept
    return replace(inst, graph=graph, tables=tables, temporal={}, expansion=expansion)


def expand_walk(closure: Instance, walk):
    """Replace closure edges by the paths they stand for; inserted nodes are not visited."""
    from .model import EdgeStep, NodeStep, Walk
    if not walk.is_proper():
        raise ClosureError("only proper walks can be expanded")
    steps = list(walk.steps)
    out = [steps[0]]
    for k in range(1, len(steps), 2):
        eid, nxt_step = steps[k].edge, steps[k + 1]
        a = out[-1].node
        path = closure.expansion[eid]
        e = closure.graph.edge(eid)
        if a != e.u:  # undirected closure edge used backwards
            path = _reverse(path, e.u)
        for t in range(0, len(path) - 2, 2):
            out += [EdgeStep(path[t]), NodeStep(path[t + 1], False)]
        out += [EdgeStep(path[-2]), nxt_step]
    return Walk(tuple(out))


def _reverse(path: tuple, start: str) -> tuple:
    nodes = [start] + list(path[1::2])
    edges = list(path[0::2])
    nodes.reverse()
    edges.reverse()
    out = []
    for e, v in zip(edges, nodes[1:]):
        out += [e, v]
    return tuple(out)
