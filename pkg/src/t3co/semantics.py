"""Resolution of a parsed definition into typed attribute values and objectives."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from .errors import RegistryError, ResolutionError, T3coError, UnsupportedObjectiveError
from .expr import (
    BigOp, BinOp, Call, Card, Chain, Compl, Forall, Group, Juxt, Name, Num, RelPrefix,
    SetBuilder, SetLit, Sub, Sup, Wildcard, head_name, render_expr, walk_tree,
)
from .grammar import (
    Alternative, Attribute, CostSignature, Diagnostic, Field, VariantAst, render_attribute,
)
from .registry import BOOLEAN_ALIASES, FIELDS, REGISTRY, AttributeRegistry, is_param_word

# ------------------------------------------------------------------ values


@dataclass(frozen=True)
class AnyValue:
    """Stands for any admissible value of the attribute."""

    def __str__(self):
        return "*"


@dataclass(frozen=True)
class Choice:
    options: tuple

    def __str__(self):
        return " or ".join(str(o) for o in self.options)


@dataclass(frozen=True)
class SpecValue:
    """A relation and a bound, as in ``≥1`` or ``=d(v) ∈ {0, 1}``."""

    relation: str
    expr: object
    restriction: object = None

    def __str__(self):
        out = self.relation + render_expr(self.expr)
        if self.restriction is not None:
            out += " ∈ " + render_expr(self.restriction)
        return out

    def constant(self) -> Fraction | None:
        return Fraction(self.expr.text) if isinstance(self.expr, Num) else None


@dataclass(frozen=True)
class TagValue:
    """A named value with optional relation and parameters, as in ``≤ once``."""

    word: str
    relation: str = "="
    params: tuple = ()

    def __str__(self):
        out = self.word
        if self.params:
            out += "(" + ", ".join(render_expr(p) for p in self.params) + ")"
        return out if self.relation == "=" else f"{self.relation} {out}"

    def param_words(self) -> tuple[str, ...]:
        return tuple(head_name(p) or render_expr(p) for p in self.params)


# ------------------------------------------------------------- objectives


@dataclass(frozen=True)
class TotalCost:
    fn: str


@dataclass(frozen=True)
class ComplementCost:
    fn: str


@dataclass(frozen=True)
class CardinalityVisited:
    pass


@dataclass(frozen=True)
class PriceShareSum:
    price: str


@dataclass(frozen=True)
class Arrival:
    """Cost functions adding up to the service start time at a visited node."""

    travel: str
    waiting: str | None = None
    handling: str | None = None


@dataclass(frozen=True)
class MaxLateness:
    arrival: Arrival
    deadline: object


@dataclass(frozen=True)
class WildcardTerm:
    pass


@dataclass(frozen=True)
class LinearTerm:
    parts: tuple  # of (Fraction, atom)

    def single(self):
        if len(self.parts) == 1 and self.parts[0][0] == 1:
            return self.parts[0][1]
        return None


@dataclass(frozen=True)
class Minimize:
    term: LinearTerm


@dataclass(frozen=True)
class Maximize:
    term: LinearTerm


@dataclass(frozen=True)
class UpperBound:
    term: LinearTerm
    bound: object
    strict: bool = False


@dataclass(frozen=True)
class LowerBound:
    term: LinearTerm
    bound: object
    strict: bool = False


@dataclass(frozen=True)
class MinMaxEdge:
    fn: str


@dataclass(frozen=True)
class MaxMinEdge:
    fn: str


@dataclass(frozen=True)
class TimeWindow:
    arrival: Arrival
    release: object = None
    deadline: object = None


@dataclass(frozen=True)
class PurchaseDemand:
    kind: str  # "demand" or "availability"
    bound: object


OPTIMIZATION = (Minimize, Maximize, MinMaxEdge, MaxMinEdge)

# ---------------------------------------------------------------- variant


@dataclass(frozen=True)
class ResolvedCost:
    name: str
    domain: str
    range: str
    indexed: bool = False
    properties: tuple = ()
    partial: object = False
    temporal: object = None

    def has_property(self, word: str) -> bool:
        for p in self.properties:
            if isinstance(p, TagValue) and (p.word == word or word in p.param_words()):
                return True
        return False


@dataclass(frozen=True)
class ResolvedVariant:
    count: object
    traversals: object
    visits: object
    group: object
    covering: object
    start: object
    end: object
    circuit: object
    graphtype: object
    edgetype: object
    precedences: object
    cluster: object
    costs: tuple
    objectives: tuple
    extension: str | None = None
    annotations: tuple = field(default=(), compare=False)
    defaulted: frozenset = field(default=frozenset(), compare=False)

    def cost(self, name: str) -> ResolvedCost | None:
        for c in self.costs:
            if c.name == name:
                return c
        return None

    def attribute(self, name: str):
        return getattr(self, name)


_DEFAULTS = {
    "count": None, "traversals": None, "visits": None, "group": None, "covering": None,
    "start": False, "end": False, "circuit": False, "graphtype": TagValue("arbitrary"),
    "edgetype": None, "precedences": None, "cluster": None,
}


def _value_of(defn, alts: tuple) -> object:
    if len(alts) > 1:
        return Choice(tuple(_value_of(defn, (a,)) for a in alts))
    rel, expr = alts[0].relation, alts[0].expr
    if isinstance(expr, Wildcard):
        return AnyValue()
    if defn.kind == "bool":
        if rel is None and isinstance(expr, Name) and expr.text == defn.name:
            return True
        if rel == "=" and isinstance(expr, Name) and expr.text in ("True", "False"):
            return expr.text == "True"
        raise ResolutionError(f"{defn.name} takes True or False, not {render_expr(expr)!r}",
                              span=getattr(expr, "span", None))
    if defn.kind == "spec":
        if rel is None:
            rel = "="
        if isinstance(expr, Chain) and expr.ops == ("∈",):
            return SpecValue(rel, expr.operands[0], expr.operands[1])
        return SpecValue(rel, expr)
    return _tag_of(defn.name, rel, expr)


def _tag_of(attr: str, rel, expr) -> TagValue:
    rel = "=" if rel is None else rel
    if isinstance(expr, RelPrefix):
        rel, expr = expr.op, expr.operand
    if isinstance(expr, Group):
        return TagValue("params", rel, tuple(expr.items))
    if isinstance(expr, Call):
        word = head_name(expr.func)
        return TagValue(word, rel, tuple(expr.args))
    word = head_name(expr)
    if word is None:
        raise ResolutionError(f"cannot read {render_expr(expr)!r} as a value of {attr}",
                              span=getattr(expr, "span", None))
    if attr == "property" and is_param_word(word):
        return TagValue("params", rel, (expr,))
    return TagValue(word, rel, ())


def _lookup(registry: AttributeRegistry, kind: str, attr: Attribute):
    """Attribute name and value for one α, β or γ entry."""
    if attr.name is not None:
        name = attr.name
        first = attr.alternatives[0]
        if kind == "gamma" and name in BOOLEAN_ALIASES and name not in registry:
            if len(attr.alternatives) == 1 and first.relation == "=" and isinstance(first.expr, Name):
                if first.expr.text == "True":
                    return BOOLEAN_ALIASES[name], TagValue(name)
                if first.expr.text == "False":
                    return None, None
            raise ResolutionError(f"{name} is written '{name} = True' in longhand", span=attr.span)
        if name == "visits" and all(isinstance(a.expr, Num) for a in attr.alternatives):
            name = "traversals"
        if name not in registry:
            raise RegistryError(f"unknown attribute {name!r}")
        defn = registry.get(name)
        if defn.field != kind:
            raise ResolutionError(f"attribute {name} does not belong to this field", span=attr.span)
        return name, _value_of(defn, attr.alternatives)
    if len(attr.alternatives) != 1:
        raise ResolutionError("alternatives need an attribute name", span=attr.span)
    alt = attr.alternatives[0]
    cands = registry.candidates(kind, alt.relation, alt.expr)
    if len(cands) != 1:
        text = render_attribute(attr)
        if not cands:
            raise ResolutionError(f"no attribute of this field accepts {text!r}",
                                  tuple(d.name for d in registry.in_field(kind)), attr.span)
        raise ResolutionError(f"value {text!r} is ambiguous", tuple(d.name for d in cands), attr.span)
    return cands[0].name, _value_of(cands[0], attr.alternatives)


def _cost_name(e) -> tuple[str, bool]:
    if isinstance(e, Name):
        return e.text, False
    # {avail_i}_{i=1}^m
    base = e
    while isinstance(base, (Sup, Sub)):
        base = base.base
    if isinstance(base, SetLit) and len(base.items) == 1:
        inner = base.items[0]
        if isinstance(inner, Sub) and isinstance(inner.base, Name):
            return inner.base.text, True
    raise ResolutionError(f"cannot read {render_expr(e)!r} as a cost function name",
                          span=getattr(e, "span", None))


def _resolve_cost(registry: AttributeRegistry, sig: CostSignature) -> ResolvedCost:
    name, indexed = _cost_name(sig.name)
    rng = sig.range
    rng_text = render_expr(rng)
    props, partial, temporal = [], False, None
    seen = set()
    for attr in sig.attributes:
        if attr.name is not None:
            if attr.name not in registry or registry.get(attr.name).field != "delta":
                raise ResolutionError(f"{attr.name} is not a cost function attribute", span=attr.span)
            defn = registry.get(attr.name)
        else:
            alt = attr.alternatives[0]
            cands = registry.candidates("delta", alt.relation, alt.expr)
            if len(cands) != 1:
                raise ResolutionError(
                    f"cannot place {render_attribute(attr)!r} on {name}",
                    tuple(d.name for d in (cands or registry.in_field("delta"))), attr.span,
                )
            defn = cands[0]
        value = _value_of(defn, attr.alternatives)
        if defn.name == "property":
            props.append(value)
            continue
        if defn.name in seen:
            raise ResolutionError(f"{defn.name} given twice on {name}", span=attr.span)
        seen.add(defn.name)
        if defn.name == "partial":
            partial = value
        else:
            temporal = value
    props.sort(key=repr)
    return ResolvedCost(name, render_expr(sig.domain), rng_text, indexed, tuple(props), partial, temporal)


def resolve(ast: VariantAst, registry: AttributeRegistry = REGISTRY) -> ResolvedVariant:
    values: dict[str, object] = {}
    for kind in FIELDS[:3]:
        for attr in ast.field(kind).items:
            name, value = _lookup(registry, kind, attr)
            if name is None:
                continue
            if name in values:
                raise ResolutionError(f"attribute {name} is set twice", span=attr.span)
            values[name] = value
    costs = [_resolve_cost(registry, c) for c in ast.field("delta").items]
    names = [c.name for c in costs]
    if len(set(names)) != len(names):
        raise ResolutionError("cost function names must be unique")
    costs.sort(key=lambda c: c.name)
    cost_map = {c.name: c for c in costs}
    objectives = [classify_objective(o, cost_map) for o in ast.field("epsilon").items]
    objectives.sort(key=repr)
    defaulted = frozenset(k for k in _DEFAULTS if k not in values)
    merged = {**_DEFAULTS, **values}
    ext = ast.extension
    return ResolvedVariant(
        **merged, costs=tuple(costs), objectives=tuple(objectives),
        extension=None if ext is None else ext.tag,
        annotations=() if ext is None else ext.annotations,
        defaulted=defaulted,
    )


def resolved_equal(a: ResolvedVariant, b: ResolvedVariant) -> bool:
    return a == b


# ------------------------------------------------------ objective reading


def _fail(e, why: str = "outside the supported objective forms"):
    raise UnsupportedObjectiveError(f"{render_expr(e)!r} is {why}")


def _is_walk(e) -> bool:
    return isinstance(e, Name) and e.text == "S"


def _walk_prefix(e):
    """Relation of a prefix ``S_{<i}`` / ``S_{≤i}``, else None."""
    if isinstance(e, Sub) and _is_walk(e.base) and isinstance(e.index, RelPrefix):
        return e.index.op
    return None


def _fn_name(e) -> str | None:
    if isinstance(e, Name):
        return e.text
    return None


def _atom(e, costs):
    if isinstance(e, Wildcard):
        return WildcardTerm()
    if isinstance(e, Card) and isinstance(e.inner, Sub) and render_expr(e.inner) == "V_S":
        return CardinalityVisited()
    if isinstance(e, Call) and len(e.args) == 1 and _is_walk(e.args[0]):
        if isinstance(e.func, Compl) and _fn_name(e.func.base):
            return ComplementCost(e.func.base.text)
        if _fn_name(e.func):
            return TotalCost(e.func.text)
    if isinstance(e, Name) and e.text in costs:
        return TotalCost(e.text)
    if isinstance(e, BigOp) and e.op == "Σ":
        return _price_share(e)
    if isinstance(e, BigOp) and e.op == "max" and e.sub is not None:
        return _lateness(e, costs)
    _fail(e)


def _price_share(e):
    inner = e.body
    if isinstance(inner, BigOp) and inner.op == "Σ":
        inner = inner.body
    if isinstance(inner, BinOp) and inner.op == "·":
        for a, b in ((inner.left, inner.right), (inner.right, inner.left)):
            if (isinstance(a, Call) and isinstance(a.func, Sub) and isinstance(b, Call)
                    and isinstance(b.func, Sub) and head_name(b.func.base) == "share"):
                return PriceShareSum(head_name(a.func.base))
    _fail(e)


def _lateness(e, costs):
    body = e.body
    if isinstance(body, BigOp) and body.op == "max" and isinstance(body.body, SetLit):
        items = body.body.items
        if len(items) == 2 and isinstance(items[0], Num) and Fraction(items[0].text) == 0:
            diff = items[1]
            if isinstance(diff, BinOp) and diff.op == "−":
                return MaxLateness(_arrival(diff.left, costs), diff.right)
    _fail(e)


def _term(e, costs) -> LinearTerm:
    parts = []

    def collect(x, sign):
        if isinstance(x, BinOp) and x.op in ("+", "−"):
            collect(x.left, sign)
            collect(x.right, sign if x.op == "+" else -sign)
            return
        coef = Fraction(sign)
        if isinstance(x, BinOp) and x.op == "·" and isinstance(x.left, Num):
            coef *= Fraction(x.left.text)
            x = x.right
        elif isinstance(x, Juxt) and len(x.items) == 2 and isinstance(x.items[0], Num):
            coef *= Fraction(x.items[0].text)
            x = x.items[1]
        parts.append((coef, _atom(x, costs)))

    collect(e, 1)
    return LinearTerm(tuple(parts))


def _edge_fold(body):
    """Cost function of ``{c(e) : e ∈ E_S}``."""
    if isinstance(body, SetBuilder) and isinstance(body.element, Call):
        cond = body.condition
        if (isinstance(cond, Chain) and cond.ops == ("∈",) and render_expr(cond.operands[1]) == "E_S"
                and len(body.element.args) == 1):
            return _fn_name(body.element.func)
    return None


def _arrival(e, costs) -> Arrival:
    travel = waiting = handling = None
    terms = []

    def collect(x):
        if isinstance(x, BinOp) and x.op == "+":
            collect(x.left)
            collect(x.right)
        else:
            terms.append(x)

    collect(e)
    for t in terms:
        if not (isinstance(t, Call) and len(t.args) == 1 and _walk_prefix(t.args[0]) and _fn_name(t.func)):
            _fail(e, "not a sum of prefix costs")
        name = t.func.text
        sig = costs.get(name)
        role = _role(name, sig)
        if role == "waiting":
            waiting = name
        elif role == "handling":
            handling = name
        elif travel is None:
            travel = name
        else:
            _fail(e, "a sum with two travel cost functions")
    if travel is None:
        _fail(e, "missing a travel cost")
    return Arrival(travel, waiting, handling)


def _role(name: str, sig) -> str:
    if sig is not None:
        if isinstance(sig.temporal, TagValue) and sig.temporal.word == "waiting":
            return "waiting"
        return "handling" if sig.domain == "V" else "travel"
    return {"w": "waiting", "h": "handling"}.get(name, "travel")


def _is_arrival(e) -> bool:
    return any(_walk_prefix(x) for x in walk_tree(e))


def _window(chain: Chain, costs) -> TimeWindow:
    ops, xs = chain.ops, chain.operands
    if any(op not in ("≤", "<") for op in ops):
        _fail(chain, "not a time window")
    if len(xs) == 3 and _is_arrival(xs[1]):
        return TimeWindow(_arrival(xs[1], costs), xs[0], xs[2])
    if len(xs) == 2 and _is_arrival(xs[0]):
        return TimeWindow(_arrival(xs[0], costs), None, xs[1])
    if len(xs) == 2 and _is_arrival(xs[1]):
        return TimeWindow(_arrival(xs[1], costs), xs[0], None)
    _fail(chain, "not a time window")


def _purchase(e: Forall):
    body = e.body
    if isinstance(body, Chain) and len(body.ops) == 1 and body.ops[0] in ("≥", ">"):
        left = body.operands[0]
        if isinstance(left, Call) and head_name(getattr(left.func, "base", None)) == "share":
            return PurchaseDemand("demand", body.operands[1])
    if isinstance(body, Forall) and isinstance(body.body, Chain) and body.body.ops == ("≤",):
        left, right = body.body.operands
        if isinstance(left, Call) and head_name(getattr(left.func, "base", None)) == "share":
            if isinstance(right, Call) and isinstance(right.func, Sub):
                return PurchaseDemand("availability", Name(head_name(right.func.base)))
    return None


def classify_objective(e, costs: dict | None = None):
    """Map one ε entry onto the closed set of objective statements."""
    costs = costs or {}
    if isinstance(e, BigOp) and e.op in ("min", "max") and e.sub is None:
        inner = e.body
        if isinstance(inner, BigOp) and inner.sub is None and inner.op in ("min", "max") and inner.op != e.op:
            fn = _edge_fold(inner.body)
            if fn:
                return MinMaxEdge(fn) if e.op == "min" else MaxMinEdge(fn)
        term = _term(inner, costs)
        return Minimize(term) if e.op == "min" else Maximize(term)
    if isinstance(e, BigOp) and e.op == "min" and e.sub is not None:
        return Minimize(_term(e, costs))
    if isinstance(e, Forall):
        found = _purchase(e)
        if found is not None:
            return found
        if isinstance(e.body, Chain):
            return _window(e.body, costs)
        _fail(e)
    if isinstance(e, Chain) and len(e.ops) == 1 and e.ops[0] in ("≤", "<", "≥", ">"):
        left, right = e.operands
        op = e.ops[0]
        try:
            term = _term(left, costs)
        except UnsupportedObjectiveError:
            term = _term(right, costs)
            left, right = right, left
            op = {"≤": "≥", "<": ">", "≥": "≤", ">": "<"}[op]
        if op in ("≤", "<"):
            return UpperBound(term, right, op == "<")
        return LowerBound(term, right, op == ">")
    _fail(e)


# ---------------------------------------------------------- well-formedness

_BUILTIN_FUNCS = {"r", "d", "share", "O", "Θ", "log"}
_BUILTIN_NAMES = {
    "S", "V", "E", "T", "e", "v", "i", "j", "k", "n", "m", "b", "d", "r", "L", "Z", "ε", "cap",
    "quota", "∞", "E_S", "V_S", "S_V", "S_E", "t",
}
_ARITY = {"grid": (2, 2), "tree": (0, 1), "costzone": (1, 1), "poszone": (1, 1)}


def _symbols(e, funcs: set, names: set):
    if isinstance(e, Call):
        f = e.func
        if isinstance(f, Compl):
            f = f.base
        if isinstance(f, Sub):
            f = f.base
        if isinstance(f, Name):
            funcs.add(f.text)
        for a in e.args:
            _symbols(a, funcs, names)
        return
    if isinstance(e, Sub):
        if isinstance(e.base, Name):
            names.add(e.base.text)
        else:
            _symbols(e.base, funcs, names)
        return
    if isinstance(e, Name):
        names.add(e.text)
        return
    if isinstance(e, (BigOp,)):
        _symbols(e.body, funcs, names)
        return
    if isinstance(e, Forall):
        _symbols(e.body, funcs, names)
        return
    if isinstance(e, SetBuilder):
        _symbols(e.element, funcs, names)
        return
    for c in (getattr(e, "items", None) or getattr(e, "operands", None) or ()):
        _symbols(c, funcs, names)
    for attr in ("left", "right", "operand", "inner"):
        if hasattr(e, attr):
            _symbols(getattr(e, attr), funcs, names)


def check_wellformed(rv: ResolvedVariant, ast: VariantAst | None = None) -> list[Diagnostic]:
    """Unhoused symbols, wrong arities and inconsistent combinations."""
    out: list[Diagnostic] = []
    cost_names = {c.name for c in rv.costs}
    if ast is not None:
        for obj in ast.field("epsilon").items:
            funcs: set[str] = set()
            names: set[str] = set()
            _symbols(obj, funcs, names)
            for f in sorted(funcs - cost_names - _BUILTIN_FUNCS):
                out.append(Diagnostic("error", "unhoused-symbol",
                                      f"{f} is used in an objective but has no cost signature",
                                      getattr(obj, "span", None)))
            for n in sorted(names - cost_names - _BUILTIN_NAMES - _BUILTIN_FUNCS):
                if n not in ("min", "max", "Σ", "log", "O"):
                    out.append(Diagnostic("error", "unhoused-symbol",
                                          f"{n} is used in an objective but is not declared",
                                          getattr(obj, "span", None)))
    tags = []
    for name in ("graphtype", "group", "cluster", "covering"):
        tags.append((name, rv.attribute(name)))
    for c in rv.costs:
        for p in c.properties:
            tags.append((f"property of {c.name}", p))
        tags.append((f"temporal of {c.name}", c.temporal))
    for where, value in tags:
        for v in (value.options if isinstance(value, Choice) else (value,)):
            if isinstance(v, TagValue) and v.word in _ARITY:
                lo, hi = _ARITY[v.word]
                if not lo <= len(v.params) <= hi:
                    out.append(Diagnostic("error", "arity",
                                          f"{v.word} in {where} takes {lo}..{hi} parameters, got {len(v.params)}"))
    cl = rv.cluster
    if isinstance(cl, TagValue):
        for p in cl.param_words():
            if p not in ("ordered", "start", "startend", "terminals"):
                out.append(Diagnostic("error", "cluster-parameter", f"unknown cluster parameter {p!r}"))
    for c in rv.costs:
        if c.domain not in ("E", "V"):
            out.append(Diagnostic("warning", "domain", f"{c.name} has domain {c.domain}; E or V expected"))
    return out


# ------------------------------------------------------- notation change


def _named(name: str, value_alts: tuple, span=None) -> Attribute:
    return Attribute(name, value_alts, span)


def _to_longhand_attr(kind: str, attr: Attribute, registry) -> Attribute | None:
    if attr.name is not None:
        return attr
    alt = attr.alternatives[0]
    cands = registry.candidates(kind, alt.relation, alt.expr)
    if len(cands) != 1:
        raise ResolutionError(f"cannot name {render_attribute(attr)!r}", tuple(d.name for d in cands))
    defn = cands[0]
    if defn.kind == "bool":
        return _named(defn.name, (Alternative("=", Name("True")),), attr.span)
    if alt.relation is not None:
        return _named(defn.name, attr.alternatives, attr.span)
    expr = alt.expr
    if isinstance(expr, RelPrefix):
        return _named(defn.name, (Alternative(expr.op, expr.operand),), attr.span)
    return _named(defn.name, (Alternative("=", expr),), attr.span)


def _to_shorthand_attr(kind: str, attr: Attribute, registry) -> Attribute | None:
    if attr.name is None:
        return attr
    name = attr.name
    if name == "visits" and all(isinstance(a.expr, Num) for a in attr.alternatives):
        name = "traversals"
    alts = attr.alternatives
    if len(alts) != 1 or isinstance(alts[0].expr, Wildcard):
        return Attribute(name, alts, attr.span)
    alt = alts[0]
    if kind == "gamma" and name in BOOLEAN_ALIASES and name not in registry:
        if isinstance(alt.expr, Name) and alt.expr.text == "True":
            return Attribute(None, (Alternative(None, Name(name)),), attr.span)
        return None
    defn = registry.get(name) if name in registry else None
    if defn is None:
        return attr
    if defn.kind == "bool":
        if isinstance(alt.expr, Name) and alt.expr.text == "True":
            return Attribute(None, (Alternative(None, Name(name)),), attr.span)
        if isinstance(alt.expr, Name) and alt.expr.text == "False":
            return None
        return attr
    if defn.kind == "spec":
        bare = Alternative(alt.relation, alt.expr)
    elif alt.relation == "=":
        bare = Alternative(None, alt.expr)
    else:
        bare = Alternative(alt.relation, alt.expr)
    cands = registry.candidates(kind, bare.relation, bare.expr)
    if [d.name for d in cands] == [name]:
        return Attribute(None, (bare,), attr.span)
    return Attribute(name, alts, attr.span)


def convert_notation(ast: VariantAst, target: str, registry: AttributeRegistry = REGISTRY) -> VariantAst:
    """Rewrite α, β and γ entries for the other notation; δ and ε stay as they are."""
    if target == ast.notation:
        return ast
    fields = []
    for f in ast.fields:
        if f.kind in ("delta", "epsilon"):
            fields.append(f)
            continue
        items = []
        if target == "longhand":
            for a in f.items:
                items.append(_to_longhand_attr(f.kind, a, registry))
            if f.kind == "gamma":
                present = {a.name for a in items}
                for b in ("start", "end", "circuit"):
                    if b not in present:
                        items.append(Attribute(b, (Alternative("=", Name("False")),)))
                order = {"start": 0, "end": 1, "circuit": 2}
                items.sort(key=lambda a: order.get(a.name, 3))
        else:
            dropped = []
            for a in f.items:
                new = _to_shorthand_attr(f.kind, a, registry)
                if new is None:
                    dropped.append(a)
                else:
                    items.append(new)
            if not items:
                if not dropped:
                    raise T3coError(f"field {f.kind} is empty and has no shorthand form")
                items.append(dropped[0])
        fields.append(Field(f.kind, tuple(items), f.span))
    return replace(ast, notation=target, fields=tuple(fields))


# ------------------------------------------------------------------ explain


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "True" if v else "False"
    return str(v)


def _fmt_stmt(s) -> str:
    def term(t: LinearTerm) -> str:
        out = []
        for coef, atom in t.parts:
            txt = _fmt_atom(atom)
            out.append(txt if coef == 1 else f"{coef}·{txt}")
        return " + ".join(out)

    if isinstance(s, Minimize):
        return f"Minimize({term(s.term)})"
    if isinstance(s, Maximize):
        return f"Maximize({term(s.term)})"
    if isinstance(s, UpperBound):
        return f"UpperBound({term(s.term)} ≤ {render_expr(s.bound)})"
    if isinstance(s, LowerBound):
        return f"LowerBound({term(s.term)} ≥ {render_expr(s.bound)})"
    if isinstance(s, (MinMaxEdge, MaxMinEdge)):
        return f"{type(s).__name__}({s.fn})"
    if isinstance(s, TimeWindow):
        rel = render_expr(s.release) if s.release is not None else "-"
        dl = render_expr(s.deadline) if s.deadline is not None else "-"
        a = s.arrival
        return (f"TimeWindow(release={rel}, deadline={dl}, travel={a.travel}, "
                f"waiting={a.waiting or '-'}, handling={a.handling or '-'})")
    if isinstance(s, PurchaseDemand):
        return f"PurchaseDemand({s.kind}, {render_expr(s.bound)})"
    return repr(s)


def _fmt_atom(a) -> str:
    if isinstance(a, TotalCost):
        return f"TotalCost({a.fn})"
    if isinstance(a, ComplementCost):
        return f"ComplementCost({a.fn})"
    if isinstance(a, CardinalityVisited):
        return "CardinalityVisited"
    if isinstance(a, PriceShareSum):
        return f"PriceShareSum({a.price})"
    if isinstance(a, MaxLateness):
        return f"MaxLateness({a.arrival.travel}, {render_expr(a.deadline)})"
    if isinstance(a, WildcardTerm):
        return "*"
    return repr(a)


def explain(rv: ResolvedVariant) -> str:
    """Readable dump of every attribute, cost signature and objective."""
    lines = []
    for kind, greek in zip(FIELDS[:3], "αβγ"):
        lines.append(f"{greek}:")
        for d in REGISTRY.in_field(kind):
            v = rv.attribute(d.name)
            note = "  (default)" if d.name in rv.defaulted else ""
            lines.append(f"  {d.name:12} {_fmt(v):24} {d.doc}{note}")
    lines.append("δ:")
    for c in rv.costs:
        fam = " (indexed family)" if c.indexed else ""
        lines.append(f"  {c.name}: {c.domain} ↦ {c.range}{fam}")
        if c.properties:
            lines.append("    property  " + ", ".join(str(p) for p in c.properties))
        if c.partial not in (False, None):
            lines.append(f"    partial   {_fmt(c.partial)}")
        if c.temporal is not None:
            lines.append(f"    temporal  {_fmt(c.temporal)}")
    lines.append("ε:")
    for s in rv.objectives:
        lines.append("  " + _fmt_stmt(s))
    if rv.extension is not None:
        lines.append(f"extension ⊕{rv.extension} (not checked)")
        for tag, note in rv.annotations:
            lines.append(f"  ⊕{tag}: {note}")
    return "\n".join(lines)
