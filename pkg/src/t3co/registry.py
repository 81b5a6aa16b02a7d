"""Known attributes of each field and how unnamed shorthand values map to them."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import RegistryError
from .expr import Group, Name, Num, RelPrefix, Sub, head_name

FIELDS = ("alpha", "beta", "gamma", "delta", "epsilon")

FIELD_LABELS = {
    "alpha": ("α", "alpha", "traveler"),
    "beta": ("β", "beta", "target"),
    "gamma": ("γ", "gamma", "tour"),
    "delta": ("δ", "delta", "costs"),
    "epsilon": ("ε", "epsilon", "objective"),
}

PROPERTY_PARAMS = ("identity", "triangle", "symmetric")
PROPERTY_WORDS = (
    "metric", "graphic", "planar", "subset planar", "euclidean", "euclid",
    "euclidean fixed dim", "euclidean plane", "grid", "shoreline",
)
TEMPORAL_WORDS = ("time", "position", "costzone", "poszone", "waiting", "kinetic")
GRAPHTYPE_WORDS = ("complete", "strongly connected", "planar", "path", "cycle", "binary tree", "tree")
EDGETYPE_WORDS = ("undirected", "directed", "bidirected")


def is_param_word(word: str | None) -> bool:
    return word is not None and (word in PROPERTY_PARAMS or word.endswith("-triangle"))


@dataclass(frozen=True)
class AttributeDef:
    """One attribute: its field, value kind, recognised value heads and default."""

    name: str
    field: str
    kind: str  # "spec", "bool" or "tag"
    words: tuple = ()
    default: object = None
    doc: str = ""
    matcher: object = field(default=None, compare=False)

    def matches(self, relation, expr) -> bool:
        if self.matcher is not None:
            return self.matcher(relation, expr)
        if self.kind == "bool":
            return relation is None and isinstance(expr, Name) and expr.text == self.name
        return head_name(expr) in self.words


def _count_match(relation, expr):
    return relation is not None


def _visits_words(expr):
    if isinstance(expr, RelPrefix):
        expr = expr.operand
    return head_name(expr) in ("always", "once")


def _visits_match(relation, expr):
    return _visits_words(expr)


def _group_head(expr):
    h = head_name(expr)
    return h is not None and (h in ("partition", "cover") or h.endswith("-partition") or h.endswith("-cover"))


def _traversals_match(relation, expr):
    if _visits_words(expr) or _group_head(expr) or head_name(expr) in ("all", "subset"):
        return False
    if relation is not None:
        return True
    return isinstance(expr, (Num, Sub))


def _property_match(relation, expr):
    if relation is not None:
        return False
    if isinstance(expr, Group):
        return all(is_param_word(head_name(i)) for i in expr.items)
    h = head_name(expr)
    return h in PROPERTY_WORDS or is_param_word(h)


class AttributeRegistry:
    def __init__(self):
        self._defs: dict[str, AttributeDef] = {}

    def register(self, defn: AttributeDef) -> None:
        if defn.field not in FIELDS[:4]:
            raise RegistryError(f"attribute {defn.name} names an unknown field {defn.field}")
        if defn.name in self._defs:
            raise RegistryError(f"attribute {defn.name} is already registered")
        for other in self.in_field(defn.field):
            shared = set(defn.words) & set(other.words)
            if shared:
                raise RegistryError(
                    f"value forms {sorted(shared)} of {defn.name} collide with {other.name}"
                )
        self._defs[defn.name] = defn

    def get(self, name: str) -> AttributeDef:
        try:
            return self._defs[name]
        except KeyError:
            raise RegistryError(f"unknown attribute {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._defs

    def names(self) -> tuple[str, ...]:
        return tuple(self._defs)

    def in_field(self, fld: str) -> list[AttributeDef]:
        return [d for d in self._defs.values() if d.field == fld]

    def candidates(self, fld: str, relation, expr) -> list[AttributeDef]:
        return [d for d in self.in_field(fld) if d.matches(relation, expr)]


def default_registry() -> AttributeRegistry:
    reg = AttributeRegistry()
    for d in (
        AttributeDef("count", "alpha", "spec", default=None, matcher=_count_match,
                     doc="number of travelers"),
        AttributeDef("traversals", "beta", "spec", matcher=_traversals_match,
                     doc="how often each node is passed through"),
        AttributeDef("visits", "beta", "tag", words=("always", "once"), matcher=_visits_match,
                     doc="how often each passed node is visited"),
        AttributeDef("group", "beta", "tag", words=("partition", "cover"),
                     matcher=lambda r, e: r is None and _group_head(e),
                     doc="node groups that must be visited"),
        AttributeDef("covering", "beta", "tag", words=("all", "subset"),
                     doc="nodes that must lie near the walk"),
        AttributeDef("start", "gamma", "bool", default=False, doc="walk starts at a fixed node"),
        AttributeDef("end", "gamma", "bool", default=False, doc="walk ends at a fixed node"),
        AttributeDef("circuit", "gamma", "bool", default=False, doc="walk is closed"),
        AttributeDef("graphtype", "gamma", "tag", words=GRAPHTYPE_WORDS, default="arbitrary",
                     doc="structure of the input graph"),
        AttributeDef("edgetype", "gamma", "tag", words=EDGETYPE_WORDS, doc="edge orientation"),
        AttributeDef("precedences", "gamma", "tag", words=("atomic", "arbitrary"),
                     doc="ordering constraints between visits"),
        AttributeDef("cluster", "gamma", "tag", words=("partition", "cover"),
                     matcher=lambda r, e: r is None and head_name(e) in ("partition", "cover"),
                     doc="clusters visited contiguously"),
        AttributeDef("property", "delta", "tag", words=PROPERTY_WORDS, matcher=_property_match,
                     doc="structural promise on a cost function"),
        AttributeDef("partial", "delta", "bool", default=False, doc="goods may be bought in parts"),
        AttributeDef("temporal", "delta", "tag", words=TEMPORAL_WORDS, doc="time behaviour"),
    ):
        reg.register(d)
    return reg


REGISTRY = default_registry()

# Words that longhand may write as ``word = True`` on behalf of another attribute.
BOOLEAN_ALIASES = {w: "graphtype" for w in GRAPHTYPE_WORDS if " " not in w}
BOOLEAN_ALIASES.update({w: "edgetype" for w in EDGETYPE_WORDS})

ATTRIBUTE_NAMES = frozenset(REGISTRY.names())

