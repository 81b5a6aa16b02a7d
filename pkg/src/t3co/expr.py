"""Value-expression tree used inside attributes, cost signatures and objectives.

Every node carries a :class:`SourceSpan` that is excluded from equality, so two
trees compare equal when they have the same structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SourceSpan:
    start: int  # byte offset
    end: int
    line: int
    col: int


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Num:
    text: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Name:
    text: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Wildcard:
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Dots:
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Compl:
    """Complement of a cost function, written with an overbar."""

    base: object
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Sub:
    base: object
    index: object
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Sup:
    base: object
    index: object
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Call:
    func: object
    args: tuple
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Group:
    """Parenthesised, possibly comma separated, list of expressions."""

    items: tuple
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class SetLit:
    items: tuple
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class SetBuilder:
    element: object
    condition: object
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Card:
    inner: object
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Neg:
    operand: object
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class RelPrefix:
    """A relation with only a right operand, as in ``≥ once`` or ``S_{<i}``."""

    op: str
    operand: object
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Chain:
    operands: tuple
    ops: tuple
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Juxt:
    items: tuple
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class BigOp:
    """``min``, ``max`` or ``Σ`` applied to a body, with optional scripts."""

    op: str
    sub: object
    sup: object
    body: object
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Forall:
    var: object
    domain: object
    body: object
    colon: bool = True
    span: SourceSpan | None = _span()


def tight(expr) -> bool:
    """Whether a leading relation is written without a space before ``expr``."""
    return isinstance(expr, Num) or (isinstance(expr, Name) and len(expr.text) == 1)


def rel_text(op: str, expr) -> str:
    return op + ("" if tight(expr) else " ") + render_expr(expr)


def _script(mark: str, idx) -> str:
    if isinstance(idx, (Name, Num)):
        return mark + render_expr(idx)
    return mark + "{" + render_expr(idx) + "}"


def render_expr(e) -> str:
    if isinstance(e, (Num, Name)):
        return e.text
    if isinstance(e, Wildcard):
        return "*"
    if isinstance(e, Dots):
        return "…"
    if isinstance(e, Compl):
        return render_expr(e.base) + "̄"
    if isinstance(e, Sub):
        return render_expr(e.base) + _script("_", e.index)
    if isinstance(e, Sup):
        return render_expr(e.base) + _script("^", e.index)
    if isinstance(e, Call):
        return render_expr(e.func) + "(" + ", ".join(render_expr(a) for a in e.args) + ")"
    if isinstance(e, Group):
        return "(" + ", ".join(render_expr(a) for a in e.items) + ")"
    if isinstance(e, SetLit):
        return "{" + ", ".join(render_expr(a) for a in e.items) + "}"
    if isinstance(e, SetBuilder):
        return "{" + render_expr(e.element) + " : " + render_expr(e.condition) + "}"
    if isinstance(e, Card):
        return "|" + render_expr(e.inner) + "|"
    if isinstance(e, BinOp):
        return f"{render_expr(e.left)} {e.op} {render_expr(e.right)}"
    if isinstance(e, Neg):
        return "−" + render_expr(e.operand)
    if isinstance(e, RelPrefix):
        return rel_text(e.op, e.operand)
    if isinstance(e, Chain):
        out = render_expr(e.operands[0])
        for op, rhs in zip(e.ops, e.operands[1:]):
            out += f" {op} {render_expr(rhs)}"
        return out
    if isinstance(e, Juxt):
        return " ".join(render_expr(i) for i in e.items)
    if isinstance(e, BigOp):
        head = e.op
        if e.sub is not None:
            head += _script("_", e.sub)
        if e.sup is not None:
            head += _script("^", e.sup)
        return head + " " + render_expr(e.body)
    if isinstance(e, Forall):
        sep = ": " if e.colon else " "
        return f"∀ {render_expr(e.var)} ∈ {render_expr(e.domain)}{sep}{render_expr(e.body)}"
    raise TypeError(f"not an expression node: {e!r}")


def children(e):
    """Direct sub-expressions, for generic traversals."""
    if isinstance(e, (Compl,)):
        return (e.base,)
    if isinstance(e, (Sub, Sup)):
        return (e.base, e.index)
    if isinstance(e, Call):
        return (e.func, *e.args)
    if isinstance(e, (Group, SetLit, Juxt)):
        return e.items
    if isinstance(e, SetBuilder):
        return (e.element, e.condition)
    if isinstance(e, Card):
        return (e.inner,)
    if isinstance(e, BinOp):
        return (e.left, e.right)
    if isinstance(e, (Neg, RelPrefix)):
        return (e.operand,)
    if isinstance(e, Chain):
        return e.operands
    if isinstance(e, BigOp):
        return tuple(x for x in (e.sub, e.sup, e.body) if x is not None)
    if isinstance(e, Forall):
        return (e.var, e.domain, e.body)
    return ()


def walk_tree(e):
    yield e
    for c in children(e):
        yield from walk_tree(c)


def head_name(e) -> str | None:
    """Name at the head of a value such as ``partition(once)`` or ``tree``."""
    if isinstance(e, Name):
        return e.text
    if isinstance(e, Call):
        return head_name(e.func)
    if isinstance(e, Juxt) and all(isinstance(i, Name) for i in e.items):
        return " ".join(i.text for i in e.items)
    if isinstance(e, Juxt) and isinstance(e.items[0], Name):
        return e.items[0].text
    return None
