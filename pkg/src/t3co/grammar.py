"""Lexer, parser, renderer and linter for variant definitions.

Both notations are accepted. Longhand labels every field and ends every
attribute with ``;``; shorthand separates the five fields with ``∣`` and
separates attributes with ``;`` without a trailing one. ASCII spellings such
as ``<``, ``|``, ``->`` and ``R>=0`` are read as their Unicode forms, and the
canonical rendering always uses Unicode.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field

from .errors import MissingFieldError, MixedNotationError, T3coSyntaxError
from .expr import (
    BigOp, BinOp, Call, Card, Chain, Compl, Dots, Forall, Group, Juxt, Name, Neg, Num,
    RelPrefix, SetBuilder, SetLit, SourceSpan, Sub, Sup, Wildcard, render_expr, rel_text, walk_tree,
)
from .registry import ATTRIBUTE_NAMES, BOOLEAN_ALIASES, FIELD_LABELS, FIELDS, REGISTRY

GREEK = {"alpha": "α", "beta": "β", "gamma": "γ", "delta": "δ", "epsilon": "ε"}
ALL_LABELS = {label: kind for kind, labels in FIELD_LABELS.items() for label in labels}
_NAMED_HEADS = ATTRIBUTE_NAMES | frozenset(BOOLEAN_ALIASES)

# --------------------------------------------------------------------- AST


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Alternative:
    relation: str | None
    expr: object


@dataclass(frozen=True)
class Attribute:
    """``name`` is None for an unnamed shorthand value."""

    name: str | None
    alternatives: tuple
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class CostSignature:
    name: object
    domain: object
    range: object
    attributes: tuple = ()
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Field:
    kind: str
    items: tuple
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Extension:
    tag: str
    annotations: tuple = ()
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class VariantAst:
    notation: str
    fields: tuple
    extension: Extension | None = None
    span: SourceSpan | None = _span()

    def field(self, kind: str) -> Field:
        return self.fields[FIELDS.index(kind)]


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error", "warning" or "info"
    code: str
    message: str
    span: SourceSpan | None = None

    def __str__(self):
        where = f"{self.span.line}:{self.span.col}: " if self.span else ""
        return f"{where}{self.severity}: {self.message} [{self.code}]"


# ------------------------------------------------------------------- lexer


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int


_SINGLE = {
    "⟨": "LANGLE", "⟩": "RANGLE", "∣": "SEP", "|": "BAR", ";": "SEMI", ",": "COMMA",
    ":": "COLON", "↦": "MAPSTO", "→": "MAPSTO", "(": "LPAREN", ")": "RPAREN", "{": "LBRACE",
    "}": "RBRACE", "_": "UNDER", "^": "CARET", "~": "TILDE", "̄": "MACRON", "…": "DOTS",
    "∀": "FORALL", "*": "STAR",
}
_RELS = {"≤": "≤", "≥": "≥", "=": "=", "<": "<", ">": ">", "∈": "∈", "≠": "≠"}
_OPS = {"+": "+", "−": "−", "-": "−", "·": "·", "/": "/", "×": "×", "⋅": "·", "∪": "∪"}
_WORDS = {"min": ("BIGOP", "min"), "max": ("BIGOP", "max"), "sum": ("BIGOP", "Σ"),
          "Σ": ("BIGOP", "Σ"), "forall": ("FORALL", "∀"), "in": ("REL", "∈"),
          "or": ("OR", "or"), "inf": ("NAME", "∞")}
_RANGE_BASE = {"ℝ": "ℝ", "ℤ": "ℤ", "ℕ": "ℕ", "R": "ℝ", "Z": "ℤ", "N": "ℕ"}
_RANGE_SUFFIX = re.compile(r"(≥|>=|>|≤|<=|<)(\d+)")
_CLOSE_ASCII = re.compile(r"[ \t]*(\^|\(\+|⊕|\r?\n|$)")
_ASCII_REL = {">=": "≥", "<=": "≤", ">": ">", "<": "<"}


def _blank_comments(text: str) -> str:
    """Replace ``#`` comment lines with spaces so offsets stay valid."""
    return re.sub(r"(?m)^[ \t]*#[^\n]*", lambda m: " " * len(m.group(0)), text)


def tokenize(text: str):
    """Tokens up to and including the closing bracket, plus the offset after it."""
    toks: list[Token] = []
    i, n = 0, len(text)
    first = True
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if first and ch == "<":
            toks.append(Token("LANGLE", "⟨", i, i + 1))
            i += 1
            first = False
            continue
        first = False
        if text.startswith("...", i):
            toks.append(Token("DOTS", "…", i, i + 3))
            i += 3
            continue
        if text.startswith("->", i):
            toks.append(Token("MAPSTO", "↦", i, i + 2))
            i += 2
            continue
        if ch in "<>":
            two = text[i:i + 2]
            if two in (">=", "<="):
                toks.append(Token("REL", _ASCII_REL[two], i, i + 2))
                i += 2
                continue
            if ch == ">" and _CLOSE_ASCII.match(text, i + 1) and toks and toks[0].kind == "LANGLE":
                toks.append(Token("RANGLE", "⟩", i, i + 1))
                return toks, i + 1
            toks.append(Token("REL", ch, i, i + 1))
            i += 1
            continue
        if ch in _SINGLE:
            kind = _SINGLE[ch]
            toks.append(Token(kind, ch, i, i + 1))
            i += 1
            if kind == "RANGLE":
                return toks, i
            continue
        if ch in _RELS:
            toks.append(Token("REL", _RELS[ch], i, i + 1))
            i += 1
            continue
        if ch in _OPS:
            toks.append(Token("OP", _OPS[ch], i, i + 1))
            i += 1
            continue
        if ch == "∑":
            toks.append(Token("BIGOP", "Σ", i, i + 1))
            i += 1
            continue
        if ch.isdigit():
            m = re.compile(r"\d+(\.\d+)?").match(text, i)
            toks.append(Token("NUM", m.group(0), i, m.end()))
            i = m.end()
            continue
        if ch.isalpha() or ch == "∞":
            j = i + 1
            while j < n:
                c = text[j]
                if c.isalnum() and c != "_":
                    j += 1
                elif c == "-" and j + 1 < n and text[j + 1].isalpha():
                    j += 2
                else:
                    break
            word = text[i:j]
            if word in _RANGE_BASE:
                m = _RANGE_SUFFIX.match(text, j)
                if m:
                    rel = {">=": "≥", "<=": "≤"}.get(m.group(1), m.group(1))
                    toks.append(Token("NAME", _RANGE_BASE[word] + rel + m.group(2), i, m.end()))
                    i = m.end()
                    continue
            kind, canon = _WORDS.get(word, ("NAME", word))
            toks.append(Token(kind, canon, i, j))
            i = j
            continue
        raise T3coSyntaxError(f"unexpected character {ch!r}", _bare_span(text, i))
    return toks, n


def _bare_span(text: str, i: int) -> SourceSpan:
    line = text.count("\n", 0, i) + 1
    col = i - (text.rfind("\n", 0, i) + 1) + 1
    b = len(text[:i].encode("utf-8"))
    return SourceSpan(b, b + 1, line, col)


# ------------------------------------------------------------------ parser


class _Parser:
    def __init__(self, text: str, toks: list[Token]):
        self.text = text
        self.toks = toks
        self.pos = 0
        self.eof = Token("EOF", "", len(text), len(text))
        self._bytes = [0]
        for c in text:
            self._bytes.append(self._bytes[-1] + len(c.encode("utf-8")))
        self._lines = [0] + [m.end() for m in re.finditer("\n", text)]

    # -- helpers

    def peek(self, k: int = 0) -> Token:
        j = self.pos + k
        return self.toks[j] if j < len(self.toks) else self.eof

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def span_at(self, start: int, end: int) -> SourceSpan:
        line = bisect.bisect_right(self._lines, start)
        col = start - self._lines[line - 1] + 1
        return SourceSpan(self._bytes[start], self._bytes[end], line, col)

    def span_from(self, tok_index: int) -> SourceSpan:
        start = self.toks[tok_index].start if tok_index < len(self.toks) else len(self.text)
        end_tok = self.toks[self.pos - 1] if self.pos > 0 else self.eof
        return self.span_at(start, max(start, end_tok.end))

    def error(self, message, expected=(), cls=T3coSyntaxError, tok=None):
        tok = tok or self.peek()
        desc = repr(tok.text) if tok.kind != "EOF" else "end of input"
        raise cls(f"{message}, found {desc}", self.span_at(tok.start, tok.end), frozenset(expected))

    def expect(self, kind: str, expected: str):
        if self.peek().kind != kind:
            self.error(f"expected {expected}", {expected})
        return self.next()

    def at_label(self) -> bool:
        tok = self.peek()
        return tok.kind == "NAME" and tok.text in ALL_LABELS and self.peek(1).kind == "COLON"

    # -- variant

    def variant(self, notation: str):
        start = self.pos
        self.expect("LANGLE", "⟨")
        looks_long = self.at_label()
        if notation == "longhand" and not looks_long:
            self.error("longhand definition must start with a field label", FIELD_LABELS["alpha"])
        if notation == "shorthand" and looks_long:
            self.error("field label in a shorthand definition", (), MixedNotationError)
        fields = self.longhand() if looks_long else self.shorthand()
        return fields, start, "longhand" if looks_long else "shorthand"

    def longhand(self) -> tuple[Field, ...]:
        fields = []
        for kind in FIELDS:
            tok = self.peek()
            labels = set(FIELD_LABELS[kind])
            if tok.kind == "RANGLE":
                self.error(f"missing field {GREEK[kind]}", labels, MissingFieldError)
            if tok.kind in ("SEP",) or (tok.kind == "BAR" and fields):
                self.error("field separator in a longhand definition", (), MixedNotationError)
            if not (self.at_label() and tok.text in labels):
                self.error(f"expected the {GREEK[kind]} field label", labels)
            fstart = self.pos
            self.next()
            self.next()
            items = []
            while not self.at_label() and self.peek().kind not in ("RANGLE", "EOF"):
                if self.peek().kind == "SEP":
                    self.error("field separator in a longhand definition", (), MixedNotationError)
                items.append(self.item(kind, long=True))
                tok = self.peek()
                if tok.kind == "SEMI":
                    self.next()
                elif tok.kind in ("SEP", "BAR"):
                    self.error("field separator in a longhand definition", (), MixedNotationError)
                else:
                    self.error("longhand attributes end with ';'", {";"})
            fields.append(Field(kind, tuple(items), self.span_from(fstart)))
        if self.at_label():
            self.error("unexpected field label", {"⟩"})
        self.expect("RANGLE", "⟩")
        return tuple(fields)

    def shorthand(self) -> tuple[Field, ...]:
        fields = []
        for idx, kind in enumerate(FIELDS):
            fstart = self.pos
            if self.peek().kind == "RANGLE" and idx > 0:
                self.error(f"missing field {GREEK[kind]}", {"∣"}, MissingFieldError)
            items = [self.item(kind, long=False)]
            while self.peek().kind == "SEMI":
                self.next()
                if self.peek().kind in ("SEP", "BAR", "RANGLE"):
                    self.error("shorthand fields must not end with ';'", {"attribute"})
                items.append(self.item(kind, long=False))
            fields.append(Field(kind, tuple(items), self.span_from(fstart)))
            tok = self.peek()
            if idx < len(FIELDS) - 1:
                if tok.kind in ("SEP", "BAR"):
                    self.next()
                elif tok.kind == "RANGLE":
                    self.error(f"missing field {GREEK[FIELDS[idx + 1]]}", {"∣"}, MissingFieldError)
                else:
                    self.error("unexpected token", {";", "∣"})
            elif tok.kind in ("SEP", "BAR"):
                self.error("a definition has exactly five fields", {"⟩"})
            elif tok.kind != "RANGLE":
                self.error("unexpected token", {";", "⟩"})
        self.expect("RANGLE", "⟩")
        return tuple(fields)

    def item(self, kind: str, long: bool):
        if not long and self.at_label():
            self.error("field label in a shorthand definition", (), MixedNotationError)
        if self.peek().kind in ("SEP", "RANGLE", "SEMI"):
            self.error("empty attribute", {"attribute"})
        if kind == "delta":
            return self.cost_signature()
        if kind == "epsilon":
            return self.expr()
        return self.attribute(long)

    def attribute(self, long: bool) -> Attribute:
        start = self.pos
        if long:
            tok = self.peek()
            if tok.kind != "NAME" or self.peek(1).kind != "REL":
                self.error("longhand attributes are written 'name relation value'", {"name"})
            self.next()
            alts = self.alternatives(need_relation=True)
            return Attribute(tok.text, alts, self.span_from(start))
        alts = self.alternatives(need_relation=False)
        return self._maybe_named(alts, start)

    def _maybe_named(self, alts, start) -> Attribute:
        first = alts[0]
        e = first.expr
        if (
            first.relation is None
            and isinstance(e, Chain)
            and len(e.ops) == 1
            and isinstance(e.operands[0], Name)
            and e.operands[0].text in _NAMED_HEADS
        ):
            head = Alternative(e.ops[0], e.operands[1])
            return Attribute(e.operands[0].text, (head,) + alts[1:], self.span_from(start))
        return Attribute(None, alts, self.span_from(start))

    def alternatives(self, need_relation: bool) -> tuple:
        alts = []
        while True:
            rel = None
            if self.peek().kind == "REL":
                rel = self.next().text
            elif need_relation:
                self.error("expected a relation", {"=", "≤", "≥", "<", ">", "∈"})
            alts.append(Alternative(rel, self.expr()))
            if self.peek().kind != "OR":
                return tuple(alts)
            self.next()

    def cost_signature(self) -> CostSignature:
        start = self.pos
        name = self.postfix()
        self.expect("COLON", ":")
        domain = self.additive()
        self.expect("MAPSTO", "↦")
        rng = self.additive()
        if isinstance(rng, Name) and rng.text in _RANGE_BASE:
            rng = Name(_RANGE_BASE[rng.text], rng.span)
        attrs = []
        while self.peek().kind == "COMMA":
            self.next()
            astart = self.pos
            attrs.append(self._maybe_named(self.alternatives(need_relation=False), astart))
        return CostSignature(name, domain, rng, tuple(attrs), self.span_from(start))

    # -- expressions

    def expr(self):
        start = self.pos
        first = self.additive()
        operands, ops = [first], []
        while self.peek().kind == "REL":
            ops.append(self.next().text)
            operands.append(self.additive())
        if not ops:
            return first
        return Chain(tuple(operands), tuple(ops), self.span_from(start))

    def additive(self):
        start = self.pos
        left = self.multiplicative()
        while self.peek().kind == "OP" and self.peek().text in ("+", "−", "∪"):
            op = self.next().text
            left = BinOp(op, left, self.multiplicative(), self.span_from(start))
        return left

    def multiplicative(self):
        start = self.pos
        left = self.unary()
        while (self.peek().kind == "OP" and self.peek().text in ("·", "/", "×")) or self.peek().kind == "STAR":
            op = self.next().text
            op = "·" if op == "*" else op
            left = BinOp(op, left, self.unary(), self.span_from(start))
        return left

    def unary(self):
        start = self.pos
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "−":
            self.next()
            return Neg(self.unary(), self.span_from(start))
        if tok.kind == "REL":
            self.next()
            return RelPrefix(tok.text, self.unary(), self.span_from(start))
        if tok.kind == "TILDE":
            self.next()
            return self._postfix_loop(Compl(self.primary(), self.span_from(start)), start)
        return self.juxt()

    def juxt(self):
        start = self.pos
        items = [self.postfix()]
        while self.peek().kind in ("NAME", "NUM", "LPAREN", "LBRACE"):
            if self.at_label():
                break
            items.append(self.postfix())
        if len(items) == 1:
            return items[0]
        return Juxt(tuple(items), self.span_from(start))

    def postfix(self):
        start = self.pos
        return self._postfix_loop(self.primary(), start)

    def _postfix_loop(self, e, start):
        while True:
            kind = self.peek().kind
            if kind == "LPAREN":
                self.next()
                args = []
                if self.peek().kind != "RPAREN":
                    args.append(self.expr())
                    while self.peek().kind == "COMMA":
                        self.next()
                        args.append(self.expr())
                self.expect("RPAREN", ")")
                e = Call(e, tuple(args), self.span_from(start))
            elif kind in ("UNDER", "CARET"):
                self.next()
                idx = self.script()
                cls = Sub if kind == "UNDER" else Sup
                e = cls(e, idx, self.span_from(start))
            elif kind == "MACRON":
                self.next()
                e = Compl(e, self.span_from(start))
            else:
                return e

    def script(self):
        start = self.pos
        tok = self.peek()
        if tok.kind == "LBRACE":
            self.next()
            idx = self.expr()
            self.expect("RBRACE", "}")
            return idx
        if tok.kind == "NAME":
            self.next()
            return Name(tok.text, self.span_from(start))
        if tok.kind == "NUM":
            self.next()
            return Num(tok.text, self.span_from(start))
        self.error("expected a subscript or superscript", {"{", "name", "number"})

    def primary(self):
        start = self.pos
        tok = self.peek()
        kind = tok.kind
        if kind == "NUM":
            self.next()
            return Num(tok.text, self.span_from(start))
        if kind == "NAME":
            self.next()
            return Name(tok.text, self.span_from(start))
        if kind == "STAR":
            self.next()
            return Wildcard(self.span_from(start))
        if kind == "DOTS":
            self.next()
            return Dots(self.span_from(start))
        if kind == "LPAREN":
            self.next()
            items = [self.expr()]
            while self.peek().kind == "COMMA":
                self.next()
                items.append(self.expr())
            self.expect("RPAREN", ")")
            return Group(tuple(items), self.span_from(start))
        if kind == "LBRACE":
            self.next()
            if self.peek().kind == "RBRACE":
                self.next()
                return SetLit((), self.span_from(start))
            first = self.expr()
            if self.peek().kind == "COLON":
                self.next()
                cond = self.expr()
                self.expect("RBRACE", "}")
                return SetBuilder(first, cond, self.span_from(start))
            items = [first]
            while self.peek().kind == "COMMA":
                self.next()
                items.append(self.expr())
            self.expect("RBRACE", "}")
            return SetLit(tuple(items), self.span_from(start))
        if kind == "BAR":
            self.next()
            inner = self.expr()
            self.expect("BAR", "|")
            return Card(inner, self.span_from(start))
        if kind == "BIGOP":
            self.next()
            sub = sup = None
            while self.peek().kind in ("UNDER", "CARET"):
                which = self.next().kind
                if which == "UNDER" and sub is None:
                    sub = self.script()
                elif which == "CARET" and sup is None:
                    sup = self.script()
                else:
                    self.error("repeated script on an operator")
            body = self.additive()
            return BigOp(tok.text, sub, sup, body, self.span_from(start))
        if kind == "FORALL":
            self.next()
            var = self.postfix()
            if not (self.peek().kind == "REL" and self.peek().text == "∈"):
                self.error("expected '∈' after the quantified variable", {"∈"})
            self.next()
            domain = self.postfix()
            colon = False
            if self.peek().kind == "COLON":
                self.next()
                colon = True
            body = self.expr()
            return Forall(var, domain, body, colon, self.span_from(start))
        self.error("expected an expression", {"expression"})


_EXT_HEAD = re.compile(r"[ \t]*\^?[ \t]*\{?[ \t]*(?:⊕|\(\+)[ \t]*(\d*)[ \t]*\)?[ \t]*\}?")
_EXT_NOTE = re.compile(r"(?:⊕|\(\+)[ \t]*(\d*)[ \t]*\)?[ \t]*:[ \t]*(.*\S)[ \t]*$")


def _extension(p: _Parser, text: str, offset: int) -> Extension | None:
    rest = text[offset:]
    m = _EXT_HEAD.match(rest)
    tag = None
    pos = 0
    if m and m.end() > 0 and ("⊕" in m.group(0) or "(+" in m.group(0)):
        tag = m.group(1)
        pos = m.end()
    notes = []
    line_start = offset + pos
    for line in rest[pos:].split("\n"):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            nm = _EXT_NOTE.match(stripped)
            if not nm or tag is None:
                col = line_start + len(line) - len(line.lstrip())
                raise T3coSyntaxError(
                    "unexpected text after the definition", p.span_at(col, col + len(stripped)),
                    frozenset({"⊕"}),
                )
            notes.append((nm.group(1), nm.group(2)))
        line_start += len(line) + 1
    if tag is None:
        return None
    return Extension(tag, tuple(notes), p.span_at(offset, len(text.rstrip())))


def parse(text: str, notation: str = "auto") -> VariantAst:
    """Parse one definition; ``notation`` is ``auto``, ``longhand`` or ``shorthand``."""
    if notation not in ("auto", "longhand", "shorthand"):
        raise ValueError(f"unknown notation {notation!r}")
    clean = _blank_comments(text)
    toks, rest = tokenize(clean)
    p = _Parser(clean, toks)
    if not toks:
        raise T3coSyntaxError("empty input", None, frozenset({"⟨"}))
    fields, start, found = p.variant(notation)
    if p.pos != len(toks):
        p.error("unexpected text after the definition")
    ext = _extension(p, clean, rest)
    return VariantAst(found, fields, ext, p.span_from(start))


def parse_file(path) -> VariantAst:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# ---------------------------------------------------------------- renderer


def render_attribute(a: Attribute) -> str:
    alts = []
    for alt in a.alternatives:
        if alt.relation is None:
            alts.append(render_expr(alt.expr))
        else:
            alts.append(rel_text(alt.relation, alt.expr))
    body = " or ".join(alts)
    return body if a.name is None else f"{a.name} {body}"


def render_cost(c: CostSignature) -> str:
    out = f"{render_expr(c.name)} : {render_expr(c.domain)} ↦ {render_expr(c.range)}"
    for a in c.attributes:
        out += ", " + render_attribute(a)
    return out


def render_item(kind: str, item) -> str:
    if kind == "delta":
        return render_cost(item)
    if kind == "epsilon":
        return render_expr(item)
    return render_attribute(item)


def render_extension(ext: Extension | None) -> str:
    if ext is None:
        return ""
    out = "^{⊕" + ext.tag + "}"
    for tag, note in ext.annotations:
        out += f"\n⊕{tag}: {note}"
    return out


def render(ast: VariantAst, notation: str | None = None) -> str:
    """Canonical text of ``ast``, converting notation when asked."""
    notation = notation or ast.notation
    if notation not in ("longhand", "shorthand"):
        raise ValueError(f"unknown notation {notation!r}")
    if notation != ast.notation:
        from .semantics import convert_notation

        ast = convert_notation(ast, notation)
    if notation == "shorthand":
        parts = ["; ".join(render_item(f.kind, i) for i in f.items) for f in ast.fields]
        body = "⟨ " + " ∣ ".join(parts) + " ⟩"
    else:
        chunks = []
        for f in ast.fields:
            chunk = GREEK[f.kind] + ":"
            for i in f.items:
                chunk += " " + render_item(f.kind, i) + ";"
            chunks.append(chunk)
        body = "⟨ " + " ".join(chunks) + " ⟩"
    return body + render_extension(ast.extension)


# -------------------------------------------------------------------- lint

_SET_NAMES = {"V", "E", "ℝ", "ℤ", "ℕ", "T"}


def lint(ast: VariantAst) -> list[Diagnostic]:
    """Warnings that do not prevent resolution."""
    out: list[Diagnostic] = []
    for f in ast.fields:
        if f.kind in ("alpha", "beta", "gamma"):
            out.extend(_duplicates(f.items, GREEK[f.kind], f.kind))
            for a in f.items:
                for alt in a.alternatives:
                    if alt.relation == "∈" and not _is_set(alt.expr):
                        out.append(Diagnostic("warning", "membership-without-set",
                                              f"'∈' is followed by {render_expr(alt.expr)!r}, not a set", a.span))
                if a.name == "visits" and any(isinstance(alt.expr, Num) for alt in a.alternatives):
                    out.append(Diagnostic("info", "visits-normalized",
                                          "a numeric visits value is read as the traversal count", a.span))
        elif f.kind == "delta":
            for c in f.items:
                out.extend(_duplicates(c.attributes, render_expr(c.name)))
    for node in _all_exprs(ast):
        if isinstance(node, Chain):
            for op, rhs in zip(node.ops, node.operands[1:]):
                if op == "∈" and not _is_set(rhs):
                    out.append(Diagnostic("warning", "membership-without-set",
                                          f"'∈' is followed by {render_expr(rhs)!r}, not a set", node.span))
    return out


def _implied_name(a: Attribute, kind: str | None) -> str | None:
    """The attribute an unnamed value would resolve to, when that is unique."""
    if a.name is not None or kind is None:
        return a.name
    alt = a.alternatives[0]
    found = REGISTRY.candidates(kind, alt.relation, alt.expr)
    return found[0].name if len(found) == 1 else None


def _duplicates(attrs, where: str, kind: str | None = None) -> list[Diagnostic]:
    out = []
    names: set[str] = set()
    texts: set[str] = set()
    for a in attrs:
        name = _implied_name(a, kind)
        text = render_attribute(a)
        if name is not None:
            if name in names:
                code = "duplicate-attribute" if a.name else "duplicate-value"
                out.append(Diagnostic("warning", code, f"attribute {name} is given twice in {where}", a.span))
            names.add(name)
        elif text in texts:
            out.append(Diagnostic("warning", "duplicate-value",
                                  f"value {text!r} appears twice in {where}", a.span))
        texts.add(text)
    return out


def _is_set(e) -> bool:
    if isinstance(e, (SetLit, SetBuilder)):
        return True
    if isinstance(e, Name):
        return e.text in _SET_NAMES or e.text[:1] in ("ℝ", "ℤ", "ℕ")
    if isinstance(e, Sub):
        return _is_set(e.base) or (isinstance(e.base, Name) and e.base.text in ("S", "E", "V"))
    return False


def _all_exprs(ast: VariantAst):
    for f in ast.fields:
        for item in f.items:
            roots = []
            if isinstance(item, Attribute):
                roots = [alt.expr for alt in item.alternatives]
            elif isinstance(item, CostSignature):
                roots = [item.name, item.domain, item.range]
                for a in item.attributes:
                    roots.extend(alt.expr for alt in a.alternatives)
            else:
                roots = [item]
            for r in roots:
                yield from walk_tree(r)
