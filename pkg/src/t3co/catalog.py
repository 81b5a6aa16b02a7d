"""The variant corpus: definition files plus bound and citation metadata.

The corpus lives in ``t3co/corpus`` as one ``.t3co`` file per entry and an
``index.t3x`` file holding the metadata. Setting ``T3CO_CORPUS_DIR`` points
the loader at another directory with the same layout.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import CatalogError, T3coError
from .grammar import parse, render
from .semantics import resolve, resolved_equal

FAMILIES = (
    "standard", "path", "bottleneck", "max-scatter", "generalized", "clustered", "purchaser",
    "profitable-tour", "quota", "prize-collecting", "orienteering", "time-dependent", "time-windows",
    "orienteering-tw",
)
STATUSES = ("confirmed", "unconfirmed", "unmarked")
INDEX = "index.t3x"

_SLUG = re.compile(r"^[a-z0-9]+(?:-[a-z0-9]+)*$")
_NOTE = re.compile(r"^⊕(\w+):\s*(.*)$")


@dataclass(frozen=True)
class Bound:
    kind: str  # "lower" or "upper"
    expr: str  # kept as text, never evaluated
    citation: str
    status: str = "unmarked"

    @property
    def confirmed(self) -> bool | None:
        return {"confirmed": True, "unconfirmed": False}.get(self.status)


@dataclass(frozen=True)
class Reference:
    citation: str
    status: str = "unmarked"


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    family: str
    definition_text: str
    notation: str
    bounds: tuple = ()
    references: tuple = ()
    extensions: tuple = ()  # (tag, text) pairs
    notes: tuple = ()
    pair: tuple | None = None  # (pair name, "equal" or "distinct")
    file: str = ""


@dataclass(frozen=True)
class CatalogDiagnostic:
    entry: str
    code: str
    message: str

    def __str__(self):
        return f"{self.entry}: {self.message} [{self.code}]"


def corpus_dir() -> Path:
    env = os.environ.get("T3CO_CORPUS_DIR")
    if env:
        return Path(env)
    return Path(str(resources.files("t3co") / "corpus"))


def _split(value: str, n: int, line: int) -> list[str]:
    parts = [p.strip() for p in value.split("|")]
    if len(parts) != n:
        raise CatalogError(f"index line {line}: expected {n} '|'-separated parts, got {len(parts)}")
    return parts


def _blocks(text: str):
    """Yield (id, line number, [(key, value, line)]) for each ENTRY block."""
    current = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("ENTRY "):
            if current:
                yield current
            current = (line[6:].strip(), no, [])
            continue
        if current is None or "=" not in line:
            raise CatalogError(f"index line {no}: unexpected {line!r}")
        key, value = line.split("=", 1)
        current[2].append((key.strip(), value.strip(), no))
    if current:
        yield current


def _notation(text: str) -> str:
    return "longhand" if re.match(r"^\s*⟨\s*α\s*:", text) else "shorthand"


def _extensions(text: str) -> tuple:
    out = []
    for line in text.splitlines()[1:]:
        m = _NOTE.match(line.strip())
        if m:
            out.append((m.group(1), m.group(2)))
    return tuple(out)


def _entry(id: str, fields: list, directory: Path) -> CatalogEntry:
    family = file = None
    bounds, refs, notes, pair = [], [], [], None
    for key, value, no in fields:
        if key == "family":
            family = value
        elif key == "file":
            file = value
        elif key == "bound":
            kind, expr, cite, status = _split(value, 4, no)
            bounds.append(Bound(kind, expr, cite, status))
        elif key == "reference":
            cite, status = _split(value, 2, no)
            refs.append(Reference(cite, status))
        elif key == "pair":
            pair = tuple(_split(value, 2, no))
        elif key == "note":
            notes.append(value)
        else:
            raise CatalogError(f"index line {no}: unknown key {key!r}")
    if family is None or file is None:
        raise CatalogError(f"entry {id!r} needs both family and file")
    try:
        text = (directory / file).read_text(encoding="utf-8").strip()
    except OSError as exc:
        raise CatalogError(f"entry {id!r}: cannot read {file}: {exc}") from exc
    return CatalogEntry(id, family, text, _notation(text), tuple(bounds), tuple(refs), _extensions(text),
                        tuple(notes), pair, file)


_CACHE: dict[Path, tuple[float, tuple]] = {}


def load(directory: str | Path | None = None) -> tuple[CatalogEntry, ...]:
    """Every entry of the corpus, sorted by id. Raises CatalogError on a broken index."""
    directory = Path(directory) if directory is not None else corpus_dir()
    index = directory / INDEX
    try:
        stamp = index.stat().st_mtime
        text = index.read_text(encoding="utf-8")
    except OSError as exc:
        raise CatalogError(f"cannot read corpus index {index}: {exc}") from exc
    hit = _CACHE.get(directory)
    if hit and hit[0] == stamp:
        return hit[1]
    entries, seen = [], set()
    for id, no, fields in _blocks(text):
        if id in seen:
            raise CatalogError(f"index line {no}: duplicate id {id!r}")
        seen.add(id)
        entries.append(_entry(id, fields, directory))
    result = tuple(sorted(entries, key=lambda e: e.id))
    _CACHE[directory] = (stamp, result)
    return result


def list_entries(family: str | None = None, directory=None) -> list[CatalogEntry]:
    if family is not None and family not in FAMILIES:
        raise CatalogError(f"unknown family {family!r}; known: {', '.join(FAMILIES)}")
    return [e for e in load(directory) if family is None or e.family == family]


def get(id: str, directory=None) -> CatalogEntry:
    for e in load(directory):
        if e.id == id:
            return e
    raise CatalogError(f"unknown catalog id {id!r}")


def check_entry(e: CatalogEntry):
    """Diagnostics for one entry plus its resolved form (None when it does not resolve)."""
    out = []

    def diag(code, msg):
        out.append(CatalogDiagnostic(e.id, code, msg))

    if not _SLUG.match(e.id):
        diag("id", f"id {e.id!r} is not a slug")
    if e.family not in FAMILIES:
        diag("family", f"unknown family {e.family!r}")
    for b in e.bounds:
        if b.kind not in ("lower", "upper"):
            diag("bound", f"bound kind {b.kind!r} is neither lower nor upper")
        if b.status not in STATUSES or not b.citation:
            diag("bound", f"bound {b.expr!r} has a bad citation or status")
    for r in e.references:
        if r.status not in STATUSES:
            diag("reference", f"reference {r.citation!r} has status {r.status!r}")
    try:
        ast = parse(e.definition_text)
    except T3coError as exc:
        diag("parse", str(exc))
        return out, None
    try:
        rv = resolve(ast)
    except T3coError as exc:
        diag("resolve", str(exc))
        return out, None
    once = render(ast)
    if render(parse(once)) != once:
        diag("render", "canonical rendering is not a fixpoint")
    if ast.extension is not None:
        tags = {t for t, _ in ast.extension.annotations}
        if ast.extension.tag not in tags:
            diag("extension", f"⊕{ast.extension.tag} has no annotation text")
    return out, rv


def verify_corpus(directory=None) -> list[CatalogDiagnostic]:
    """Check every entry and every declared pair; an empty list means a clean corpus."""
    try:
        entries = load(directory)
    except CatalogError as exc:
        return [CatalogDiagnostic("<index>", "index", str(exc))]
    out, resolved, pairs = [], {}, {}
    for e in entries:
        diags, rv = check_entry(e)
        out += diags
        if rv is not None:
            resolved[e.id] = rv
        if e.pair:
            pairs.setdefault(e.pair, []).append(e.id)
    for (name, relation), ids in sorted(pairs.items()):
        if relation not in ("equal", "distinct") or len(ids) != 2:
            out.append(CatalogDiagnostic(ids[0], "pair", f"pair {name!r} needs two members and equal|distinct"))
            continue
        a, b = ids
        if a in resolved and b in resolved:
            same = resolved_equal(resolved[a], resolved[b])
            if same != (relation == "equal"):
                out.append(CatalogDiagnostic(a, "pair", f"{a} and {b} should resolve {relation}"))
    paired = {i for ids in pairs.values() for i in ids}
    ids = sorted(resolved)
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            if (a not in paired or b not in paired) and resolved_equal(resolved[a], resolved[b]):
                out.append(CatalogDiagnostic(b, "duplicate", f"resolves equal to {a}"))
    return out


list = list_entries  # noqa: A001
