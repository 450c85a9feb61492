"""Textual source format for cognitive maps.

Line-oriented grammar, one statement per line, `#` starts a comment,
labels are double-quoted (escape `\\"` and `\\\\`):

    product "NetFix"                 # header, required first statement
    customer "board game players"
    feature "nearby search"
    concept "user satisfaction"
    offers "nearby search"                                # product -> feature
    influences "nearby search" -(-)-> "user satisfaction" # signed, -(+)-> / -(-)-> / -(o)->
    perceives "board game players" -> "user satisfaction" # customer -> concept

Labels must be declared before edges reference them. Serialization is
canonical (grouped, label-sorted) so structurally equal maps serialize
byte-identically. JSON interchange (schema version 1) is the lossless
format: it keeps ids, saturation flags, notes, and rationales, which the
text format intentionally drops.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .model import (
    CognitiveMap,
    EdgeKind,
    MapError,
    NodeKind,
    Sign,
    normalize_label,
)

JSON_SCHEMA_VERSION = 1

NODE_KEYWORDS = {
    "customer": NodeKind.CUSTOMER,
    "feature": NodeKind.FEATURE,
    "concept": NodeKind.CONCEPT,
}

SIGN_ARROWS = {
    "-(+)->": Sign.POSITIVE,
    "-(-)->": Sign.NEGATIVE,
    "-(o)->": Sign.NEUTRAL,
}
ARROW_BY_SIGN = {v: k for k, v in SIGN_ARROWS.items()}

# Diagnostics with these codes mean the text itself is malformed; everything
# else is a well-formed statement the map model rejected.
SYNTAX_CODES = frozenset({
    "UnknownKeyword",
    "BadStatement",
    "BadSign",
    "BadEscape",
    "UnterminatedQuote",
    "MissingProductHeader",
})


@dataclass
class ParseDiagnostic:
    line: int
    column: int
    code: str
    message: str
    excerpt: str = ""

    def to_dict(self) -> dict:
        return {
            "line": self.line,
            "column": self.column,
            "code": self.code,
            "message": self.message,
            "excerpt": self.excerpt,
        }

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.code}: {self.message}"


@dataclass
class ParseResult:
    """Total outcome of a parse: a map XOR error diagnostics."""

    map: Optional[CognitiveMap]
    errors: List[ParseDiagnostic] = field(default_factory=list)
    warnings: List[ParseDiagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.map is not None

    @property
    def has_syntax_errors(self) -> bool:
        return any(d.code in SYNTAX_CODES for d in self.errors)


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------


@dataclass
class _Token:
    text: str
    column: int
    quoted: bool


class _TokenError(Exception):
    def __init__(self, column: int, code: str, message: str):
        super().__init__(message)
        self.column = column
        self.code = code
        self.message = message


def _tokenize_line(line: str) -> List[_Token]:
    tokens: List[_Token] = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch in " \t":
            i += 1
            continue
        if ch == "#":
            break
        if ch == '"':
            start = i
            i += 1
            buf: List[str] = []
            while i < n:
                ch = line[i]
                if ch == "\\":
                    if i + 1 >= n or line[i + 1] not in ('"', "\\"):
                        raise _TokenError(i + 1, "BadEscape",
                                          "only \\\" and \\\\ escapes are allowed")
                    buf.append(line[i + 1])
                    i += 2
                    continue
                if ch == '"':
                    i += 1
                    tokens.append(_Token("".join(buf), start + 1, quoted=True))
                    break
                buf.append(ch)
                i += 1
            else:
                raise _TokenError(start + 1, "UnterminatedQuote", "label quote never closes")
            continue
        start = i
        while i < n and line[i] not in ' \t"#':
            i += 1
        tokens.append(_Token(line[start:i], start + 1, quoted=False))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def parse(text: str, title: str = "") -> ParseResult:
    """Parse map source text. Never raises on bad input; see ParseResult."""
    errors: List[ParseDiagnostic] = []
    warnings: List[ParseDiagnostic] = []
    cmap = CognitiveMap(title=title)
    # label -> node id, per kind, for declaration-before-use resolution
    declared: Dict[Tuple[NodeKind, str], str] = {}
    header_seen = False
    first_statement_line: Optional[int] = None

    def fail(line_no: int, col: int, code: str, message: str, excerpt: str) -> None:
        errors.append(ParseDiagnostic(line_no, col, code, message, excerpt))

    def note(line_no: int, col: int, code: str, message: str, excerpt: str) -> None:
        warnings.append(ParseDiagnostic(line_no, col, code, message, excerpt))

    def resolve(kinds: List[NodeKind], token: _Token, line_no: int, raw: str) -> Optional[str]:
        hits = [declared[(k, normalize_label(token.text))]
                for k in kinds if (k, normalize_label(token.text)) in declared]
        if not hits:
            wanted = " or ".join(k.value for k in kinds)
            fail(line_no, token.column, "UndeclaredNode",
                 f"no {wanted} named {token.text!r} declared above this line", raw)
            return None
        if len(hits) > 1:
            fail(line_no, token.column, "AmbiguousLabel",
                 f"{token.text!r} is declared as more than one element kind", raw)
            return None
        return hits[0]

    lines = text.split("\n")
    for idx, raw_line in enumerate(lines, start=1):
        raw = raw_line.rstrip("\r")
        try:
            tokens = _tokenize_line(raw)
        except _TokenError as exc:
            fail(idx, exc.column, exc.code, exc.message, raw)
            continue
        if not tokens:
            continue
        if first_statement_line is None:
            first_statement_line = idx
        head = tokens[0]
        if head.quoted:
            fail(idx, head.column, "UnknownKeyword", "statement must start with a keyword", raw)
            continue
        keyword = head.text
        args = tokens[1:]

        if keyword == "product":
            if not _expect_shape(args, ["label"], idx, raw, fail):
                continue
            label = args[0].text
            if header_seen:
                product = cmap.product()
                if product is None:
                    # header_seen was forced by an earlier MissingProductHeader
                    # report; accept the late declaration so later lines resolve
                    pass
                elif normalize_label(product.label) == normalize_label(label):
                    note(idx, head.column, "DuplicateDeclaration",
                         f"product {label!r} already declared; line ignored", raw)
                    continue
                else:
                    fail(idx, args[0].column, "SecondProduct",
                         "a map declares exactly one product", raw)
                    continue
            header_seen = True
            try:
                nid = cmap.add_node(NodeKind.PRODUCT, label)
                declared[(NodeKind.PRODUCT, normalize_label(label))] = nid
                if not cmap.title:
                    cmap.title = cmap.node(nid).label
            except MapError as exc:
                fail(idx, args[0].column, exc.code, exc.message, raw)
            continue

        if not header_seen:
            fail(idx, head.column, "MissingProductHeader",
                 'the first statement must be the product header (product "...")', raw)
            header_seen = True  # report once; keep collecting other diagnostics

        if keyword in NODE_KEYWORDS:
            if not _expect_shape(args, ["label"], idx, raw, fail):
                continue
            kind = NODE_KEYWORDS[keyword]
            label = args[0].text
            if (kind, normalize_label(label)) in declared:
                note(idx, head.column, "DuplicateDeclaration",
                     f"{keyword} {label!r} already declared; line ignored", raw)
                continue
            try:
                nid = cmap.add_node(kind, label)
                declared[(kind, normalize_label(label))] = nid
            except MapError as exc:
                fail(idx, args[0].column, exc.code, exc.message, raw)
            continue

        if keyword == "offers":
            if not _expect_shape(args, ["label"], idx, raw, fail):
                continue
            product = cmap.product()
            if product is None:
                continue  # already reported as MissingProductHeader
            dst = resolve([NodeKind.FEATURE], args[0], idx, raw)
            if dst is None:
                continue
            try:
                cmap.add_edge(product.id, dst)
            except MapError as exc:
                fail(idx, head.column, exc.code, exc.message, raw)
            continue

        if keyword == "influences":
            if not _expect_shape(args, ["label", "sign", "label"], idx, raw, fail):
                continue
            sign = SIGN_ARROWS[args[1].text]
            src = resolve([NodeKind.FEATURE, NodeKind.CONCEPT], args[0], idx, raw)
            dst = resolve([NodeKind.CONCEPT], args[2], idx, raw)
            if src is None or dst is None:
                continue
            try:
                cmap.add_edge(src, dst, sign=sign)
            except MapError as exc:
                fail(idx, head.column, exc.code, exc.message, raw)
            continue

        if keyword == "perceives":
            if not _expect_shape(args, ["label", "arrow", "label"], idx, raw, fail):
                continue
            src = resolve([NodeKind.CUSTOMER], args[0], idx, raw)
            dst = resolve([NodeKind.CONCEPT], args[2], idx, raw)
            if src is None or dst is None:
                continue
            try:
                cmap.add_edge(src, dst)
            except MapError as exc:
                fail(idx, head.column, exc.code, exc.message, raw)
            continue

        fail(idx, head.column, "UnknownKeyword", f"unknown keyword {keyword!r}", raw)

    if not header_seen:
        line = first_statement_line or max(1, len([l for l in lines if l.strip()]) or 1)
        fail(line, 1, "MissingProductHeader", "map source declares no product header", "")

    if errors:
        return ParseResult(map=None, errors=errors, warnings=warnings)
    return ParseResult(map=cmap, errors=[], warnings=warnings)


def _expect_shape(args: List[_Token], shape: List[str], line_no: int, raw: str, fail) -> bool:
    """Check token arity and kinds for one statement; report the first mismatch."""
    if len(args) != len(shape):
        fail(line_no, args[len(shape)].column if len(args) > len(shape) else len(raw) + 1,
             "BadStatement",
             f"expected {_shape_text(shape)}, got {len(args)} token(s)", raw)
        return False
    for token, want in zip(args, shape):
        if want == "label" and not token.quoted:
            fail(line_no, token.column, "BadStatement",
                 f"expected a quoted label, got {token.text!r}", raw)
            return False
        if want == "sign" and (token.quoted or token.text not in SIGN_ARROWS):
            fail(line_no, token.column, "BadSign",
                 f"expected -(+)->, -(-)-> or -(o)->, got {token.text!r}", raw)
            return False
        if want == "arrow" and (token.quoted or token.text != "->"):
            fail(line_no, token.column, "BadStatement",
                 f"expected ->, got {token.text!r}", raw)
            return False
    return True


def _shape_text(shape: List[str]) -> str:
    names = {"label": "a quoted label", "sign": "a sign arrow", "arrow": "->"}
    return " then ".join(names[s] for s in shape)


# ---------------------------------------------------------------------------
# Canonical serializer
# ---------------------------------------------------------------------------


def _quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _label_key(label: str) -> tuple:
    return (label.casefold(), label)


def serialize(cmap: CognitiveMap) -> str:
    """Canonical text form: a pure function of map structure, not of ids."""
    product = cmap.product()
    if product is None:
        raise MapError("cannot serialize a map without a product node")
    lines = [f"product {_quote(product.label)}"]

    node_block: List[str] = []
    for keyword, kind in (("customer", NodeKind.CUSTOMER),
                          ("feature", NodeKind.FEATURE),
                          ("concept", NodeKind.CONCEPT)):
        for node in sorted(cmap.nodes_of_kind(kind), key=lambda n: _label_key(n.label)):
            node_block.append(f"{keyword} {_quote(node.label)}")
    if node_block:
        lines.append("")
        lines.extend(node_block)

    edge_block: List[str] = []
    by_kind = {k: [] for k in EdgeKind}
    for e in cmap.edges.values():
        by_kind[e.kind].append(e)
    for kind in (EdgeKind.OFFERING, EdgeKind.INFLUENCE, EdgeKind.PERCEPTION):
        for e in sorted(by_kind[kind],
                        key=lambda e: (_label_key(cmap.nodes[e.src].label),
                                       _label_key(cmap.nodes[e.dst].label))):
            src = cmap.nodes[e.src].label
            dst = cmap.nodes[e.dst].label
            if kind == EdgeKind.OFFERING:
                edge_block.append(f"offers {_quote(dst)}")
            elif kind == EdgeKind.INFLUENCE:
                edge_block.append(
                    f"influences {_quote(src)} {ARROW_BY_SIGN[e.sign]} {_quote(dst)}")
            else:
                edge_block.append(f"perceives {_quote(src)} -> {_quote(dst)}")
    if edge_block:
        lines.append("")
        lines.extend(edge_block)

    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON interchange (schema v1)
# ---------------------------------------------------------------------------


class JsonFormatError(MapError):
    """Schema violation; `path` is a JSON-pointer-style location."""

    code = "JsonFormatError"

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class UnsupportedVersion(JsonFormatError):
    code = "UnsupportedVersion"


class DanglingReference(JsonFormatError):
    code = "DanglingReference"


def map_to_dict(cmap: CognitiveMap) -> dict:
    return {
        "version": JSON_SCHEMA_VERSION,
        "id": cmap.id,
        "title": cmap.title,
        "created": cmap.created.isoformat(),
        "modified": cmap.modified.isoformat(),
        "nodes": [n.to_dict() for n in cmap.nodes.values()],
        "edges": [e.to_dict() for e in cmap.edges.values()],
    }


def export_json(cmap: CognitiveMap) -> str:
    return json.dumps(map_to_dict(cmap), indent=2, ensure_ascii=False) + "\n"


def _require(data: dict, key: str, kind, path: str):
    if key not in data:
        raise JsonFormatError(f"{path}/{key}", "missing required field")
    value = data[key]
    if not isinstance(value, kind):
        raise JsonFormatError(f"{path}/{key}", f"expected {kind.__name__}")
    return value


def map_from_dict(data: dict) -> CognitiveMap:
    if not isinstance(data, dict):
        raise JsonFormatError("", "top-level value must be an object")
    version = data.get("version")
    if version != JSON_SCHEMA_VERSION:
        raise UnsupportedVersion("/version", f"unsupported schema version {version!r}")

    cmap = CognitiveMap(title=str(data.get("title", "")),
                        map_id=data.get("id") or None)
    nodes = _require(data, "nodes", list, "")
    edges = _require(data, "edges", list, "")

    for i, entry in enumerate(nodes):
        path = f"/nodes/{i}"
        if not isinstance(entry, dict):
            raise JsonFormatError(path, "expected an object")
        kind_raw = _require(entry, "kind", str, path)
        try:
            kind = NodeKind(kind_raw)
        except ValueError:
            raise JsonFormatError(f"{path}/kind", f"unknown node kind {kind_raw!r}") from None
        label = _require(entry, "label", str, path)
        node_id = _require(entry, "id", str, path)
        try:
            cmap.add_node(kind, label, notes=entry.get("notes"), node_id=node_id)
        except MapError as exc:
            raise JsonFormatError(path, exc.message) from None

    for i, entry in enumerate(edges):
        path = f"/edges/{i}"
        if not isinstance(entry, dict):
            raise JsonFormatError(path, "expected an object")
        src = _require(entry, "src", str, path)
        dst = _require(entry, "dst", str, path)
        if src not in cmap.nodes:
            raise DanglingReference(f"{path}/src", f"no node with id {src!r}")
        if dst not in cmap.nodes:
            raise DanglingReference(f"{path}/dst", f"no node with id {dst!r}")
        sign_raw = entry.get("sign")
        sign = None
        if sign_raw is not None:
            try:
                sign = Sign(sign_raw)
            except ValueError:
                raise JsonFormatError(f"{path}/sign", f"unknown sign {sign_raw!r}") from None
        try:
            edge_id = cmap.add_edge(
                src, dst, sign=sign,
                rationale=entry.get("rationale"),
                connective=entry.get("connective") if entry.get("connective") else None,
                edge_id=_require(entry, "id", str, path),
            )
        except MapError as exc:
            raise JsonFormatError(path, exc.message) from None
        cmap.edges[edge_id].saturated = bool(entry.get("saturated", False))

    cmap.sync_counters()
    return cmap


def import_json(text: str) -> CognitiveMap:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JsonFormatError("", f"not valid JSON: {exc}") from None
    return map_from_dict(data)
