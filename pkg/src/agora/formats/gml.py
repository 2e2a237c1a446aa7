"""GML reader and writer.

Follows the de-facto conventions: integer node ids plus ``label``, quoted
strings with HTML-entity escaping, and a ``graphics`` block for position,
size, and fill color. Only the canonical metadata keys (query, collection
window, unresolved reference count) survive a GML round trip.
"""

from __future__ import annotations

import re
from pathlib import Path

from ..errors import DuplicateNodeId, ParseError
from ..graph import UNKNOWN_KIND, DiscussionGraph, NodeViz

_METADATA_KEYS = (
    ("query", "query"),
    ("collected_from", "collectedFrom"),
    ("collected_to", "collectedTo"),
    ("unresolved_references", "unresolvedReferences"),
)
_NODE_KEYS = (
    ("username", "username"),
    ("display_name", "displayName"),
    ("followers_count", "followersCount"),
    ("tweets_in_discussion", "tweetsInDiscussion"),
    ("opinion", "opinion"),
)

_KEY_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*$")
_INT_RE = re.compile(r"[+-]?[0-9]+$")
_FLOAT_RE = re.compile(r"[+-]?([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)([eE][+-]?[0-9]+)?$")


def _escape(text: str) -> str:
    out = []
    for ch in text:
        if ch == "&":
            out.append("&amp;")
        elif ch == '"':
            out.append("&quot;")
        elif " " <= ch <= "~" or ch in "\t":
            out.append(ch)
        else:
            out.append(f"&#{ord(ch)};")
    return "".join(out)


_ENTITY_RE = re.compile(r"&(#[0-9]+|#x[0-9A-Fa-f]+|[A-Za-z]+);")
_NAMED_ENTITIES = {"amp": "&", "quot": '"', "apos": "'", "lt": "<", "gt": ">"}


def _unescape(text: str) -> str:
    def sub(match: re.Match) -> str:
        body = match.group(1)
        if body.startswith("#x") or body.startswith("#X"):
            return chr(int(body[2:], 16))
        if body.startswith("#"):
            return chr(int(body[1:]))
        return _NAMED_ENTITIES.get(body, match.group(0))

    return _ENTITY_RE.sub(sub, text)


def _fmt_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return f'"{_escape(str(value))}"'


# -- tokenizer ----------------------------------------------------------------


class _Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind, value, line, col):
        self.kind = kind  # "key" | "int" | "float" | "str" | "[" | "]"
        self.value = value
        self.line = line
        self.col = col


def _tokenize(text: str):
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#" and col == 1:  # comment line
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch in "[]":
            tokens.append(_Token(ch, ch, start_line, start_col))
            i += 1
            col += 1
            continue
        if ch == '"':
            end = text.find('"', i + 1)
            if end == -1 or "\n" in text[i + 1 : end]:
                raise ParseError("unterminated string", start_line, start_col)
            raw = text[i + 1 : end]
            tokens.append(_Token("str", _unescape(raw), start_line, start_col))
            col += end - i + 1
            i = end + 1
            continue
        j = i
        while j < n and text[j] not in ' \t\r\n[]"':
            j += 1
        word = text[i:j]
        if _INT_RE.match(word):
            tokens.append(_Token("int", int(word), start_line, start_col))
        elif _FLOAT_RE.match(word) and any(c in word for c in ".eE"):
            tokens.append(_Token("float", float(word), start_line, start_col))
        elif _KEY_RE.match(word):
            tokens.append(_Token("key", word, start_line, start_col))
        else:
            raise ParseError(f"unexpected token {word!r}", start_line, start_col)
        col += j - i
        i = j
    return tokens


def _parse_pairs(tokens: list[_Token], pos: int, closing: bool):
    """Parse key/value pairs until `]` (or end of input at top level)."""
    pairs: list[tuple[str, object]] = []
    while pos < len(tokens):
        tok = tokens[pos]
        if tok.kind == "]":
            if not closing:
                raise ParseError("unbalanced ']'", tok.line, tok.col)
            return pairs, pos + 1
        if tok.kind != "key":
            raise ParseError(f"expected a key, got {tok.value!r}", tok.line, tok.col)
        if pos + 1 >= len(tokens):
            raise ParseError(f"key {tok.value!r} has no value", tok.line, tok.col)
        value_tok = tokens[pos + 1]
        if value_tok.kind == "[":
            nested, pos = _parse_pairs(tokens, pos + 2, closing=True)
            pairs.append((tok.value, nested))
        elif value_tok.kind in ("int", "float", "str"):
            pairs.append((tok.value, value_tok.value))
            pos += 2
        else:
            raise ParseError(
                f"expected a value for {tok.value!r}", value_tok.line, value_tok.col
            )
    if closing:
        last = tokens[-1] if tokens else None
        raise ParseError(
            "unterminated '['", last.line if last else 0, last.col if last else 0
        )
    return pairs, pos


# -- public API ----------------------------------------------------------------


def dumps(doc: DiscussionGraph) -> str:
    problems = doc.validate()
    if problems:
        raise ValueError(f"invalid graph document: {problems[0]}")
    lines = ["graph [", "  directed 1"]
    for meta_key, gml_key in _METADATA_KEYS:
        if meta_key in doc.metadata:
            lines.append(f"  {gml_key} {_fmt_value(doc.metadata[meta_key])}")
    for node_id in doc.sorted_nodes():
        if not node_id.lstrip("-").isdigit():
            raise ValueError(f"GML requires numeric node ids, got {node_id!r}")
        attrs = doc.nodes[node_id]
        lines.append("  node [")
        lines.append(f"    id {int(node_id)}")
        lines.append(f"    label {_fmt_value(attrs.get('username', ''))}")
        for attr_key, gml_key in _NODE_KEYS:
            if attr_key == "opinion" and "opinion" not in attrs:
                continue
            lines.append(f"    {gml_key} {_fmt_value(attrs.get(attr_key, ''))}")
        viz = doc.viz.get(node_id)
        if viz is not None:
            lines.append("    graphics [")
            lines.append(f"      x {repr(float(viz.x))}")
            lines.append(f"      y {repr(float(viz.y))}")
            if viz.size is not None:
                lines.append(f"      w {repr(float(viz.size))}")
            if viz.color is not None:
                lines.append(f'      fill "{viz.color}"')
            lines.append("    ]")
        lines.append("  ]")
    for src, dst, kind in doc.sorted_edges():
        lines.append("  edge [")
        lines.append(f"    source {int(src)}")
        lines.append(f"    target {int(dst)}")
        lines.append(f"    kind {_fmt_value(kind)}")
        lines.append(f"    weight {_fmt_value(doc.edges[(src, dst, kind)])}")
        lines.append("  ]")
    lines.append("]")
    return "\n".join(lines) + "\n"


def loads(text: str) -> DiscussionGraph:
    tokens = _tokenize(text)
    pairs, _ = _parse_pairs(tokens, 0, closing=False)
    graph_pairs = None
    for key, value in pairs:
        if key == "graph" and isinstance(value, list):
            graph_pairs = value
            break
    if graph_pairs is None:
        raise ParseError("no graph [...] block found")

    doc = DiscussionGraph()
    gml_to_meta = {gml: meta for meta, gml in _METADATA_KEYS}
    gml_to_attr = {gml: attr for attr, gml in _NODE_KEYS}

    for key, value in graph_pairs:
        if key in gml_to_meta and not isinstance(value, list):
            doc.metadata[gml_to_meta[key]] = value
        elif key == "node" and isinstance(value, list):
            fields = dict(_last_wins(value))
            if "id" not in fields:
                raise ParseError("node without id")
            node_id = str(fields["id"])
            if node_id in doc.nodes:
                raise DuplicateNodeId(f"duplicate node id {node_id!r}")
            attrs = doc.add_node(node_id)
            if fields.get("label"):
                attrs["username"] = str(fields["label"])
            for gml_key, attr_key in gml_to_attr.items():
                if gml_key in fields:
                    attrs[attr_key] = fields[gml_key]
            graphics = fields.get("graphics")
            if isinstance(graphics, list):
                g = dict(_last_wins(graphics))
                if "x" in g and "y" in g:
                    doc.viz[node_id] = NodeViz(
                        x=float(g["x"]),
                        y=float(g["y"]),
                        size=float(g["w"]) if "w" in g else None,
                        color=str(g["fill"]) if "fill" in g else None,
                    )
        elif key == "edge" and isinstance(value, list):
            fields = dict(_last_wins(value))
            if "source" not in fields or "target" not in fields:
                raise ParseError("edge without source/target")
            src, dst = str(fields["source"]), str(fields["target"])
            if src not in doc.nodes or dst not in doc.nodes:
                raise ParseError(f"edge endpoint {src!r}->{dst!r} not declared as a node")
            kind = str(fields.get("kind", UNKNOWN_KIND))
            weight = fields.get("weight", 1)
            if isinstance(weight, float) and weight == int(weight):
                weight = int(weight)
            edge = (src, dst, kind)
            doc.edges[edge] = doc.edges.get(edge, 0) + weight

    if doc.viz and not all(n in doc.viz for n in doc.nodes):
        raise ParseError("some nodes carry positions but not all")
    return doc


def _last_wins(pairs: list[tuple[str, object]]):
    seen: dict[str, object] = {}
    for key, value in pairs:
        seen[key] = value
    return seen.items()


def write_gml(doc: DiscussionGraph, path: str | Path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def read_gml(path: str | Path) -> DiscussionGraph:
    return loads(Path(path).read_text(encoding="utf-8"))
