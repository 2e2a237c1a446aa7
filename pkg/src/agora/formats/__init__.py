"""Graph document serialization: GEXF, GML, and JSON node-link."""

from __future__ import annotations

from pathlib import Path

from ..errors import FileMissing, ParseError
from ..graph import DiscussionGraph
from .gexf import dumps as dumps_gexf
from .gexf import loads as loads_gexf
from .gexf import read_gexf, write_gexf
from .gml import dumps as dumps_gml
from .gml import loads as loads_gml
from .gml import read_gml, write_gml
from .nodelink import dumps as dumps_json
from .nodelink import loads as loads_json
from .nodelink import read_json, write_json

FORMATS = {
    "gexf": (loads_gexf, dumps_gexf),
    "gml": (loads_gml, dumps_gml),
    "json": (loads_json, dumps_json),
}

_EXTENSIONS = {".gexf": "gexf", ".gml": "gml", ".json": "json"}


def format_for_path(path: str | Path) -> str:
    ext = Path(path).suffix.lower()
    if ext not in _EXTENSIONS:
        raise ValueError(f"unsupported graph file extension {ext!r} (use gexf/gml/json)")
    return _EXTENSIONS[ext]


def read_graph(path: str | Path) -> DiscussionGraph:
    path = Path(path)
    if not path.exists():
        raise FileMissing(f"graph file not found: {path}")
    loads, _ = FORMATS[format_for_path(path)]
    return loads(path.read_text(encoding="utf-8"))


def write_graph(doc: DiscussionGraph, path: str | Path) -> None:
    _, dumps = FORMATS[format_for_path(path)]
    Path(path).write_text(dumps(doc), encoding="utf-8")


def sniff_format(data: bytes) -> str:
    """Guess the format of raw graph bytes by their first structural byte."""
    head = data.lstrip(b"\xef\xbb\xbf \t\r\n")
    if head.startswith(b"<"):
        return "gexf"
    if head.startswith(b"{"):
        return "json"
    return "gml"


def parse_bytes(data: bytes, fmt: str | None = None) -> DiscussionGraph:
    fmt = fmt or sniff_format(data)
    if fmt not in FORMATS:
        raise ValueError(f"unknown graph format {fmt!r}")
    loads, _ = FORMATS[fmt]
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as err:
        raise ParseError(f"not valid UTF-8: {err}") from err
    return loads(text)


__all__ = [
    "FORMATS",
    "format_for_path",
    "read_graph",
    "write_graph",
    "sniff_format",
    "parse_bytes",
    "read_gexf",
    "write_gexf",
    "read_gml",
    "write_gml",
    "read_json",
    "write_json",
    "dumps_gexf",
    "dumps_gml",
    "dumps_json",
    "loads_gexf",
    "loads_gml",
    "loads_json",
]
