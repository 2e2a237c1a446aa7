"""GEXF 1.3 reader and writer, including the viz namespace.

Output is byte-stable: nodes and edges are emitted sorted by id and floats use
their shortest round-trip representation. Graph metadata travels as a JSON
object in the ``<meta><description>`` element.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from pathlib import Path

from ..errors import DuplicateNodeId, ParseError, UnsupportedVersion
from ..graph import UNKNOWN_KIND, DiscussionGraph, NodeViz

GEXF_NS = "http://gexf.net/1.3"
VIZ_NS = "http://gexf.net/1.3/viz"

# attribute id -> (title, gexf type); opinion is only written when present
_NODE_ATTRS = (
    ("0", "username", "string"),
    ("1", "display_name", "string"),
    ("2", "followers_count", "long"),
    ("3", "tweets_in_discussion", "long"),
    ("4", "opinion", "string"),
)


def _fmt(value: float) -> str:
    return repr(float(value))


def _hex_to_rgb(color: str) -> tuple[int, int, int]:
    color = color.lstrip("#")
    return int(color[0:2], 16), int(color[2:4], 16), int(color[4:6], 16)


def _rgb_to_hex(r: int, g: int, b: int) -> str:
    return f"#{r:02x}{g:02x}{b:02x}"


def dumps(doc: DiscussionGraph) -> str:
    """Serialize a graph document to GEXF text."""
    problems = doc.validate()
    if problems:
        raise ValueError(f"invalid graph document: {problems[0]}")
    root = ET.Element(
        "gexf", {"xmlns": GEXF_NS, "xmlns:viz": VIZ_NS, "version": "1.3"}
    )
    meta = ET.SubElement(root, "meta")
    ET.SubElement(meta, "creator").text = "agora"
    if doc.metadata:
        ET.SubElement(meta, "description").text = json.dumps(
            doc.metadata, sort_keys=True, ensure_ascii=False
        )
    graph_el = ET.SubElement(root, "graph", {"defaultedgetype": "directed"})

    node_attrs = ET.SubElement(graph_el, "attributes", {"class": "node"})
    for attr_id, title, attr_type in _NODE_ATTRS:
        ET.SubElement(node_attrs, "attribute", {"id": attr_id, "title": title, "type": attr_type})
    edge_attrs = ET.SubElement(graph_el, "attributes", {"class": "edge"})
    ET.SubElement(edge_attrs, "attribute", {"id": "kind", "title": "kind", "type": "string"})

    nodes_el = ET.SubElement(graph_el, "nodes")
    for node_id in doc.sorted_nodes():
        attrs = doc.nodes[node_id]
        node_el = ET.SubElement(
            nodes_el, "node", {"id": node_id, "label": str(attrs.get("username", ""))}
        )
        values = ET.SubElement(node_el, "attvalues")
        for attr_id, title, _ in _NODE_ATTRS:
            if title == "opinion" and "opinion" not in attrs:
                continue
            ET.SubElement(
                values, "attvalue", {"for": attr_id, "value": str(attrs.get(title, ""))}
            )
        viz = doc.viz.get(node_id)
        if viz is not None:
            ET.SubElement(
                node_el, "viz:position", {"x": _fmt(viz.x), "y": _fmt(viz.y), "z": "0.0"}
            )
            if viz.size is not None:
                ET.SubElement(node_el, "viz:size", {"value": _fmt(viz.size)})
            if viz.color is not None:
                r, g, b = _hex_to_rgb(viz.color)
                ET.SubElement(node_el, "viz:color", {"r": str(r), "g": str(g), "b": str(b)})

    edges_el = ET.SubElement(graph_el, "edges")
    for index, (src, dst, kind) in enumerate(doc.sorted_edges()):
        edge_el = ET.SubElement(
            edges_el,
            "edge",
            {
                "id": str(index),
                "source": src,
                "target": dst,
                "weight": str(doc.edges[(src, dst, kind)]),
            },
        )
        values = ET.SubElement(edge_el, "attvalues")
        ET.SubElement(values, "attvalue", {"for": "kind", "value": kind})

    tree = ET.ElementTree(root)
    ET.indent(tree, space="  ")
    payload = ET.tostring(root, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + payload + "\n"


def _localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _children(element: ET.Element, name: str):
    return [child for child in element if _localname(child.tag) == name]


def _first(element: ET.Element, name: str) -> ET.Element | None:
    found = _children(element, name)
    return found[0] if found else None


def loads(text: str) -> DiscussionGraph:
    """Parse GEXF text; tolerates missing viz data and foreign attributes."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as err:
        line, col = getattr(err, "position", (0, 0))
        raise ParseError(f"not well-formed XML: {err.msg if hasattr(err, 'msg') else err}",
                         line, col) from err
    if _localname(root.tag) != "gexf":
        raise ParseError(f"root element is {_localname(root.tag)!r}, expected gexf")
    version = root.get("version")
    if version is not None and not version.startswith("1."):
        raise UnsupportedVersion(f"GEXF version {version} is not supported")

    doc = DiscussionGraph()
    meta = _first(root, "meta")
    if meta is not None:
        description = _first(meta, "description")
        if description is not None and description.text:
            try:
                parsed = json.loads(description.text)
            except json.JSONDecodeError:
                parsed = None
            if isinstance(parsed, dict):
                doc.metadata = parsed

    graph_el = _first(root, "graph")
    if graph_el is None:
        raise ParseError("missing graph element")

    node_titles: dict[str, tuple[str, str]] = {}
    edge_titles: dict[str, tuple[str, str]] = {}
    for attrs_el in _children(graph_el, "attributes"):
        table = edge_titles if attrs_el.get("class") == "edge" else node_titles
        for attr_el in _children(attrs_el, "attribute"):
            table[attr_el.get("id", "")] = (
                attr_el.get("title", ""),
                attr_el.get("type", "string"),
            )

    def coerce(value: str, attr_type: str):
        if attr_type in ("long", "integer", "int"):
            return int(value)
        if attr_type in ("double", "float"):
            return float(value)
        return value

    nodes_el = _first(graph_el, "nodes")
    for node_el in _children(nodes_el, "node") if nodes_el is not None else ():
        node_id = node_el.get("id")
        if node_id is None:
            raise ParseError("node without id")
        if node_id in doc.nodes:
            raise DuplicateNodeId(f"duplicate node id {node_id!r}")
        attrs = doc.add_node(node_id)
        label = node_el.get("label")
        if label:
            attrs["username"] = label
        values_el = _first(node_el, "attvalues")
        for value_el in _children(values_el, "attvalue") if values_el is not None else ():
            title, attr_type = node_titles.get(value_el.get("for", ""), ("", "string"))
            if not title:
                continue
            try:
                attrs[title] = coerce(value_el.get("value", ""), attr_type)
            except ValueError as err:
                raise ParseError(f"bad value for attribute {title!r}: {err}") from err
        for child in node_el:
            name = _localname(child.tag)
            if name == "position":
                try:
                    x = float(child.get("x", "0"))
                    y = float(child.get("y", "0"))
                except ValueError as err:
                    raise ParseError(f"bad position on node {node_id}: {err}") from err
                viz = doc.viz.setdefault(node_id, NodeViz(x=x, y=y))
                viz.x, viz.y = x, y
            elif name == "size":
                viz = doc.viz.setdefault(node_id, NodeViz(x=0.0, y=0.0))
                viz.size = float(child.get("value", "1"))
            elif name == "color":
                viz = doc.viz.setdefault(node_id, NodeViz(x=0.0, y=0.0))
                viz.color = _rgb_to_hex(
                    int(child.get("r", "0")), int(child.get("g", "0")), int(child.get("b", "0"))
                )

    edges_el = _first(graph_el, "edges")
    for edge_el in _children(edges_el, "edge") if edges_el is not None else ():
        src = edge_el.get("source")
        dst = edge_el.get("target")
        if src is None or dst is None:
            raise ParseError("edge without source/target")
        if src not in doc.nodes or dst not in doc.nodes:
            raise ParseError(f"edge endpoint {src!r}->{dst!r} not declared as a node")
        weight_raw = edge_el.get("weight", "1")
        try:
            weight = float(weight_raw)
        except ValueError as err:
            raise ParseError(f"bad edge weight {weight_raw!r}") from err
        kind = UNKNOWN_KIND
        values_el = _first(edge_el, "attvalues")
        for value_el in _children(values_el, "attvalue") if values_el is not None else ():
            title, _ = edge_titles.get(value_el.get("for", ""), ("", "string"))
            if title == "kind":
                kind = value_el.get("value", UNKNOWN_KIND)
        key = (src, dst, kind)
        doc.edges[key] = doc.edges.get(key, 0) + (int(weight) if weight == int(weight) else weight)

    if doc.viz and not all(n in doc.viz for n in doc.nodes):
        raise ParseError("some nodes carry positions but not all")
    return doc


def write_gexf(doc: DiscussionGraph, path: str | Path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def read_gexf(path: str | Path) -> DiscussionGraph:
    return loads(Path(path).read_text(encoding="utf-8"))
