"""JSON node-link reader and writer.

Top-level keys are ``nodes`` and ``edges``; node objects carry ``id``, edge
objects carry ``source``/``target``/``kind``/``weight``. Layout state lives
under the node keys ``x``, ``y``, ``size``, ``color``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ..errors import DuplicateNodeId, ParseError
from ..graph import UNKNOWN_KIND, DiscussionGraph, NodeViz

_NODE_ATTRS = ("username", "display_name", "followers_count", "tweets_in_discussion")


def dumps(doc: DiscussionGraph) -> str:
    problems = doc.validate()
    if problems:
        raise ValueError(f"invalid graph document: {problems[0]}")
    nodes = []
    for node_id in doc.sorted_nodes():
        attrs = doc.nodes[node_id]
        obj: dict[str, Any] = {"id": node_id}
        for key in _NODE_ATTRS:
            obj[key] = attrs.get(key, "" if key in ("username", "display_name") else 0)
        if "opinion" in attrs:
            obj["opinion"] = attrs["opinion"]
        viz = doc.viz.get(node_id)
        if viz is not None:
            obj["x"] = viz.x
            obj["y"] = viz.y
            if viz.size is not None:
                obj["size"] = viz.size
            if viz.color is not None:
                obj["color"] = viz.color
        nodes.append(obj)
    edges = []
    for src, dst, kind in doc.sorted_edges():
        edges.append(
            {"source": src, "target": dst, "kind": kind, "weight": doc.edges[(src, dst, kind)]}
        )
    payload: dict[str, Any] = {"nodes": nodes, "edges": edges}
    if doc.metadata:
        # canonical key order so every format reaches the same bytes
        payload["metadata"] = {k: doc.metadata[k] for k in sorted(doc.metadata)}
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":")) + "\n"


def loads(text: str) -> DiscussionGraph:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, err.lineno, err.colno) from err
    if not isinstance(payload, dict) or "nodes" not in payload or "edges" not in payload:
        raise ParseError("document must be an object with 'nodes' and 'edges'")
    doc = DiscussionGraph()
    metadata = payload.get("metadata")
    if isinstance(metadata, dict):
        doc.metadata = metadata
    for obj in payload["nodes"]:
        if not isinstance(obj, dict) or "id" not in obj:
            raise ParseError("node without id")
        node_id = str(obj["id"])
        if node_id in doc.nodes:
            raise DuplicateNodeId(f"duplicate node id {node_id!r}")
        attrs = doc.add_node(node_id)
        for key in _NODE_ATTRS + ("opinion",):
            if key in obj:
                attrs[key] = obj[key]
        if "x" in obj and "y" in obj:
            try:
                doc.viz[node_id] = NodeViz(
                    x=float(obj["x"]),
                    y=float(obj["y"]),
                    size=float(obj["size"]) if "size" in obj else None,
                    color=str(obj["color"]) if "color" in obj else None,
                )
            except (TypeError, ValueError) as err:
                raise ParseError(f"bad layout values on node {node_id}: {err}") from err
    for obj in payload["edges"]:
        if not isinstance(obj, dict) or "source" not in obj or "target" not in obj:
            raise ParseError("edge without source/target")
        src, dst = str(obj["source"]), str(obj["target"])
        if src not in doc.nodes or dst not in doc.nodes:
            raise ParseError(f"edge endpoint {src!r}->{dst!r} not declared as a node")
        kind = str(obj.get("kind", UNKNOWN_KIND))
        weight = obj.get("weight", 1)
        if not isinstance(weight, (int, float)):
            raise ParseError(f"bad edge weight {weight!r}")
        if isinstance(weight, float) and weight == int(weight):
            weight = int(weight)
        edge = (src, dst, kind)
        doc.edges[edge] = doc.edges.get(edge, 0) + weight
    if doc.viz and not all(n in doc.viz for n in doc.nodes):
        raise ParseError("some nodes carry positions but not all")
    return doc


def write_json(doc: DiscussionGraph, path: str | Path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def read_json(path: str | Path) -> DiscussionGraph:
    return loads(Path(path).read_text(encoding="utf-8"))
