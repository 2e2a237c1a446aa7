"""Force-directed node placement and layout application to graph files.

Implements the classic spring/repulsion scheme: repulsion k^2/d between every
pair, attraction d^2/k along edges, displacement capped by a temperature that
cools linearly to zero, positions clamped to the frame. Everything is driven
by one seeded generator so identical inputs give bitwise-identical layouts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .formats import read_graph, write_graph
from .graph import DiscussionGraph, NodeViz
from .opinion import AMBIGUOUS, UNLABELED, parse_group

DEFAULT_PALETTE = {
    "group:0": "#e41a1c",
    "group:1": "#377eb8",
    AMBIGUOUS: "#984ea3",
    UNLABELED: "#999999",
}

# extra group colors when a graph was labeled against more than two seeds
_EXTRA_GROUP_COLORS = ("#4daf4a", "#ff7f00", "#a65628", "#f781bf", "#ffff33")


@dataclass(frozen=True)
class LayoutParams:
    width: float = 1000.0
    height: float = 1000.0
    iterations: int = 50
    force_constant: float = 1.0  # scales the optimal pair distance k
    seed: int = 0
    use_weights: bool = False
    palette: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_PALETTE))
    size_base: float = 1.0
    size_log_factor: float = 2.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("frame dimensions must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.force_constant <= 0:
            raise ValueError("force constant must be positive")


def fr_layout(
    graph: DiscussionGraph,
    params: LayoutParams | None = None,
    trace: list[float] | None = None,
) -> dict[str, tuple[float, float]]:
    """Node positions inside the frame; pure function of (graph, params).

    When `trace` is given it receives the maximum displacement of each
    iteration, which cools monotonically with the temperature.
    """
    params = params or LayoutParams()
    order = graph.sorted_nodes()
    n = len(order)
    if n == 0:
        raise ValueError("graph must have at least one node")
    rng = np.random.default_rng(params.seed)
    pos = rng.uniform(size=(n, 2)) * np.array([params.width, params.height])
    if n == 1:
        return {order[0]: (float(pos[0, 0]), float(pos[0, 1]))}

    index = {node: i for i, node in enumerate(order)}
    pair_weights: dict[tuple[int, int], float] = {}
    for (src, dst, _), w in graph.edges.items():
        i, j = index[src], index[dst]
        if i == j:
            continue
        key = (i, j) if i < j else (j, i)
        pair_weights[key] = pair_weights.get(key, 0.0) + w
    if pair_weights:
        edge_idx = np.array(sorted(pair_weights), dtype=np.int64)
        edge_w = np.array([pair_weights[tuple(e)] for e in edge_idx], dtype=float)
    else:
        edge_idx = np.zeros((0, 2), dtype=np.int64)
        edge_w = np.zeros(0)

    area = params.width * params.height
    k = params.force_constant * math.sqrt(area / n)
    t0 = params.width / 10.0
    iterations = params.iterations

    # annealing never reheats: the cap also honors the previous iteration's
    # realized maximum, so per-iteration displacement is monotonically cooling
    previous_max = math.inf
    for iteration in range(iterations):
        t = min(t0 * (iterations - iteration) / iterations, previous_max)
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((delta ** 2).sum(axis=2))
        degenerate = dist < 1e-9
        np.fill_diagonal(degenerate, False)
        if degenerate.any():
            # coincident nodes repel along a seeded pseudo-random direction
            for i, j in zip(*np.nonzero(np.triu(degenerate))):
                angle = rng.uniform(0.0, 2.0 * math.pi)
                nudge = np.array([math.cos(angle), math.sin(angle)]) * 1e-9
                delta[i, j] = nudge
                delta[j, i] = -nudge
            dist = np.maximum(dist, 1e-9)
        np.fill_diagonal(dist, np.inf)

        repulsion = (k * k) / (dist * dist)  # k^2/d along the unit vector
        disp = (delta * repulsion[:, :, None]).sum(axis=1)

        if len(edge_idx):
            src, dst = edge_idx[:, 0], edge_idx[:, 1]
            evec = pos[src] - pos[dst]
            edist = np.maximum(np.sqrt((evec ** 2).sum(axis=1)), 1e-9)
            attraction = edist / k  # d^2/k split into d/k per unit vector
            if params.use_weights:
                attraction = attraction * edge_w
            pull = evec * attraction[:, None]
            np.add.at(disp, src, -pull)
            np.add.at(disp, dst, pull)

        length = np.maximum(np.sqrt((disp ** 2).sum(axis=1)), 1e-12)
        capped = np.minimum(length, t)
        moved = pos + disp / length[:, None] * capped[:, None]
        moved[:, 0] = np.clip(moved[:, 0], 0.0, params.width)
        moved[:, 1] = np.clip(moved[:, 1], 0.0, params.height)
        previous_max = float(np.sqrt(((moved - pos) ** 2).sum(axis=1)).max())
        if trace is not None:
            trace.append(previous_max)
        pos = moved

    return {node: (float(pos[i, 0]), float(pos[i, 1])) for node, i in index.items()}


def node_sizes(graph: DiscussionGraph, params: LayoutParams) -> dict[str, float]:
    """Size law: base + factor * ln(1 + strength)."""
    strengths = graph.strengths()
    return {
        node: params.size_base + params.size_log_factor * math.log1p(strengths[node])
        for node in graph.nodes
    }


def node_colors(graph: DiscussionGraph, params: LayoutParams) -> dict[str, str]:
    """Opinion-based colors; unlabeled and unknown labels fall back to gray."""
    palette = dict(params.palette)
    out = {}
    for node, attrs in graph.nodes.items():
        label = attrs.get("opinion", UNLABELED)
        color = palette.get(label)
        if color is None:
            group = parse_group(label)
            if group is not None and group >= 2:
                color = _EXTRA_GROUP_COLORS[(group - 2) % len(_EXTRA_GROUP_COLORS)]
            else:
                color = palette.get(UNLABELED, "#999999")
        out[node] = color
    return out


def apply_layout(graph: DiscussionGraph, params: LayoutParams | None = None) -> DiscussionGraph:
    """Write positions, sizes, and opinion colors into the document in place."""
    params = params or LayoutParams()
    positions = fr_layout(graph, params)
    sizes = node_sizes(graph, params)
    colors = node_colors(graph, params)
    for node, (x, y) in positions.items():
        graph.viz[node] = NodeViz(x=x, y=y, size=sizes[node], color=colors[node])
    return graph


def create_layout(path: str | Path, params: LayoutParams | None = None) -> DiscussionGraph:
    """Rewrite a graph file with computed positions, sizes, and colors."""
    path = Path(path)
    doc = read_graph(path)
    apply_layout(doc, params)
    write_graph(doc, path)
    return doc
