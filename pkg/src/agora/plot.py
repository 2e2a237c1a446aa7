"""Static figure rendering of laid-out graph documents."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.collections import LineCollection

from .graph import DiscussionGraph
from .layout import LayoutParams, apply_layout


def render_figure(
    doc: DiscussionGraph,
    out_path: str | Path,
    dpi: int = 150,
    layout_params: LayoutParams | None = None,
) -> Path:
    """Draw nodes at their stored positions and save the figure.

    Documents without positions get a layout first (seeded defaults), so the
    command works directly on freshly exported graphs.
    """
    out_path = Path(out_path)
    if not doc.has_positions():
        apply_layout(doc, layout_params)

    xs, ys, sizes, colors = [], [], [], []
    for node in doc.sorted_nodes():
        viz = doc.viz[node]
        xs.append(viz.x)
        ys.append(viz.y)
        sizes.append(((viz.size or 2.0) * 2.0) ** 2)
        colors.append(viz.color or "#999999")

    segments = []
    for src, dst, _kind in doc.sorted_edges():
        a, b = doc.viz[src], doc.viz[dst]
        segments.append(((a.x, a.y), (b.x, b.y)))

    fig, ax = plt.subplots(figsize=(10, 10))
    if segments:
        ax.add_collection(LineCollection(segments, colors="#777777", linewidths=0.4, alpha=0.35, zorder=1))
    ax.scatter(xs, ys, s=sizes, c=colors, alpha=0.9, linewidths=0, zorder=2)
    ax.set_aspect("equal")
    ax.axis("off")
    title = doc.metadata.get("query") or ""
    if title:
        ax.set_title(f"{title} ({len(doc.nodes)} users, {len(doc.edges)} edges)")
    fig.tight_layout()
    fig.savefig(out_path, dpi=dpi)
    plt.close(fig)
    return out_path
