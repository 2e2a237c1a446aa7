"""Typed, weighted interaction graphs extracted from stored discussions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .records import TweetRecord, format_timestamp

EDGE_KINDS = ("retweet", "quote", "reply", "mention")

_REFERENCE_TO_KIND = {"retweeted": "retweet", "quoted": "quote", "replied_to": "reply"}

# fallback kind for edges read from foreign files that carry none
UNKNOWN_KIND = "unknown"


def id_sort_key(node_id: str):
    """Numeric order for decimal ids, lexicographic for anything else."""
    if node_id.isdigit():
        return (0, int(node_id), "")
    return (1, 0, node_id)


@dataclass(frozen=True)
class GraphOptions:
    """Selects which interaction kinds become edges and how they are pruned."""

    edge_kinds: tuple[str, ...] = EDGE_KINDS
    min_weight: int = 1
    drop_isolated: bool = False

    def __post_init__(self):
        if not self.edge_kinds:
            raise ValueError("edge_kinds must be nonempty")
        unknown = set(self.edge_kinds) - set(EDGE_KINDS)
        if unknown:
            raise ValueError(f"unknown edge kinds: {sorted(unknown)}")
        if self.min_weight < 1:
            raise ValueError("min_weight must be >= 1")


@dataclass
class NodeViz:
    """Per-node visual state carried through the file formats."""

    x: float
    y: float
    size: float | None = None
    color: str | None = None  # "#rrggbb"


class DiscussionGraph:
    """Directed multigraph collapsed to (src, dst, kind) -> weight."""

    def __init__(self, metadata: dict[str, Any] | None = None):
        self.nodes: dict[str, dict[str, Any]] = {}
        self.edges: dict[tuple[str, str, str], int] = {}
        self.metadata: dict[str, Any] = metadata or {}
        self.viz: dict[str, NodeViz] = {}

    # -- construction ----------------------------------------------------------

    def add_node(self, node_id: str, **attrs) -> dict[str, Any]:
        node = self.nodes.setdefault(
            node_id,
            {"username": "", "display_name": "", "followers_count": 0, "tweets_in_discussion": 0},
        )
        node.update({k: v for k, v in attrs.items() if v is not None})
        return node

    def add_edge(self, src: str, dst: str, kind: str, weight: int = 1) -> None:
        if src == dst:
            return
        self.add_node(src)
        self.add_node(dst)
        key = (src, dst, kind)
        self.edges[key] = self.edges.get(key, 0) + weight

    # -- views -----------------------------------------------------------------

    def sorted_nodes(self) -> list[str]:
        return sorted(self.nodes, key=id_sort_key)

    def sorted_edges(self) -> list[tuple[str, str, str]]:
        return sorted(
            self.edges, key=lambda e: (id_sort_key(e[0]), id_sort_key(e[1]), e[2])
        )

    def strength(self, node_id: str) -> float:
        """Total incident edge weight, both directions, all kinds."""
        total = 0
        for (src, dst, _), w in self.edges.items():
            if src == node_id or dst == node_id:
                total += w
        return float(total)

    def strengths(self) -> dict[str, float]:
        out = dict.fromkeys(self.nodes, 0.0)
        for (src, dst, _), w in self.edges.items():
            out[src] += w
            out[dst] += w
        return out

    def edge_kind_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for (_, _, kind), w in self.edges.items():
            counts[kind] = counts.get(kind, 0) + w
        return counts

    def has_positions(self) -> bool:
        return bool(self.viz) and all(n in self.viz for n in self.nodes)

    def validate(self) -> list[str]:
        """Structural invariant violations, empty when the graph is sound."""
        problems = []
        for (src, dst, kind), w in self.edges.items():
            if src not in self.nodes or dst not in self.nodes:
                problems.append(f"edge ({src},{dst},{kind}) has a missing endpoint")
            if src == dst:
                problems.append(f"self-loop on {src}")
            if w < 1:
                problems.append(f"edge ({src},{dst},{kind}) has weight {w} < 1")
        if self.viz and not all(n in self.viz for n in self.nodes):
            problems.append("some nodes carry positions but not all")
        return problems

    def equals(self, other: "DiscussionGraph", pos_tol: float = 0.0) -> bool:
        """Structural equality; positions compared within `pos_tol`."""
        if self.nodes != other.nodes or self.edges != other.edges:
            return False
        if self.metadata != other.metadata:
            return False
        if set(self.viz) != set(other.viz):
            return False
        for node, viz in self.viz.items():
            o = other.viz[node]
            if abs(viz.x - o.x) > pos_tol or abs(viz.y - o.y) > pos_tol:
                return False
            if (viz.size is None) != (o.size is None):
                return False
            if viz.size is not None and not math.isclose(viz.size, o.size, abs_tol=pos_tol or 1e-12):
                return False
            if viz.color != o.color:
                return False
        return True

    def summary(self) -> dict[str, Any]:
        return {
            "nodes": len(self.nodes),
            "edges": len(self.edges),
            "kinds": self.edge_kind_counts(),
            "unresolved_references": self.metadata.get("unresolved_references", 0),
        }


def extract_interactions(
    tweet: TweetRecord, resolve: Mapping[str, str]
) -> tuple[list[tuple[str, str, str]], int]:
    """Interactions (src, dst, kind) encoded in one tweet.

    `resolve` maps referenced tweet ids to their author ids (from stored
    expansions). Unresolvable references are counted, never fabricated, and
    self-interactions are dropped. A retweet's raw entities duplicate the
    retweeted author as a leading mention; that one mention is suppressed
    because the retweet edge already encodes the interaction.
    """
    out: list[tuple[str, str, str]] = []
    unresolved = 0
    retweeted_author: str | None = None
    has_retweet_ref = False
    for ref_kind, ref_id in tweet.referenced:
        target = resolve.get(ref_id)
        if ref_kind == "retweeted":
            has_retweet_ref = True
        if target is None:
            unresolved += 1
            continue
        if ref_kind == "retweeted":
            retweeted_author = target
        if target != tweet.author_id:
            out.append((tweet.author_id, target, _REFERENCE_TO_KIND[ref_kind]))

    suppressed = False
    for position, (uid, _username) in enumerate(tweet.mentions):
        if not suppressed and has_retweet_ref:
            # the duplicate is the mention of the retweeted author, or simply
            # the leading mention when the reference could not be resolved
            if (retweeted_author is not None and uid == retweeted_author) or (
                retweeted_author is None and position == 0
            ):
                suppressed = True
                continue
        if uid != tweet.author_id:
            out.append((tweet.author_id, uid, "mention"))
    return out, unresolved


def create_graph(key: str, store, options: GraphOptions | None = None) -> DiscussionGraph:
    """Assemble the interaction graph of one stored discussion."""
    options = options or GraphOptions()
    store.require_discussion(key)
    records = list(store.iter_tweets(key))
    stubs = store.users(key)

    resolve: dict[str, str] = {}
    for ref_id, rec in store.referenced_tweets(key).items():
        resolve[ref_id] = rec.author_id
    for rec in records:
        resolve[rec.id] = rec.author_id

    graph = DiscussionGraph(
        metadata={
            "query": normalized_query(key),
            "collected_from": format_timestamp(records[0].created_at) if records else "",
            "collected_to": format_timestamp(records[-1].created_at) if records else "",
            "unresolved_references": 0,
        }
    )

    mention_names: dict[str, str] = {}
    tweet_counts: dict[str, int] = {}
    unresolved_total = 0
    interactions: dict[tuple[str, str, str], int] = {}
    for rec in records:
        tweet_counts[rec.author_id] = tweet_counts.get(rec.author_id, 0) + 1
        for uid, username in rec.mentions:
            if username:
                mention_names.setdefault(uid, username)
        extracted, unresolved = extract_interactions(rec, resolve)
        unresolved_total += unresolved
        for src, dst, kind in extracted:
            if kind not in options.edge_kinds:
                continue
            interactions[(src, dst, kind)] = interactions.get((src, dst, kind), 0) + 1
    graph.metadata["unresolved_references"] = unresolved_total

    for author in tweet_counts:
        graph.add_node(author)
    for (src, dst, kind), weight in interactions.items():
        if weight >= options.min_weight:
            graph.add_edge(src, dst, kind, weight)

    for node_id, node in graph.nodes.items():
        stub = stubs.get(node_id)
        if stub is not None:
            node["username"] = stub.username
            node["display_name"] = stub.display_name
            node["followers_count"] = stub.followers_count
        elif node_id in mention_names:
            node["username"] = mention_names[node_id]
        node["tweets_in_discussion"] = tweet_counts.get(node_id, 0)

    if options.drop_isolated:
        linked = {n for edge in graph.edges for n in edge[:2]}
        for node_id in list(graph.nodes):
            if node_id not in linked:
                del graph.nodes[node_id]

    return graph


def normalized_query(key: str) -> str:
    return key.strip().lower()


def induced_subgraph(graph: DiscussionGraph, nodes: Iterable[str]) -> DiscussionGraph:
    """Copy of `graph` restricted to `nodes` (attributes and viz included)."""
    keep = set(nodes)
    sub = DiscussionGraph(metadata=dict(graph.metadata))
    for node_id in keep:
        if node_id in graph.nodes:
            sub.add_node(node_id, **graph.nodes[node_id])
            if node_id in graph.viz:
                sub.viz[node_id] = graph.viz[node_id]
    for (src, dst, kind), w in graph.edges.items():
        if src in keep and dst in keep:
            sub.edges[(src, dst, kind)] = w
    return sub
