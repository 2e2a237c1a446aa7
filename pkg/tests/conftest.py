import json
from datetime import datetime, timedelta, timezone

import pytest

from agora.graph import DiscussionGraph, EDGE_KINDS
from agora.records import format_timestamp
from agora.store import Store

BASE_TIME = datetime(2023, 3, 1, tzinfo=timezone.utc)


def api_user(uid, username=None, name=None, followers=0):
    return {
        "id": str(uid),
        "username": username or f"user{uid}",
        "name": name or f"User {uid}",
        "public_metrics": {"followers_count": followers},
    }


def api_tweet(tid, author, text="hello", offset=0, referenced=None, mentions=None,
              reply_to=None, lang="en"):
    obj = {
        "id": str(tid),
        "text": text,
        "author_id": str(author),
        "created_at": format_timestamp(BASE_TIME + timedelta(seconds=offset)),
        "lang": lang,
    }
    if referenced:
        obj["referenced_tweets"] = [{"type": k, "id": str(i)} for k, i in referenced]
    if mentions:
        obj["entities"] = {
            "mentions": [{"id": str(u), "username": n} for u, n in mentions]
        }
    if reply_to:
        obj["in_reply_to_user_id"] = str(reply_to)
    return obj


def make_page(tweets, users=(), ref_tweets=(), next_token=None):
    page = {
        "data": list(tweets),
        "includes": {"users": list(users), "tweets": list(ref_tweets)},
        "meta": {"result_count": len(tweets)},
    }
    if next_token:
        page["meta"]["next_token"] = next_token
    return page


def write_ndjson(path, objects):
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objects:
            fh.write(json.dumps(obj) + "\n")
    return path


@pytest.fixture
def store(tmp_path):
    return Store(tmp_path / "store")


def random_graph(rng, n_max=30, with_viz=False, with_metadata=True):
    """Random discussion graph with numeric ids and escaping-hostile strings."""
    n = int(rng.integers(1, n_max + 1))
    graph = DiscussionGraph()
    tricky = ['"quoted"', "amp & sand", "tab\tchar", "unicode λΩ", "plain"]
    for i in range(n):
        node_id = str(100 + i)
        graph.add_node(
            node_id,
            username=f"user_{i}_{tricky[int(rng.integers(0, len(tricky)))]}",
            display_name=f"Display {i}",
            followers_count=int(rng.integers(0, 10_000)),
            tweets_in_discussion=int(rng.integers(0, 50)),
        )
        if rng.random() < 0.5:
            graph.nodes[node_id]["opinion"] = ["group:0", "group:1", "ambiguous", "unlabeled"][
                int(rng.integers(0, 4))
            ]
    nodes = list(graph.nodes)
    for _ in range(int(rng.integers(0, 3 * n))):
        src, dst = rng.choice(nodes, size=2, replace=True)
        if src == dst:
            continue
        kind = EDGE_KINDS[int(rng.integers(0, len(EDGE_KINDS)))]
        graph.edges[(str(src), str(dst), kind)] = int(rng.integers(1, 9))
    if with_metadata:
        graph.metadata = {
            "query": "#fixture",
            "collected_from": "2023-03-01T00:00:00Z",
            "collected_to": "2023-03-01T01:00:00Z",
            "unresolved_references": int(rng.integers(0, 5)),
        }
    if with_viz:
        from agora.graph import NodeViz

        for node in nodes:
            graph.viz[node] = NodeViz(
                x=float(rng.uniform(0, 1000)),
                y=float(rng.uniform(0, 1000)),
                size=float(rng.uniform(1, 10)),
                color="#%02x%02x%02x" % tuple(int(c) for c in rng.integers(0, 256, 3)),
            )
    return graph


def random_symmetric(rng, n_max=50):
    """Random symmetric weighted graph for solver property tests."""
    from agora.polarization import SymmetricWeightedGraph

    n = int(rng.integers(1, n_max + 1))
    nodes = [str(i + 1) for i in range(n)]
    weights = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.2:
                weights[(nodes[i], nodes[j])] = float(rng.integers(1, 6))
    return SymmetricWeightedGraph.from_pairs(nodes, weights)
