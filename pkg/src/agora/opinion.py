"""Opinion labeling from seed-account follower sets.

A node following exactly one seed joins that seed's group; following several
is ambiguous (conflicting signal, excluded from the +/-1 mapping); following
none leaves the node unlabeled but present, since it still mediates
interactions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Mapping, Sequence

from .errors import MoreThanTwoGroups
from .graph import DiscussionGraph

GROUP_PREFIX = "group:"
AMBIGUOUS = "ambiguous"
UNLABELED = "unlabeled"


def group_label(index: int) -> str:
    return f"{GROUP_PREFIX}{index}"


def parse_group(label: str) -> int | None:
    """Group index encoded in an opinion label, or None for non-group labels."""
    if isinstance(label, str) and label.startswith(GROUP_PREFIX):
        try:
            return int(label[len(GROUP_PREFIX):])
        except ValueError:
            return None
    return None


@dataclass(frozen=True)
class LabelStats:
    group_counts: tuple[int, ...]
    ambiguous: int
    unlabeled: int

    def to_json(self) -> dict:
        return {
            "groups": list(self.group_counts),
            "ambiguous": self.ambiguous,
            "unlabeled": self.unlabeled,
        }


def label_nodes(
    graph: DiscussionGraph,
    follower_sets: Sequence[tuple[str, AbstractSet[str]]],
) -> LabelStats:
    """Attach an opinion label to every node from ordered seed follower sets."""
    if len(follower_sets) < 2:
        raise ValueError("need follower sets for at least 2 seed accounts")
    counts = [0] * len(follower_sets)
    ambiguous = 0
    unlabeled = 0
    for node_id, attrs in graph.nodes.items():
        memberships = [i for i, (_, ids) in enumerate(follower_sets) if node_id in ids]
        if len(memberships) == 1:
            attrs["opinion"] = group_label(memberships[0])
            counts[memberships[0]] += 1
        elif memberships:
            attrs["opinion"] = AMBIGUOUS
            ambiguous += 1
        else:
            attrs["opinion"] = UNLABELED
            unlabeled += 1
    return LabelStats(tuple(counts), ambiguous, unlabeled)


def side_labels(graph: DiscussionGraph) -> dict[str, int | None]:
    """Node -> group index, None for ambiguous/unlabeled/missing labels."""
    return {
        node_id: parse_group(attrs.get("opinion", UNLABELED))
        for node_id, attrs in graph.nodes.items()
    }


def opinion_vector(graph: DiscussionGraph) -> dict[str, float]:
    """Innate opinions: group 0 -> +1, group 1 -> -1, everything else 0."""
    out: dict[str, float] = {}
    for node_id, attrs in graph.nodes.items():
        group = parse_group(attrs.get("opinion", UNLABELED))
        if group is not None and group > 1:
            raise MoreThanTwoGroups(
                f"node {node_id} belongs to group {group}; the +/-1 mapping needs exactly 2"
            )
        if group == 0:
            out[node_id] = 1.0
        elif group == 1:
            out[node_id] = -1.0
        else:
            out[node_id] = 0.0
    return out


def opinion_counts(labels: Mapping[str, int | None]) -> dict[int, int]:
    counts: dict[int, int] = {}
    for group in labels.values():
        if group is not None:
            counts[group] = counts.get(group, 0) + 1
    return counts
