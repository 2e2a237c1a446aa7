"""Discussion graph mining, polarization metrics, layout, and sharing."""

from .collect import RetryPolicy, get_followers, search_tweets
from .graph import DiscussionGraph, EDGE_KINDS, GraphOptions, create_graph, extract_interactions
from .layout import LayoutParams, apply_layout, create_layout, fr_layout
from .opinion import LabelStats, label_nodes, opinion_vector
from .polarization import (
    PolarizationResult,
    SymmetricWeightedGraph,
    fj_polarization,
    get_polarization,
    rwc_exact,
    rwc_monte_carlo,
    symmetrize,
)
from .records import CollectionReport, TweetBatch, TweetRecord, UserStub
from .sources import HttpTweetSource, ReplaySource, open_replay
from .store import Store, StoreStats

__version__ = "0.1.0"

__all__ = [
    "CollectionReport",
    "DiscussionGraph",
    "EDGE_KINDS",
    "GraphOptions",
    "HttpTweetSource",
    "LabelStats",
    "LayoutParams",
    "PolarizationResult",
    "ReplaySource",
    "RetryPolicy",
    "Store",
    "StoreStats",
    "SymmetricWeightedGraph",
    "TweetBatch",
    "TweetRecord",
    "UserStub",
    "apply_layout",
    "create_graph",
    "create_layout",
    "extract_interactions",
    "fj_polarization",
    "fr_layout",
    "get_followers",
    "get_polarization",
    "label_nodes",
    "open_replay",
    "opinion_vector",
    "rwc_exact",
    "rwc_monte_carlo",
    "search_tweets",
    "symmetrize",
]
