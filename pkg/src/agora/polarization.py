"""Polarization scores: opinion-equilibrium index and random-walk controversy.

The equilibrium index solves (I + L) z = s on the symmetrized graph and
reports the mean squared equilibrium opinion, which lies in [0, 1] for
innate opinions in [-1, 1]. Random-walk controversy builds an absorbing
Markov chain whose absorbing states are the highest-strength nodes of each
side and combines the four side-to-side absorption probabilities.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import EmptySide, SolverDivergence, UnknownMetric
from .graph import DiscussionGraph, id_sort_key
from .opinion import opinion_vector, side_labels

log = logging.getLogger(__name__)

METRICS = ("fj", "rwc")

DEFAULT_K_TOP_FRACTION = 0.05
DEFAULT_WALKS_PER_SIDE = 100_000
MAX_WALK_STEPS = 100_000


@dataclass
class SymmetricWeightedGraph:
    """Symmetric nonnegative weights over a fixed node order."""

    nodes: list[str]
    matrix: sp.csr_matrix  # symmetric, zero diagonal

    def __post_init__(self):
        self.index = {node: i for i, node in enumerate(self.nodes)}

    @property
    def n(self) -> int:
        return len(self.nodes)

    def strengths(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def laplacian(self) -> sp.csr_matrix:
        return sp.diags(self.strengths()) - self.matrix

    @classmethod
    def from_pairs(
        cls, nodes: Sequence[str], weights: Mapping[tuple[str, str], float]
    ) -> "SymmetricWeightedGraph":
        order = sorted(nodes, key=id_sort_key)
        index = {node: i for i, node in enumerate(order)}
        rows, cols, vals = [], [], []
        for (u, v), w in weights.items():
            if u == v or w == 0:
                continue
            i, j = index[u], index[v]
            rows.extend((i, j))
            cols.extend((j, i))
            vals.extend((w, w))
        matrix = sp.csr_matrix(
            (vals, (rows, cols)), shape=(len(order), len(order)), dtype=float
        )
        matrix.sum_duplicates()
        return cls(nodes=order, matrix=matrix)


def symmetrize(graph: DiscussionGraph, kinds: Sequence[str] | None = None) -> SymmetricWeightedGraph:
    """Collapse directed typed edges into symmetric weights W(u,v) = w(u->v) + w(v->u)."""
    if kinds is not None and not list(kinds):
        raise ValueError("kinds must be nonempty")
    selected = set(kinds) if kinds is not None else None
    pair_weights: dict[tuple[str, str], float] = {}
    for (src, dst, kind), w in graph.edges.items():
        if selected is not None and kind not in selected:
            continue
        if src == dst:
            continue
        key = (src, dst) if id_sort_key(src) <= id_sort_key(dst) else (dst, src)
        pair_weights[key] = pair_weights.get(key, 0.0) + w
    return SymmetricWeightedGraph.from_pairs(list(graph.nodes), pair_weights)


# -- opinion equilibrium index -------------------------------------------------


def conjugate_gradient(
    matvec: Callable[[np.ndarray], np.ndarray],
    b: np.ndarray,
    tol: float,
    max_iter: int,
) -> tuple[np.ndarray, int, float]:
    """Plain CG for an SPD operator; returns (x, iterations, relative residual)."""
    b_norm = float(np.linalg.norm(b))
    x = np.zeros_like(b)
    if b_norm == 0.0:
        return x, 0, 0.0
    r = b.copy()
    p = r.copy()
    rs = float(r @ r)
    for iteration in range(1, max_iter + 1):
        ap = matvec(p)
        alpha = rs / float(p @ ap)
        x += alpha * p
        r -= alpha * ap
        rs_next = float(r @ r)
        if np.sqrt(rs_next) / b_norm <= tol:
            return x, iteration, np.sqrt(rs_next) / b_norm
        p = r + (rs_next / rs) * p
        rs = rs_next
    raise SolverDivergence(
        f"conjugate gradient did not reach tol={tol} within {max_iter} iterations"
    )


@dataclass
class FjResult:
    pi: float
    z: dict[str, float]
    diagnostics: dict[str, Any] = field(default_factory=dict)


def fj_polarization(
    sym: SymmetricWeightedGraph,
    s: Mapping[str, float],
    tol: float = 1e-10,
) -> FjResult:
    """Equilibrium opinions z = (I+L)^-1 s and the index pi = ||z||^2 / n."""
    if sym.n < 1:
        raise ValueError("graph must have at least one node")
    missing = [node for node in sym.nodes if node not in s]
    if missing:
        raise ValueError(f"innate opinion missing for {len(missing)} nodes, e.g. {missing[0]!r}")
    s_vec = np.array([float(s[node]) for node in sym.nodes])
    laplacian = sym.laplacian()

    def matvec(v: np.ndarray) -> np.ndarray:
        return v + laplacian @ v

    z_vec, iterations, residual = conjugate_gradient(
        matvec, s_vec, tol=tol, max_iter=10 * sym.n
    )
    # report the true residual, not the recurrence estimate
    if float(np.linalg.norm(s_vec)) > 0:
        residual = float(np.linalg.norm(s_vec - matvec(z_vec)) / np.linalg.norm(s_vec))
    pi = float(z_vec @ z_vec) / sym.n
    return FjResult(
        pi=pi,
        z={node: float(z) for node, z in zip(sym.nodes, z_vec)},
        diagnostics={
            "cg_iterations": iterations,
            "cg_residual": residual,
            "z_norm_sq": float(z_vec @ z_vec),
        },
    )


# -- random walk controversy ----------------------------------------------------


@dataclass
class _Chain:
    """Absorbing chain over the labeled, positive-strength subgraph."""

    nodes: list[str]  # chain node ids, matrix order
    sides: np.ndarray  # 0 (X) or 1 (Y) per chain node
    absorbing: np.ndarray  # bool per chain node
    matrix: sp.csr_matrix  # symmetric weights restricted to chain nodes
    strengths: np.ndarray
    diagnostics: dict[str, Any]


def _build_chain(
    sym: SymmetricWeightedGraph,
    labels: Mapping[str, int | None],
    k_top: int | None,
    k_top_fraction: float = DEFAULT_K_TOP_FRACTION,
) -> _Chain:
    side_of = np.full(sym.n, -1, dtype=int)
    for node, group in labels.items():
        if group in (0, 1) and node in sym.index:
            side_of[sym.index[node]] = group
    labeled_idx = np.flatnonzero(side_of >= 0)
    excluded_unlabeled = sym.n - len(labeled_idx)

    sub = sym.matrix[labeled_idx][:, labeled_idx].tocsr()
    strengths = np.asarray(sub.sum(axis=1)).ravel()
    keep = strengths > 0
    excluded_isolated = int((~keep).sum())
    kept_idx = np.flatnonzero(keep)
    sub = sub[kept_idx][:, kept_idx].tocsr()
    nodes = [sym.nodes[labeled_idx[i]] for i in kept_idx]
    sides = side_of[labeled_idx][kept_idx]
    strengths = strengths[kept_idx]

    if not (sides == 0).any() or not (sides == 1).any():
        raise EmptySide("both sides need at least one labeled, connected node")

    absorbing = np.zeros(len(nodes), dtype=bool)
    absorbing_per_side = {}
    for side in (0, 1):
        members = np.flatnonzero(sides == side)
        k = k_top if k_top is not None else max(1, round(k_top_fraction * len(members)))
        if k < 1:
            raise ValueError("k_top must be >= 1")
        k = min(k, len(members))
        ranked = sorted(members, key=lambda i: (-strengths[i], id_sort_key(nodes[i])))
        absorbing[ranked[:k]] = True
        absorbing_per_side["x" if side == 0 else "y"] = k

    return _Chain(
        nodes=nodes,
        sides=sides,
        absorbing=absorbing,
        matrix=sub,
        strengths=strengths,
        diagnostics={
            "excluded_unlabeled": excluded_unlabeled,
            "excluded_isolated": excluded_isolated,
            "absorbing_per_side": absorbing_per_side,
        },
    )


def _reachable_from_absorbers(chain: _Chain) -> np.ndarray:
    """Chain nodes connected (over any edges) to at least one absorbing node."""
    n = len(chain.nodes)
    seen = chain.absorbing.copy()
    frontier = list(np.flatnonzero(chain.absorbing))
    indptr, indices = chain.matrix.indptr, chain.matrix.indices
    while frontier:
        node = frontier.pop()
        for neighbor in indices[indptr[node]:indptr[node + 1]]:
            if not seen[neighbor]:
                seen[neighbor] = True
                frontier.append(neighbor)
    return seen


@dataclass
class RwcResult:
    rwc: float
    p: dict[str, float]  # absorption probabilities: xx, xy, yx, yy
    diagnostics: dict[str, Any] = field(default_factory=dict)


def rwc_exact(
    sym: SymmetricWeightedGraph,
    labels: Mapping[str, int | None],
    k_top: int | None = None,
    k_top_fraction: float = DEFAULT_K_TOP_FRACTION,
) -> RwcResult:
    """Controversy from exact absorption probabilities of the side-anchored chain.

    Absorption probabilities solve (I - Q) F = R where Q and R are the
    transient-to-transient and transient-to-absorbing blocks of the transition
    matrix. Transient nodes disconnected from every absorber keep absorption
    probability zero; their mass is reported, not an error.
    """
    chain = _build_chain(sym, labels, k_top, k_top_fraction)
    n = len(chain.nodes)
    reachable = _reachable_from_absorbers(chain)
    transient = np.flatnonzero(~chain.absorbing & reachable)
    absorbing = np.flatnonzero(chain.absorbing)
    disconnected = np.flatnonzero(~chain.absorbing & ~reachable)

    # F[i, j]: probability a walk from transient i is absorbed at absorbing j
    full_absorption = np.zeros((n, len(absorbing)))
    if len(transient):
        probs = chain.matrix.multiply(1.0 / chain.strengths[:, None]).tocsr()
        q = probs[transient][:, transient]
        r = probs[transient][:, absorbing]
        identity = sp.identity(len(transient), format="csc")
        if len(transient) <= 1500:
            f = np.linalg.solve((identity - q).toarray(), r.toarray())
        else:
            f = spla.spsolve((identity - q).tocsc(), sp.csc_matrix(r)).toarray()
        full_absorption[transient] = f
    for row, j in enumerate(absorbing):
        full_absorption[j, row] = 1.0

    absorber_side = chain.sides[absorbing]
    into_x = full_absorption[:, absorber_side == 0].sum(axis=1)
    into_y = full_absorption[:, absorber_side == 1].sum(axis=1)
    side_x = chain.sides == 0
    side_y = chain.sides == 1
    p = {
        "xx": float(into_x[side_x].mean()),
        "xy": float(into_x[side_y].mean()),
        "yx": float(into_y[side_x].mean()),
        "yy": float(into_y[side_y].mean()),
    }
    diagnostics = dict(chain.diagnostics)
    diagnostics["disconnected_from_absorbers"] = int(len(disconnected))
    diagnostics["unabsorbed"] = {
        "x": float(1.0 - p["xx"] - p["yx"]),
        "y": float(1.0 - p["xy"] - p["yy"]),
    }
    return RwcResult(rwc=p["xx"] * p["yy"] - p["yx"] * p["xy"], p=p, diagnostics=diagnostics)


def rwc_monte_carlo(
    sym: SymmetricWeightedGraph,
    labels: Mapping[str, int | None],
    k_top: int | None = None,
    walks_per_side: int = DEFAULT_WALKS_PER_SIDE,
    seed: int = 0,
    k_top_fraction: float = DEFAULT_K_TOP_FRACTION,
    max_steps: int = MAX_WALK_STEPS,
) -> RwcResult:
    """Seeded random-walk estimate of the controversy score.

    Walks start uniformly on each side and step proportionally to edge weight
    until they hit an absorbing node; a walk that exceeds `max_steps` counts
    as unabsorbed. Same seed, same estimate.
    """
    if walks_per_side < 1:
        raise ValueError("walks_per_side must be >= 1")
    chain = _build_chain(sym, labels, k_top, k_top_fraction)
    n = len(chain.nodes)
    rng = np.random.default_rng(seed)

    probs = chain.matrix.multiply(1.0 / chain.strengths[:, None]).tocsr()
    cumulative = np.cumsum(np.asarray(probs.todense()), axis=1)

    absorb_side = np.where(chain.absorbing, chain.sides, -1)
    # transitions never leave an absorber-free component, so a walk starting
    # in one is unabsorbable: settle it now instead of stepping it to the cap
    reachable = _reachable_from_absorbers(chain)

    counts = np.zeros((2, 2), dtype=np.int64)  # [start side, absorbed side]
    capped = {"x": 0, "y": 0}
    for side in (0, 1):
        members = np.flatnonzero(chain.sides == side)
        state = members[rng.integers(0, len(members), size=walks_per_side)]
        absorbed = absorb_side[state]
        active = (absorbed < 0) & reachable[state]
        stranded = int(((absorbed < 0) & ~reachable[state]).sum())
        for _ in range(max_steps):
            if not active.any():
                break
            current = state[active]
            draws = rng.random(len(current))
            nxt = np.empty(len(current), dtype=np.int64)
            order = np.argsort(current, kind="stable")
            sorted_nodes = current[order]
            boundaries = np.flatnonzero(np.diff(sorted_nodes)) + 1
            start = 0
            for stop in list(boundaries) + [len(sorted_nodes)]:
                node = sorted_nodes[start]
                segment = order[start:stop]
                row = cumulative[node]
                picks = np.searchsorted(row, draws[segment] * row[-1], side="right")
                nxt[segment] = np.minimum(picks, n - 1)
                start = stop
            state[active] = nxt
            landed = absorb_side[state[active]]
            hit = landed >= 0
            absorbed_now = np.flatnonzero(active)[hit]
            absorbed[absorbed_now] = landed[hit]
            active[absorbed_now] = False
        for absorb in (0, 1):
            counts[side, absorb] = int((absorbed == absorb).sum())
        capped["x" if side == 0 else "y"] = int(active.sum()) + stranded

    p = {
        "xx": counts[0, 0] / walks_per_side,
        "xy": counts[1, 0] / walks_per_side,
        "yx": counts[0, 1] / walks_per_side,
        "yy": counts[1, 1] / walks_per_side,
    }
    diagnostics = dict(chain.diagnostics)
    diagnostics["walks_per_side"] = walks_per_side
    diagnostics["capped_walks"] = capped
    return RwcResult(rwc=p["xx"] * p["yy"] - p["yx"] * p["xy"], p=p, diagnostics=diagnostics)


# -- dispatch --------------------------------------------------------------------


@dataclass
class PolarizationResult:
    scores: dict[str, float]
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"scores": self.scores, "diagnostics": self.diagnostics}


def get_polarization(
    graph: DiscussionGraph,
    metrics: Sequence[str],
    kinds: Sequence[str] | None = None,
    k_top: int | None = None,
    k_top_fraction: float = DEFAULT_K_TOP_FRACTION,
    include_equilibrium: bool = False,
    rwc_method: str = "exact",
    walks_per_side: int = DEFAULT_WALKS_PER_SIDE,
    seed: int = 0,
) -> PolarizationResult:
    """Compute the requested metrics on a labeled graph with default parameters."""
    unknown = [m for m in metrics if m not in METRICS]
    if unknown:
        raise UnknownMetric(f"unknown metric {unknown[0]!r}; available: {', '.join(METRICS)}")
    if rwc_method not in ("exact", "monte-carlo"):
        raise ValueError(f"rwc_method must be 'exact' or 'monte-carlo', got {rwc_method!r}")
    result = PolarizationResult(scores={})
    if not metrics:
        return result
    sym = symmetrize(graph, kinds)
    seen = set()
    for metric in metrics:
        if metric in seen:
            continue
        seen.add(metric)
        if metric == "fj":
            fj = fj_polarization(sym, opinion_vector(graph))
            result.scores["fj"] = fj.pi
            result.diagnostics["fj"] = dict(fj.diagnostics)
            if include_equilibrium:
                result.diagnostics["fj"]["z"] = fj.z
        elif rwc_method == "exact":
            rwc = rwc_exact(sym, side_labels(graph), k_top, k_top_fraction)
            result.scores["rwc"] = rwc.rwc
            result.diagnostics["rwc"] = {**rwc.diagnostics, "p": rwc.p}
        else:
            rwc = rwc_monte_carlo(
                sym, side_labels(graph), k_top,
                walks_per_side=walks_per_side, seed=seed,
                k_top_fraction=k_top_fraction,
            )
            result.scores["rwc"] = rwc.rwc
            result.diagnostics["rwc"] = {**rwc.diagnostics, "p": rwc.p}
    return result
