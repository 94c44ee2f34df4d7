"""Community detection on word graphs via short random walks.

The walk runs on symmetrized weights a(u,v) = w(u,v) + w(v,u). Starting from
singleton communities, the two adjacent communities whose merge least
increases the Ward-style objective

    dsigma(C1, C2) = (1/n) * |C1||C2| / (|C1|+|C2|) * r2(C1, C2)
    r2(C1, C2)     = sum_k (P1_k - P2_k)^2 / d(k)

are merged repeatedly, where P_C is the community's averaged t-step
transition-probability row and d the vertex strengths. Among all merge
levels the partition with maximum weighted modularity

    Q = (1/2M) * sum_{u,v} [a(u,v) - d(u) d(v) / (2M)] * delta(c(u), c(v))

is returned. Vertices with zero strength never enter the walk; they come
back as singleton communities. Everything is exact probability propagation,
so results are deterministic.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

from topicwalk.graph import WordGraph

DEFAULT_WALK_LENGTH = 4
DEFAULT_TOP_K = 5
DEFAULT_MIN_DEGREE = 10


@dataclass(frozen=True)
class CommunityInfo:
    id: int
    members: tuple[str, ...]
    vertex_count: int
    edge_count: int
    cluster_pct: float


@dataclass(frozen=True)
class Partition:
    source: str
    window_index: int
    modularity: float
    communities: tuple[CommunityInfo, ...]


@dataclass(frozen=True)
class WordCloud:
    community_id: int
    entries: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class MergeStep:
    """One agglomeration step: the two member-index sets merged and the
    dsigma value the incremental bookkeeping assigned to the pair."""

    left: frozenset[int]
    right: frozenset[int]
    dsigma: float


class WalkModel:
    """Dense t-step walk probabilities over the graph's non-isolated part."""

    def __init__(self, graph: WordGraph, t: int = DEFAULT_WALK_LENGTH):
        if t <= 0:
            raise ValueError(f"walk length t must be positive, got {t}")
        self.t = t

        strength: dict[str, int] = {tok: 0 for tok in graph.vertices}
        for (u, v), w in graph.edges.items():
            strength[u] += w
            strength[v] += w

        self.isolated = sorted(tok for tok, s in strength.items() if s == 0)
        self.tokens = sorted(tok for tok, s in strength.items() if s > 0)
        self.index = {tok: i for i, tok in enumerate(self.tokens)}
        n = len(self.tokens)
        self.n = n
        self.two_m = float(sum(strength.values()))

        if n == 0:
            self.a = sparse.csr_matrix((0, 0))
            self.d = np.zeros(0)
            self.pt = np.zeros((0, 0))
            return

        rows, cols, vals = [], [], []
        for (u, v), w in graph.edges.items():
            i, j = self.index[u], self.index[v]
            rows.extend((i, j))
            cols.extend((j, i))
            vals.extend((float(w), float(w)))
        self.a = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
        self.a.sum_duplicates()
        self.d = np.asarray(self.a.sum(axis=1)).ravel()

        p = sparse.diags(1.0 / self.d) @ self.a
        p = p.tocsr()
        pt = p.toarray()
        for _ in range(t - 1):
            pt = p @ pt
        self.pt = pt


def _sym_edges(model: WalkModel) -> list[tuple[int, int, float]]:
    coo = model.a.tocoo()
    return [(int(i), int(j), float(w)) for i, j, w in zip(coo.row, coo.col, coo.data) if i < j]


@dataclass
class WalktrapResult:
    model: WalkModel
    merges: list[MergeStep]
    q_levels: list[float]
    best_level: int
    partition: Partition


def _agglomerate(model: WalkModel) -> tuple[list[MergeStep], list[float]]:
    n = model.n
    pt, d, two_m = model.pt, model.d, model.two_m
    inv_d = 1.0 / d

    size = {i: 1 for i in range(n)}
    pvec = {i: pt[i] for i in range(n)}
    members: dict[int, tuple[int, ...]] = {i: (i,) for i in range(n)}
    min_member = {i: i for i in range(n)}
    tot = {i: float(d[i]) for i in range(n)}
    neigh_ds: dict[int, dict[int, float]] = {i: {} for i in range(n)}
    cross: dict[int, dict[int, float]] = {i: {} for i in range(n)}
    alive = set(range(n))

    def direct_dsigma(c1: int, c2: int) -> float:
        diff = pvec[c1] - pvec[c2]
        r2 = float(np.dot(diff * diff, inv_d))
        return size[c1] * size[c2] / (size[c1] + size[c2]) / n * r2

    heap: list[tuple[float, int, int, int, int]] = []
    for i, j, w in _sym_edges(model):
        cross[i][j] = w
        cross[j][i] = w
        ds = direct_dsigma(i, j)
        neigh_ds[i][j] = ds
        neigh_ds[j][i] = ds
        heapq.heappush(heap, (ds, i, j, i, j))

    q = float(-np.dot(d / two_m, d / two_m))
    q_levels = [q]
    merges: list[MergeStep] = []
    next_cid = n

    while heap:
        ds, _, _, c1, c2 = heapq.heappop(heap)
        if c1 not in alive or c2 not in alive:
            continue
        merges.append(MergeStep(frozenset(members[c1]), frozenset(members[c2]), ds))

        c3 = next_cid
        next_cid += 1
        s1, s2 = size[c1], size[c2]
        cw = cross[c1].get(c2, 0.0)
        q += 2.0 * cw / two_m - 2.0 * tot[c1] * tot[c2] / (two_m * two_m)
        q_levels.append(q)

        size[c3] = s1 + s2
        pvec[c3] = (s1 * pvec[c1] + s2 * pvec[c2]) / (s1 + s2)
        del pvec[c1], pvec[c2]  # dead rows would hold O(n^2) memory overall
        members[c3] = members[c1] + members[c2]
        min_member[c3] = min(min_member[c1], min_member[c2])
        tot[c3] = tot[c1] + tot[c2]
        neigh_ds[c3] = {}
        cross[c3] = {}

        neighbors: dict[int, tuple[float | None, float | None]] = {}
        for nb, v in neigh_ds[c1].items():
            if nb in alive and nb != c2:
                neighbors[nb] = (v, None)
        for nb, v in neigh_ds[c2].items():
            if nb in alive and nb != c1:
                prev = neighbors.get(nb, (None, None))
                neighbors[nb] = (prev[0], v)

        alive.discard(c1)
        alive.discard(c2)
        alive.add(c3)

        for nb, (ds1, ds2) in sorted(neighbors.items()):
            if ds1 is not None and ds2 is not None:
                # Ward update for a community adjacent to both halves.
                sc = size[nb]
                nds = ((s1 + sc) * ds1 + (s2 + sc) * ds2 - sc * ds) / (s1 + s2 + sc)
            else:
                nds = direct_dsigma(c3, nb)
            neigh_ds[c3][nb] = nds
            neigh_ds[nb][c3] = nds
            cross[c3][nb] = cross[c1].get(nb, 0.0) + cross[c2].get(nb, 0.0)
            cross[nb][c3] = cross[c3][nb]
            mm = min(min_member[c3], min_member[nb])
            om = max(min_member[c3], min_member[nb])
            heapq.heappush(heap, (nds, mm, om, c3, nb))

    return merges, q_levels


def _communities_at_level(n: int, merges: list[MergeStep], level: int) -> list[set[int]]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for step in merges[:level]:
        ra, rb = find(min(step.left)), find(min(step.right))
        parent[max(ra, rb)] = min(ra, rb)

    groups: dict[int, set[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), set()).add(i)
    return list(groups.values())


def _rank_and_package(graph: WordGraph, communities: list[set[str]]) -> tuple[CommunityInfo, ...]:
    comm_of: dict[str, int] = {}
    for ci, comm in enumerate(communities):
        for tok in comm:
            comm_of[tok] = ci
    edge_counts = [0] * len(communities)
    for (u, v) in graph.edges:
        if comm_of[u] == comm_of[v]:
            edge_counts[comm_of[u]] += 1

    packaged = []
    for ci, comm in enumerate(communities):
        members = tuple(sorted(comm))
        packaged.append((len(members), edge_counts[ci], members))
    packaged.sort(key=lambda item: (-item[0], -item[1], item[2][0]))

    total = graph.n
    return tuple(
        CommunityInfo(
            id=rank,
            members=members,
            vertex_count=vc,
            edge_count=ec,
            cluster_pct=round(100.0 * vc / total, 2),
        )
        for rank, (vc, ec, members) in enumerate(packaged, start=1)
    )


def walktrap_result(graph: WordGraph, t: int = DEFAULT_WALK_LENGTH) -> WalktrapResult:
    """Full agglomeration trace plus the modularity-optimal partition."""
    model = WalkModel(graph, t)

    if graph.n == 0:
        partition = Partition(graph.source, graph.window.index, 0.0, ())
        return WalktrapResult(model, [], [0.0], 0, partition)

    merges, q_levels = _agglomerate(model)

    best = 0
    for i, qv in enumerate(q_levels):
        if qv > q_levels[best]:
            best = i

    walk_groups = _communities_at_level(model.n, merges, best)
    communities = [{model.tokens[i] for i in group} for group in walk_groups]
    communities.extend({tok} for tok in model.isolated)

    q = modularity(graph, communities)
    packaged = _rank_and_package(graph, communities)
    partition = Partition(graph.source, graph.window.index, q, packaged)
    return WalktrapResult(model, merges, q_levels, best, partition)


def walktrap(graph: WordGraph, t: int = DEFAULT_WALK_LENGTH) -> Partition:
    """Cluster the graph and return the modularity-optimal partition."""
    return walktrap_result(graph, t).partition


def modularity(graph: WordGraph, communities: list[set[str]] | tuple) -> float:
    """Weighted modularity of a disjoint cover, on symmetrized weights."""
    strength: dict[str, float] = {tok: 0.0 for tok in graph.vertices}
    for (u, v), w in graph.edges.items():
        strength[u] += w
        strength[v] += w
    two_m = sum(strength.values())
    if two_m == 0:
        return 0.0

    comm_of: dict[str, int] = {}
    for ci, comm in enumerate(communities):
        for tok in comm:
            comm_of[tok] = ci

    internal = [0.0] * len(communities)
    totals = [0.0] * len(communities)
    for (u, v), w in graph.edges.items():
        if comm_of[u] == comm_of[v]:
            internal[comm_of[u]] += 2.0 * w
    for tok, s in strength.items():
        totals[comm_of[tok]] += s

    return sum(
        inw / two_m - (tw / two_m) ** 2 for inw, tw in zip(internal, totals)
    )


def top_communities(
    partition: Partition, k: int = DEFAULT_TOP_K, min_pct: float = 0.0
) -> list[CommunityInfo]:
    """The k largest communities (by vertices, then internal edges, then
    smallest member token), after dropping those below min_pct percent."""
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    kept = [c for c in partition.communities if c.cluster_pct >= min_pct]
    return kept[:k]


def wordcloud(
    graph: WordGraph,
    community: set[str] | tuple[str, ...],
    community_id: int = 0,
    min_degree: int = DEFAULT_MIN_DEGREE,
) -> WordCloud:
    """Word-cloud weights for one community: each member's symmetrized
    strength inside the community subgraph, keeping only weights above
    min_degree, heaviest first."""
    members = set(community)
    unknown = members - graph.vertices
    if unknown:
        raise ValueError(f"community members not in graph: {sorted(unknown)[:3]}")
    weight: dict[str, int] = {tok: 0 for tok in members}
    for (u, v), w in graph.edges.items():
        if u in members and v in members:
            weight[u] += w
            weight[v] += w
    entries = [(tok, w) for tok, w in weight.items() if w > min_degree]
    entries.sort(key=lambda e: (-e[1], e[0]))
    return WordCloud(community_id=community_id, entries=tuple(entries))


def partition_to_json(partition: Partition) -> dict:
    return {
        "source": partition.source,
        "window_index": partition.window_index,
        "Q": partition.modularity,
        "communities": [
            {
                "id": c.id,
                "vertex_count": c.vertex_count,
                "edge_count": c.edge_count,
                "cluster_pct": c.cluster_pct,
                "members": list(c.members),
            }
            for c in partition.communities
        ],
    }


def partition_from_json(payload: dict) -> Partition:
    return Partition(
        source=payload["source"],
        window_index=payload["window_index"],
        modularity=payload["Q"],
        communities=tuple(
            CommunityInfo(
                id=c["id"],
                members=tuple(c["members"]),
                vertex_count=c["vertex_count"],
                edge_count=c["edge_count"],
                cluster_pct=c["cluster_pct"],
            )
            for c in payload["communities"]
        ),
    )


def write_partition_json(partition: Partition, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(partition_to_json(partition), fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def read_partition_json(path: str | Path) -> Partition:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"expected partition file not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        return partition_from_json(json.load(fh))


def write_wordclouds_json(clouds: list[WordCloud], path: str | Path) -> None:
    payload = [
        {"community_id": c.community_id, "entries": [[tok, w] for tok, w in c.entries]}
        for c in clouds
    ]
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
