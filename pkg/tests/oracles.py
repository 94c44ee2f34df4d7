"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written as direct, brute-force evaluations
of the definitions, sharing no code path with the implementations under
test.
"""

from __future__ import annotations

import math
from datetime import datetime, timezone

from topicwalk.graph import Window, WordGraph

WINDOW = Window(
    index=1,
    start=datetime(2020, 1, 1, tzinfo=timezone.utc),
    end=datetime(2020, 1, 16, tzinfo=timezone.utc),
)


def graph_from_edges(edges, extra_vertices=(), source="s"):
    """Build a WordGraph directly from (u, v) or (u, v, w) tuples."""
    g = WordGraph(source=source, window=WINDOW)
    for edge in edges:
        u, v, w = edge if len(edge) == 3 else (*edge, 1)
        g.vertices.add(u)
        g.vertices.add(v)
        g.edges[(u, v)] = g.edges.get((u, v), 0) + w
    for tok in extra_vertices:
        g.vertices.add(tok)
    return g


def set_partitions(items: list):
    """All partitions of a list of items, as lists of sets."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        for i, subset in enumerate(smaller):
            yield smaller[:i] + [subset | {first}] + smaller[i + 1 :]
        yield [{first}] + smaller


def modularity_brute(graph: WordGraph, communities) -> float:
    """Literal double-sum evaluation of weighted modularity on the
    symmetrized weights."""
    tokens = sorted(graph.vertices)

    def a(u, v):
        return graph.edges.get((u, v), 0) + graph.edges.get((v, u), 0)

    two_m = sum(a(u, v) for u in tokens for v in tokens)
    if two_m == 0:
        return 0.0
    comm_of = {}
    for ci, comm in enumerate(communities):
        for tok in comm:
            comm_of[tok] = ci
    d = {u: sum(a(u, v) for v in tokens) for u in tokens}
    total = 0.0
    for u in tokens:
        for v in tokens:
            if comm_of[u] == comm_of[v]:
                total += a(u, v) - d[u] * d[v] / two_m
    return total / two_m


def best_partition_brute(graph: WordGraph):
    """Maximum-modularity partition by exhaustive enumeration (small n)."""
    best_q, best = None, None
    for partition in set_partitions(sorted(graph.vertices)):
        q = modularity_brute(graph, partition)
        if best_q is None or q > best_q:
            best_q, best = q, partition
    return best_q, best


def dsigma_scratch(model, left: set[int], right: set[int]) -> float:
    """Ward merge cost recomputed from the averaged probability rows."""
    nl, nr = len(left), len(right)
    pl = [sum(model.pt[i][k] for i in left) / nl for k in range(model.n)]
    pr = [sum(model.pt[i][k] for i in right) / nr for k in range(model.n)]
    r2 = sum((pl[k] - pr[k]) ** 2 / model.d[k] for k in range(model.n))
    return nl * nr / (nl + nr) / model.n * r2


def ranks_by_counting(values) -> list[float]:
    """Average ranks via the counting definition, no sorting involved."""
    out = []
    for v in values:
        below = sum(1 for w in values if w < v)
        equal = sum(1 for w in values if w == v)
        out.append(below + (equal + 1) / 2.0)
    return out


def spearman_brute(x, y) -> float:
    rx, ry = ranks_by_counting(x), ranks_by_counting(y)
    n = len(rx)
    mx, my = sum(rx) / n, sum(ry) / n
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry))
    return num / den


def spearman_d2(x, y) -> float:
    """Tie-free closed form 1 - 6*sum(d^2)/(n(n^2-1))."""
    rx, ry = ranks_by_counting(x), ranks_by_counting(y)
    n = len(x)
    d2 = sum((a - b) ** 2 for a, b in zip(rx, ry))
    return 1.0 - 6.0 * d2 / (n * (n * n - 1))


def thread_groups_by_union(times: list[int], gap: int) -> int:
    """Number of threads a single source's sorted timestamps should form,
    by unioning every consecutive pair closer than the gap."""
    parent = list(range(len(times)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(times) - 1):
        if times[i + 1] - times[i] < gap:
            parent[find(i + 1)] = find(i)
    return len({find(i) for i in range(len(times))})
