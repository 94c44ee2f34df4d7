"""Topic time series and cross-source rank correlation.

Hand-assigned community labels (a CSV of source, window_index, community_id,
code) turn partitions into one presence vector per (code, source): the
labeled communities' cluster percentages summed per window, zero where the
code is absent. Per code, the two sources' vectors are compared with
Spearman's rho computed as the Pearson correlation of average-tie ranks;
a constant vector yields a null rho rather than a number.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from topicwalk.community import Partition


@dataclass(frozen=True)
class LabelRow:
    source: str
    window_index: int
    community_id: int
    code: str


@dataclass(frozen=True)
class TopicSeries:
    code: str
    source: str
    presence: tuple[float, ...]


@dataclass(frozen=True)
class CorrelationRow:
    code: str
    rho: float | None
    n_windows: int


@dataclass(frozen=True)
class TopicRow:
    source: str
    timeframe: str
    code: str
    cluster_pct: float
    vertex_count: int
    edge_count: int


LABEL_HEADER = ["source", "window_index", "community_id", "code"]


def load_labels(path: str | Path) -> list[LabelRow]:
    """Read the label CSV; duplicate (source, window, community) keys are
    rejected naming the row."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"label file not found: {path}")
    rows: list[LabelRow] = []
    seen: set[tuple[str, int, int]] = set()
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != LABEL_HEADER:
            raise ValueError(f"{path}: expected header {','.join(LABEL_HEADER)}")
        for record in reader:
            try:
                row = LabelRow(
                    source=record["source"],
                    window_index=int(record["window_index"]),
                    community_id=int(record["community_id"]),
                    code=record["code"],
                )
            except (TypeError, KeyError, ValueError):
                raise ValueError(f"{path} line {reader.line_num}: malformed label row") from None
            key = (row.source, row.window_index, row.community_id)
            if key in seen:
                raise ValueError(f"{path} line {reader.line_num}: duplicate label for {key}")
            seen.add(key)
            rows.append(row)
    return rows


def validate_labels(labels: list[LabelRow], partitions: dict[tuple[str, int], Partition]) -> None:
    for i, row in enumerate(labels, start=1):
        partition = partitions.get((row.source, row.window_index))
        if partition is None:
            raise ValueError(
                f"label row {i}: no partition for source {row.source!r} window {row.window_index}"
            )
        if not any(c.id == row.community_id for c in partition.communities):
            raise ValueError(
                f"label row {i}: community {row.community_id} not in partition "
                f"({row.source!r}, window {row.window_index})"
            )


def assemble_series(
    labels: list[LabelRow],
    partitions: dict[tuple[str, int], Partition],
    n_windows: int,
) -> list[TopicSeries]:
    """One presence vector per (code, source); same-code labels in one
    window add their cluster percentages."""
    validate_labels(labels, partitions)
    acc: dict[tuple[str, str], list[float]] = {}
    for row in labels:
        partition = partitions[(row.source, row.window_index)]
        pct = next(c.cluster_pct for c in partition.communities if c.id == row.community_id)
        key = (row.code, row.source)
        if key not in acc:
            acc[key] = [0.0] * n_windows
        acc[key][row.window_index - 1] += pct
    return [
        TopicSeries(code=code, source=source, presence=tuple(vec))
        for (code, source), vec in sorted(acc.items())
    ]


def _average_ranks(values: Sequence[float]) -> list[float]:
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _pearson(x: Sequence[float], y: Sequence[float]) -> float:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((v - mx) ** 2 for v in x)
    syy = sum((v - my) ** 2 for v in y)
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return sxy / math.sqrt(sxx * syy)


def spearman(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Spearman's rho with average-rank tie handling.

    Returns None (a null result, not an error) when either vector is
    constant, since ranks carry no information there.
    """
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise ValueError(f"need at least 3 observations, got {len(x)}")
    if len(set(x)) == 1 or len(set(y)) == 1:
        return None
    return _pearson(_average_ranks(x), _average_ranks(y))


def correlation_table(
    series: list[TopicSeries], source_a: str, source_b: str
) -> list[CorrelationRow]:
    """Per-code rho between the two sources' presence vectors.

    A code missing for one source is compared against an all-zero vector,
    which is constant and therefore yields a null rho; null rows sort last.
    """
    by_key = {(s.code, s.source): s for s in series}
    codes = sorted({s.code for s in series if s.source in (source_a, source_b)})
    if not codes:
        return []
    n_windows = len(next(iter(by_key.values())).presence)
    zero = tuple(0.0 for _ in range(n_windows))

    rows = []
    for code in codes:
        vec_a = by_key.get((code, source_a), TopicSeries(code, source_a, zero)).presence
        vec_b = by_key.get((code, source_b), TopicSeries(code, source_b, zero)).presence
        rows.append(CorrelationRow(code=code, rho=spearman(vec_a, vec_b), n_windows=n_windows))
    rows.sort(key=lambda r: (r.rho is None, -(r.rho if r.rho is not None else 0.0), r.code))
    return rows


def topic_table(
    partitions: dict[tuple[str, int], Partition], labels: list[LabelRow]
) -> list[TopicRow]:
    """One report row per labeled community, in the shape of the per-source
    fortnight topic tables."""
    validate_labels(labels, partitions)
    rows = []
    for row in sorted(labels, key=lambda r: (r.source, r.window_index, r.community_id)):
        partition = partitions[(row.source, row.window_index)]
        info = next(c for c in partition.communities if c.id == row.community_id)
        rows.append(
            TopicRow(
                source=row.source,
                timeframe=f"Fortnight {row.window_index}",
                code=row.code,
                cluster_pct=info.cluster_pct,
                vertex_count=info.vertex_count,
                edge_count=info.edge_count,
            )
        )
    return rows


def write_topics_csv(rows: list[TopicRow], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "timeframe", "code", "cluster_pct", "vertex", "edge"])
        for r in rows:
            writer.writerow(
                [r.source, r.timeframe, r.code, f"{r.cluster_pct:.2f}", r.vertex_count, r.edge_count]
            )


def write_series_csv(series: list[TopicSeries], path: str | Path) -> None:
    n_windows = len(series[0].presence) if series else 0
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["code", "source"] + [f"w{i}" for i in range(1, n_windows + 1)])
        for s in series:
            writer.writerow([s.code, s.source] + [f"{v:.2f}" for v in s.presence])


def write_correlations_csv(rows: list[CorrelationRow], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["code", "rho", "n_windows"])
        for r in rows:
            writer.writerow([r.code, "" if r.rho is None else f"{r.rho:.6f}", r.n_windows])
