"""Per-window directed weighted word graphs.

Documents are assigned to non-overlapping fixed-length windows (15 days by
default) anchored at the corpus start date. Within one source and window,
every ordered pair of adjacent tokens adds 1 to the weight of the directed
edge between them; pairs whose two tokens are identical are skipped, so the
graph never carries self-loops. Every token becomes a vertex even when it
contributes no edge.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from topicwalk.textprep import Document

DEFAULT_WINDOW_DAYS = 15

EDGELIST_HEADER = "src\tdst\tweight"


@dataclass(frozen=True)
class Window:
    """One fortnight slice: 1-based index, inclusive start, exclusive end."""

    index: int
    start: datetime
    end: datetime

    @property
    def length_days(self) -> int:
        return (self.end - self.start).days


@dataclass
class WordGraph:
    source: str
    window: Window
    vertices: set[str] = field(default_factory=set)
    edges: dict[tuple[str, str], int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def weight(self, u: str, v: str) -> int:
        return self.edges.get((u, v), 0)


def _midnight_utc(ts: datetime) -> datetime:
    ts = ts.astimezone(timezone.utc)
    return ts.replace(hour=0, minute=0, second=0, microsecond=0)


def make_windows(anchor: datetime, last: datetime, length_days: int) -> list[Window]:
    """Tile [anchor, last] with consecutive windows of length_days."""
    if length_days <= 0:
        raise ValueError(f"length_days must be positive, got {length_days}")
    anchor = _midnight_utc(anchor)
    if last < anchor:
        raise ValueError("window span ends before its anchor")
    count = int((last - anchor) / timedelta(days=length_days)) + 1
    step = timedelta(days=length_days)
    return [Window(index=i + 1, start=anchor + i * step, end=anchor + (i + 1) * step) for i in range(count)]


def partition_windows(
    documents: list[Document],
    length_days: int = DEFAULT_WINDOW_DAYS,
    anchor: datetime | None = None,
) -> dict[Window, list[Document]]:
    """Assign each document to the window containing its timestamp.

    Window 1 starts at ``anchor`` (the earliest document date truncated to
    midnight UTC when not given); windows between the first and the last
    document are all present, even when empty. Documents earlier than an
    explicit anchor are rejected.
    """
    if length_days <= 0:
        raise ValueError(f"length_days must be positive, got {length_days}")
    if not documents:
        return {}
    hints = [doc.window_hint for doc in documents]
    if anchor is None:
        anchor = min(hints)
    anchor = _midnight_utc(anchor)
    earliest = min(hints)
    if earliest < anchor:
        raise ValueError(
            f"document at {earliest.isoformat()} precedes the window anchor {anchor.date().isoformat()}"
        )
    windows = make_windows(anchor, max(hints), length_days)
    assignment: dict[Window, list[Document]] = {w: [] for w in windows}
    step = timedelta(days=length_days)
    for doc in documents:
        idx = int((doc.window_hint - anchor) / step)
        assignment[windows[idx]].append(doc)
    return assignment


def build_graph(documents: list[Document], source: str, window: Window) -> WordGraph:
    """Count adjacent ordered token pairs across the window's documents."""
    graph = WordGraph(source=source, window=window)
    for doc in documents:
        for token in doc.tokens:
            graph.vertices.add(token)
        for u, v in zip(doc.tokens, doc.tokens[1:]):
            if u == v:
                continue
            graph.edges[(u, v)] = graph.edges.get((u, v), 0) + 1
    return graph


def merge_graphs(a: WordGraph, b: WordGraph) -> WordGraph:
    """Combine two graphs over the same (source, window) by weight addition."""
    merged = WordGraph(source=a.source, window=a.window)
    merged.vertices = set(a.vertices) | set(b.vertices)
    merged.edges = dict(a.edges)
    for key, w in b.edges.items():
        merged.edges[key] = merged.edges.get(key, 0) + w
    return merged


def export_edgelist(graph: WordGraph, path: str | Path) -> None:
    """Write the graph as a TSV, rows sorted by (src, dst).

    Isolated vertices are kept as rows with an empty dst and weight 0 so the
    import side reconstructs the graph exactly.
    """
    rows: list[tuple[str, str, int]] = [(u, v, w) for (u, v), w in graph.edges.items()]
    connected = {u for (u, v) in graph.edges} | {v for (u, v) in graph.edges}
    rows.extend((tok, "", 0) for tok in graph.vertices - connected)
    rows.sort(key=lambda r: (r[0], r[1]))
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(EDGELIST_HEADER + "\n")
        for u, v, w in rows:
            fh.write(f"{u}\t{v}\t{w}\n")


def import_edgelist(path: str | Path, source: str, window: Window) -> WordGraph:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"expected edge list not found: {path}")
    graph = WordGraph(source=source, window=window)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != EDGELIST_HEADER:
            raise ValueError(f"{path}: unexpected edge list header {header!r}")
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path} line {line_no}: expected 3 tab-separated fields")
            u, v, w = parts
            if v == "":
                graph.vertices.add(u)
                continue
            graph.vertices.add(u)
            graph.vertices.add(v)
            graph.edges[(u, v)] = int(w)
    return graph


def graph_summary(graph: WordGraph) -> dict:
    return {
        "source": graph.source,
        "window_index": graph.window.index,
        "n": graph.n,
        "m": graph.m,
    }


def write_windows_json(windows: list[Window], sources: list[str], length_days: int, path: str | Path) -> None:
    payload = {
        "length_days": length_days,
        "sources": sorted(sources),
        "windows": [
            {
                "index": w.index,
                "start": w.start.date().isoformat(),
                "end": w.end.date().isoformat(),
            }
            for w in windows
        ],
    }
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def read_windows_json(path: str | Path) -> tuple[list[Window], list[str], int]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"expected window file not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        payload = json.load(fh)
    windows = [
        Window(
            index=entry["index"],
            start=datetime.fromisoformat(entry["start"]).replace(tzinfo=timezone.utc),
            end=datetime.fromisoformat(entry["end"]).replace(tzinfo=timezone.utc),
        )
        for entry in payload["windows"]
    ]
    return windows, list(payload["sources"]), int(payload["length_days"])
