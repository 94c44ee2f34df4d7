"""Post ingestion and thread reconstruction.

Raw posts arrive as JSONL (one object per line) or CSV with the columns
``id, source, created_at, text``. Posts by one account published in rapid
succession (consecutive gaps strictly under a configurable number of
seconds) are collapsed into a single thread so that a multi-post claim is
treated as one document downstream.
"""

from __future__ import annotations

import csv
import json
import urllib.request
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

REQUIRED_FIELDS = ("id", "source", "created_at", "text")

DEFAULT_GAP_SECONDS = 120


@dataclass(frozen=True)
class Post:
    """One raw timestamped short text from one source account."""

    id: str
    source: str
    created_at: datetime
    text: str


@dataclass(frozen=True)
class Thread:
    """A chain of consecutive posts by one account, joined into one text."""

    source: str
    start_at: datetime
    member_ids: tuple[str, ...]
    text: str


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp and normalize it to UTC.

    Accepts the trailing-``Z`` form directly; naive timestamps are rejected
    because window assignment needs an unambiguous instant.
    """
    raw = value.strip()
    candidate = raw[:-1] + "+00:00" if raw.endswith(("Z", "z")) else raw
    try:
        ts = datetime.fromisoformat(candidate)
    except ValueError:
        raise ValueError(f"unparseable timestamp: {value!r}") from None
    if ts.tzinfo is None:
        raise ValueError(f"unparseable timestamp (missing timezone): {value!r}")
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _post_from_record(record: dict, line_no: int, seen_ids: set[str]) -> Post:
    for field in REQUIRED_FIELDS:
        if field not in record or record[field] is None:
            raise ValueError(f"line {line_no}: missing field {field!r}")
    post_id = str(record["id"])
    if not post_id:
        raise ValueError(f"line {line_no}: missing field 'id'")
    if post_id in seen_ids:
        raise ValueError(f"duplicate post id {post_id!r} (line {line_no})")
    seen_ids.add(post_id)
    text = str(record["text"])
    if not text.strip():
        raise ValueError(f"line {line_no}: field 'text' is empty")
    try:
        created_at = parse_timestamp(str(record["created_at"]))
    except ValueError as exc:
        raise ValueError(f"line {line_no}: {exc}") from None
    return Post(id=post_id, source=str(record["source"]), created_at=created_at, text=text)


def _ingest_jsonl_lines(lines: Iterable[str]) -> list[Post]:
    posts: list[Post] = []
    seen: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {line_no}: malformed JSON record ({exc.msg})") from None
        if not isinstance(record, dict):
            raise ValueError(f"line {line_no}: record is not an object")
        posts.append(_post_from_record(record, line_no, seen))
    posts.sort(key=lambda p: (p.source, p.created_at, p.id))
    return posts


def _ingest_csv(path: Path) -> list[Post]:
    posts: list[Post] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return []
        missing = [f for f in REQUIRED_FIELDS if f not in reader.fieldnames]
        if missing:
            raise ValueError(f"line 1: missing field {missing[0]!r} in CSV header")
        for record in reader:
            posts.append(_post_from_record(record, reader.line_num, seen))
    posts.sort(key=lambda p: (p.source, p.created_at, p.id))
    return posts


def ingest(path: str | Path, format: str | None = None) -> list[Post]:
    """Read and validate posts from a JSONL or CSV file.

    Returns posts sorted by ``(source, created_at, id)``. Malformed records
    raise ``ValueError`` naming the offending line and field; duplicate ids
    raise naming the id.
    """
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if format not in ("jsonl", "csv"):
        raise ValueError(f"unknown ingest format {format!r} (expected 'jsonl' or 'csv')")
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    if format == "csv":
        return _ingest_csv(path)
    with path.open("r", encoding="utf-8") as fh:
        return _ingest_jsonl_lines(fh)


def fetch(url: str, timeout: float = 30.0) -> list[Post]:
    """Fetch a JSONL post dump from an HTTP endpoint (mock-server ingest path)."""
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        body = resp.read().decode("utf-8")
    return _ingest_jsonl_lines(body.splitlines())


def merge_threads(posts: list[Post], gap_seconds: int = DEFAULT_GAP_SECONDS) -> list[Thread]:
    """Collapse same-source posts published in rapid succession into threads.

    A chain grows while each consecutive pair is strictly less than
    ``gap_seconds`` apart (the rule is anchored on the previous post, not on
    the thread head, so chaining is transitive). Posts from different sources
    never merge. Input must already be sorted by ``(source, created_at)``.
    """
    if gap_seconds <= 0:
        raise ValueError(f"gap_seconds must be positive, got {gap_seconds}")
    for prev, cur in zip(posts, posts[1:]):
        if (cur.source, cur.created_at) < (prev.source, prev.created_at):
            raise ValueError(f"posts not sorted by (source, created_at) near id {cur.id!r}")

    threads: list[Thread] = []
    members: list[Post] = []

    def flush() -> None:
        if members:
            threads.append(
                Thread(
                    source=members[0].source,
                    start_at=members[0].created_at,
                    member_ids=tuple(p.id for p in members),
                    text=" ".join(p.text for p in members),
                )
            )

    for post in posts:
        if members and (
            post.source != members[-1].source
            or (post.created_at - members[-1].created_at).total_seconds() >= gap_seconds
        ):
            flush()
            members = []
        members.append(post)
    flush()
    return threads


def write_threads(threads: list[Thread], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for t in threads:
            record = {
                "source": t.source,
                "start_at": format_timestamp(t.start_at),
                "member_ids": list(t.member_ids),
                "text": t.text,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_threads(path: str | Path) -> list[Thread]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"expected thread file not found: {path}")
    threads = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            threads.append(
                Thread(
                    source=record["source"],
                    start_at=parse_timestamp(record["start_at"]),
                    member_ids=tuple(record["member_ids"]),
                    text=record["text"],
                )
            )
    return threads
