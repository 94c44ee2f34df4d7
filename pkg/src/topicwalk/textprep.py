"""Thread text normalization.

Turns a thread's raw text into the uppercase token sequence that seeds the
word graph. The rules run in a fixed order: boilerplate phrase removal
(longest phrase first, on the raw text so multi-word formulas match), then
URL / mention / hashtag / retweet-marker stripping, punctuation removal,
whitespace tokenization, stopword removal, compound-name merging, and
finally uppercasing. There is deliberately no stemming or lemmatization.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from datetime import datetime
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, TYPE_CHECKING

if TYPE_CHECKING:
    from topicwalk.corpus import Thread

_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_MENTION_RE = re.compile(r"(?<!\w)@\w+")
_HASHTAG_RE = re.compile(r"(?<!\w)#(\w+)")
_RT_RE = re.compile(r"\bRT\b")


@dataclass(frozen=True)
class StripRules:
    """Flags controlling which platform artifacts get removed."""

    urls: bool = True
    mentions: bool = True
    hashtags: bool = True
    retweet_markers: bool = True
    punctuation: bool = True
    digits: bool = False
    keep_hashtag_body: bool = False


@dataclass(frozen=True)
class PrepConfig:
    stopwords: frozenset[str]
    boilerplate_phrases: tuple[str, ...]
    compound_merges: tuple[tuple[str, ...], ...]
    strip: StripRules = field(default_factory=StripRules)

    def __post_init__(self) -> None:
        for seq in self.compound_merges:
            if len(seq) < 2:
                raise ValueError(f"compound merge needs at least 2 tokens, got {seq!r}")


@dataclass(frozen=True)
class Document:
    """A preprocessed thread: source, its start timestamp, uppercase tokens."""

    source: str
    window_hint: datetime
    tokens: tuple[str, ...]


def _read_lines(path: str | Path) -> list[str]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def load_config(
    stopwords_path: str | Path,
    boilerplate_path: str | Path,
    merges_path: str | Path,
    strip_rules: StripRules | None = None,
) -> PrepConfig:
    """Load the three line-oriented config files into a validated PrepConfig.

    The merge file holds one space-separated token sequence per line; a
    single-token line is rejected naming its line number. Duplicates in any
    file are dropped.
    """
    stopwords = frozenset(line.lower() for line in _read_lines(stopwords_path))

    phrases: list[str] = []
    for line in _read_lines(boilerplate_path):
        if line not in phrases:
            phrases.append(line)

    merges: list[tuple[str, ...]] = []
    merges_path = Path(merges_path)
    if not merges_path.exists():
        raise FileNotFoundError(f"config file not found: {merges_path}")
    with merges_path.open("r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            parts = tuple(tok.lower() for tok in raw.split())
            if not parts:
                continue
            if len(parts) < 2:
                raise ValueError(f"{merges_path} line {line_no}: compound merge needs at least 2 tokens")
            if parts not in merges:
                merges.append(parts)

    return PrepConfig(
        stopwords=stopwords,
        boilerplate_phrases=tuple(phrases),
        compound_merges=tuple(merges),
        strip=strip_rules if strip_rules is not None else StripRules(),
    )


def default_data_path(name: str) -> Path:
    """Path of a bundled data file (default configs, synthetic corpus)."""
    return Path(str(resources.files("topicwalk").joinpath("data", name)))


def default_config(strip_rules: StripRules | None = None) -> PrepConfig:
    """The shipped default config: Portuguese stopwords plus the agency
    boilerplate formulas and compound names seen in fact-checking feeds."""
    return load_config(
        default_data_path("stopwords.txt"),
        default_data_path("boilerplate.txt"),
        default_data_path("merges.txt"),
        strip_rules,
    )


@lru_cache(maxsize=4096)
def _is_strippable_char(ch: str) -> bool:
    # Underscore stays: compound merges introduce it, and reprocessing a
    # merged token must not tear it apart.
    if ch == "_":
        return False
    return unicodedata.category(ch)[0] in ("P", "S")


def _strip_punctuation(text: str) -> str:
    return "".join(ch for ch in text if not _is_strippable_char(ch))


def _strip_digits(text: str) -> str:
    return "".join(ch for ch in text if not ch.isdigit())


def _remove_boilerplate(text: str, phrases: Iterable[str]) -> str:
    # Longest phrase first so "NO AR. AGORA" wins over "NO AR.". Word-boundary
    # guards keep a phrase from matching inside a longer word.
    for phrase in sorted(phrases, key=lambda p: (-len(p), p)):
        pattern = re.escape(phrase)
        if phrase[:1].isalnum() or phrase[:1] == "_":
            pattern = r"(?<!\w)" + pattern
        if phrase[-1:].isalnum() or phrase[-1:] == "_":
            pattern = pattern + r"(?!\w)"
        text = re.sub(pattern, " ", text, flags=re.IGNORECASE)
    return text


def _merge_compounds(tokens: list[str], merges: tuple[tuple[str, ...], ...]) -> list[str]:
    if not merges:
        return tokens
    by_first: dict[str, list[tuple[str, ...]]] = {}
    for seq in merges:
        by_first.setdefault(seq[0], []).append(seq)
    for seqs in by_first.values():
        seqs.sort(key=len, reverse=True)

    lowered = [t.lower() for t in tokens]
    out: list[str] = []
    i = 0
    while i < len(tokens):
        candidates = by_first.get(lowered[i], ())
        matched = None
        for seq in candidates:
            if tuple(lowered[i : i + len(seq)]) == seq:
                matched = seq
                break
        if matched is not None:
            out.append("_".join(matched))
            i += len(matched)
        else:
            out.append(tokens[i])
            i += 1
    return out


def preprocess(thread: "Thread", config: PrepConfig) -> Document:
    """Normalize one thread into a Document of uppercase tokens.

    The surviving words keep their original order; an all-stopword thread
    yields an empty token list rather than an error.
    """
    text = thread.text
    text = _remove_boilerplate(text, config.boilerplate_phrases)
    if config.strip.urls:
        text = _URL_RE.sub(" ", text)
    if config.strip.mentions:
        text = _MENTION_RE.sub(" ", text)
    if config.strip.hashtags:
        if config.strip.keep_hashtag_body:
            text = _HASHTAG_RE.sub(r" \1 ", text)
        else:
            text = _HASHTAG_RE.sub(" ", text)
    if config.strip.retweet_markers:
        text = _RT_RE.sub(" ", text)
    if config.strip.punctuation:
        text = _strip_punctuation(text)
    if config.strip.digits:
        text = _strip_digits(text)

    tokens = [tok for tok in text.split() if tok.strip("_")]
    tokens = [tok for tok in tokens if tok.lower() not in config.stopwords]
    tokens = _merge_compounds(tokens, config.compound_merges)
    tokens = [tok.upper() for tok in tokens]

    return Document(source=thread.source, window_hint=thread.start_at, tokens=tuple(tokens))


def write_documents(documents: list[Document], path: str | Path) -> None:
    from topicwalk.corpus import format_timestamp

    with Path(path).open("w", encoding="utf-8") as fh:
        for doc in documents:
            record = {
                "source": doc.source,
                "window_hint": format_timestamp(doc.window_hint),
                "tokens": list(doc.tokens),
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_documents(path: str | Path) -> list[Document]:
    from topicwalk.corpus import parse_timestamp

    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"expected document file not found: {path}")
    documents = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            documents.append(
                Document(
                    source=record["source"],
                    window_hint=parse_timestamp(record["window_hint"]),
                    tokens=tuple(record["tokens"]),
                )
            )
    return documents
