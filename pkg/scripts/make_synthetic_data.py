#!/usr/bin/env python3
"""Regenerate the bundled synthetic corpus and its community label file.

Builds a two-account, 5115-post corpus spanning 12 fortnights of 2020 with
a planted topic schedule: each (source, window) cell mixes five topics with
window-disjoint vocabularies, posts arrive partly in sub-2-minute bursts so
thread merging has real work, and the text carries the usual platform noise
(stopwords, URLs, hashtags, mentions, RT markers, agency boilerplate).

The "Leisure" topic is planted in window 4 only, for both accounts, so the
cross-source correlation table has exactly one perfectly aligned code. After
writing the corpus the script runs the real pipeline, derives labels for
every prominent community from the planted vocabularies, and asserts the
properties the bundled data is expected to exhibit before freezing the
label file.

Usage: python scripts/make_synthetic_data.py
"""

from __future__ import annotations

import json
import random
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

from topicwalk import community, corpus, graph as graphmod, textprep, trends

SEED = 20200117
N_POSTS = 5115
ANCHOR = datetime(2020, 1, 1, tzinfo=timezone.utc)
WINDOW_DAYS = 15
N_WINDOWS = 12
SOURCES = ("agencia_alfa", "agencia_beta")

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "topicwalk" / "data"
CORPUS_PATH = DATA_DIR / "synthetic_corpus.jsonl"
LABELS_PATH = DATA_DIR / "synthetic_labels.csv"

# Label a community when most of its members come from one planted topic and
# it is big enough that its 2-decimal cluster percentage stays trustworthy.
LABEL_MIN_PCT = 2.0

CODES = [
    "International Affairs",
    "Environment",
    "Health",
    "Public Policy",
    "Politics",
    "Federal Government",
    "Economy",
    "Media",
    "Leisure",
    "Disaster",
    "Business",
    "Public Security",
    "Transparency",
    "Prevention",
    "Dissemination",
    "Treatment",
    "Hospitals",
    "Local Government",
    "Justice",
    "Science",
    "Education",
    "Religion",
    "Elections",
]

# Per-window topic mix, weights out of 100. Leisure appears in window 4 only,
# for both sources; every other code shared by the two sources is planted on
# differing window sets so only Leisure can correlate perfectly.
SCHEDULE_A = {
    1: [("International Affairs", 30), ("Environment", 25), ("Health", 20), ("Public Policy", 15), ("Politics", 10)],
    2: [("Politics", 30), ("Disaster", 25), ("Federal Government", 20), ("Public Policy", 15), ("Business", 10)],
    3: [("Federal Government", 25), ("Dissemination", 20), ("Transparency", 20), ("Economy", 20), ("Prevention", 15)],
    4: [("Leisure", 35), ("Economy", 20), ("Media", 15), ("Politics", 15), ("Prevention", 15)],
    5: [("Prevention", 30), ("Dissemination", 25), ("Health", 15), ("Federal Government", 15), ("Religion", 15)],
    6: [("Transparency", 35), ("Politics", 20), ("Dissemination", 15), ("Economy", 15), ("Prevention", 15)],
    7: [("Transparency", 25), ("Local Government", 20), ("Hospitals", 20), ("Treatment", 20), ("Politics", 15)],
    8: [("Dissemination", 30), ("Federal Government", 20), ("Transparency", 20), ("Local Government", 15), ("Justice", 15)],
    9: [("Transparency", 30), ("Media", 20), ("Hospitals", 20), ("Science", 15), ("Federal Government", 15)],
    10: [("Dissemination", 35), ("Education", 20), ("Prevention", 15), ("Federal Government", 15), ("Politics", 15)],
    11: [("Dissemination", 30), ("Transparency", 20), ("Prevention", 20), ("Treatment", 15), ("Elections", 15)],
    12: [("Dissemination", 30), ("Federal Government", 25), ("Prevention", 15), ("Politics", 15), ("International Affairs", 15)],
}
SCHEDULE_B = {
    1: [("Federal Government", 30), ("International Affairs", 25), ("Public Policy", 15), ("Transparency", 15), ("Politics", 15)],
    2: [("Prevention", 25), ("Dissemination", 25), ("Federal Government", 20), ("Transparency", 15), ("Media", 15)],
    3: [("Media", 30), ("Public Policy", 20), ("Politics", 20), ("Science", 15), ("Education", 15)],
    4: [("Leisure", 35), ("Economy", 25), ("Public Security", 15), ("Prevention", 15), ("Federal Government", 10)],
    5: [("Dissemination", 30), ("Prevention", 20), ("Economy", 20), ("Politics", 15), ("Health", 15)],
    6: [("Dissemination", 25), ("Politics", 20), ("Economy", 20), ("Treatment", 20), ("Prevention", 15)],
    7: [("Prevention", 30), ("Federal Government", 25), ("Economy", 20), ("Hospitals", 15), ("Religion", 10)],
    8: [("Federal Government", 30), ("Dissemination", 20), ("Local Government", 20), ("Elections", 15), ("Business", 15)],
    9: [("Transparency", 25), ("Treatment", 25), ("Media", 20), ("Local Government", 15), ("Elections", 15)],
    10: [("Dissemination", 30), ("Federal Government", 25), ("Politics", 15), ("Transparency", 15), ("Disaster", 15)],
    11: [("Federal Government", 30), ("International Affairs", 20), ("Economy", 20), ("Prevention", 15), ("Science", 15)],
    12: [("Federal Government", 25), ("Media", 20), ("Treatment", 20), ("Dissemination", 20), ("Environment", 15)],
}
SCHEDULES = {SOURCES[0]: SCHEDULE_A, SOURCES[1]: SCHEDULE_B}

# Multi-word names planted inside specific topics; they exercise the
# compound-merge path end to end (the entries live in the default merges.txt).
COMPOUNDS = {
    "Federal Government": ("jair", "bolsonaro"),
    "Politics": ("sérgio", "moro"),
    "Local Government": ("porto", "alegre"),
}

CONSONANTS = list("bcdfgjlmnprstvz")
VOWELS = ["a", "e", "i", "o", "u", "ã", "é", "í", "ó"]

NOISE_STOPWORDS = ["de", "que", "não", "com", "para", "os", "uma", "mais", "foi", "pelo", "se", "do", "da", "em"]
BOILERPLATE_PREFIXES = ["NO AR.", "Verificamos:", "É falso!", "We verified:", "This is false:"]
COVID_TERMS = ["coronavírus", "covid-19", "covid19", "COVID-19"]
PUNCT = [".", ",", "!", "?", "…"]


def make_vocab(rng: random.Random) -> dict[str, list[tuple[tuple[str, ...], str]]]:
    """Per code, a list of (raw word sequence, resulting graph token)."""
    forbidden = set(NOISE_STOPWORDS) | {"rt", "no", "ar", "verificamos", "falso", "we", "verified", "this", "is", "false"}
    with (DATA_DIR / "stopwords.txt").open(encoding="utf-8") as fh:
        forbidden |= {line.strip() for line in fh if line.strip()}
    for parts in COMPOUNDS.values():
        forbidden |= set(parts)

    seen: set[str] = set()

    def fresh_word() -> str:
        while True:
            word = "".join(rng.choice(CONSONANTS) + rng.choice(VOWELS) for _ in range(rng.randint(3, 4)))
            if word not in seen and word not in forbidden:
                seen.add(word)
                return word

    vocab: dict[str, list[tuple[tuple[str, ...], str]]] = {}
    for ci, code in enumerate(CODES):
        size = 28 + (ci * 7) % 24
        if code == "Leisure":
            size = 55
        entries = [((w := fresh_word(),), w.upper()) for _ in range(size)]
        if code in COMPOUNDS:
            parts = COMPOUNDS[code]
            entries.insert(2, (parts, "_".join(parts).upper()))
        vocab[code] = entries
    return vocab


def cell_budgets() -> dict[tuple[str, int], int]:
    cells = [(src, w) for src in SOURCES for w in range(1, N_WINDOWS + 1)]
    base = N_POSTS // len(cells)
    budgets = {cell: base for cell in cells}
    for cell in cells[: N_POSTS - base * len(cells)]:
        budgets[cell] += 1
    assert sum(budgets.values()) == N_POSTS
    return budgets


def split_by_weight(total: int, weights: list[int]) -> list[int]:
    shares = [total * w / 100.0 for w in weights]
    counts = [int(s) for s in shares]
    remainders = sorted(range(len(weights)), key=lambda i: shares[i] - counts[i], reverse=True)
    for i in remainders[: total - sum(counts)]:
        counts[i] += 1
    return counts


def tweet_text(rng: random.Random, entries: list[tuple[tuple[str, ...], str]]) -> str:
    # Skewed pick weights give each topic a few hub words with high strength.
    weights = [8 if i < 6 else 3 if i < 18 else 1 for i in range(len(entries))]
    length = rng.randint(6, 16)
    picks = rng.choices(entries, weights=weights, k=length)

    parts: list[str] = []
    for raw, _tok in picks:
        words = list(raw)
        if rng.random() < 0.2:
            words[0] = words[0].capitalize()
        if rng.random() < 0.15:
            words[-1] = words[-1] + rng.choice(PUNCT)
        parts.append(" ".join(words))
        if rng.random() < 0.25:
            parts.append(rng.choice(NOISE_STOPWORDS))
        if rng.random() < 0.06:
            parts.append(rng.choice(COVID_TERMS))

    text = " ".join(parts)
    if rng.random() < 0.2:
        text = rng.choice(BOILERPLATE_PREFIXES) + " " + text
    if rng.random() < 0.08:
        text = f"RT @conta{rng.randint(1, 99)}: " + text
    if rng.random() < 0.1:
        text += f" @leitor{rng.randint(1, 999)}"
    if rng.random() < 0.3:
        text += f" https://checagem.example/{rng.randrange(16**8):08x}"
    if rng.random() < 0.25:
        text += f" #Checa{rng.choice(['Fato', 'Boato', 'Viral', 'Agora'])}"
    return text


def make_posts(rng: random.Random, vocab) -> list[dict]:
    budgets = cell_budgets()
    posts: list[dict] = []
    next_id = 1

    for source in SOURCES:
        for window in range(1, N_WINDOWS + 1):
            schedule = SCHEDULES[source][window]
            counts = split_by_weight(budgets[(source, window)], [w for _, w in schedule])

            events: list[tuple[str, int]] = []
            for (code, _), count in zip(schedule, counts):
                remaining = count
                while remaining > 0:
                    size = rng.randint(2, 4) if rng.random() < 0.25 and remaining >= 2 else 1
                    size = min(size, remaining)
                    events.append((code, size))
                    remaining -= size
            rng.shuffle(events)

            # Sorted offsets with >= 600 s separation keep distinct events
            # from ever chaining into one thread.
            win_start = ANCHOR + timedelta(days=(window - 1) * WINDOW_DAYS)
            span = WINDOW_DAYS * 86400 - 3 * 3600 - 7200 - len(events) * 600
            offsets = sorted(rng.uniform(0, span) for _ in range(len(events)))
            for i, ((code, size), off) in enumerate(zip(events, offsets)):
                ts = win_start + timedelta(seconds=3600 + off + i * 600)
                for _ in range(size):
                    posts.append(
                        {
                            "id": f"p{next_id:05d}",
                            "source": source,
                            "created_at": ts.strftime("%Y-%m-%dT%H:%M:%SZ"),
                            "text": tweet_text(rng, vocab[code]),
                        }
                    )
                    next_id += 1
                    ts += timedelta(seconds=rng.randint(20, 90))

    rng.shuffle(posts)
    return posts


def run_pipeline_in_process() -> tuple[dict[tuple[str, int], community.Partition], int]:
    posts = corpus.ingest(CORPUS_PATH)
    assert len(posts) == N_POSTS, f"corpus has {len(posts)} posts, wanted {N_POSTS}"
    threads = corpus.merge_threads(posts)
    cfg = textprep.default_config()
    docs = [d for d in (textprep.preprocess(t, cfg) for t in threads) if d.tokens]
    assignment = graphmod.partition_windows(docs, WINDOW_DAYS)
    windows = sorted(assignment, key=lambda w: w.index)
    assert len(windows) == N_WINDOWS, f"got {len(windows)} windows"

    partitions: dict[tuple[str, int], community.Partition] = {}
    for source in SOURCES:
        for window in windows:
            cell_docs = [d for d in assignment[window] if d.source == source]
            wg = graphmod.build_graph(cell_docs, source, window)
            partitions[(source, window.index)] = community.walktrap(wg)
    return partitions, len(windows)


def derive_labels(partitions, vocab) -> list[trends.LabelRow]:
    token_sets = {code: {tok for _, tok in entries} for code, entries in vocab.items()}
    labels: list[trends.LabelRow] = []
    for (source, window_index), partition in sorted(partitions.items()):
        for info in partition.communities:
            if info.cluster_pct < LABEL_MIN_PCT:
                continue
            members = set(info.members)
            best_code, best_overlap = None, 0
            for code, tokens in token_sets.items():
                overlap = len(members & tokens)
                if overlap > best_overlap:
                    best_code, best_overlap = code, overlap
            if best_code is not None and best_overlap * 2 > len(members):
                labels.append(trends.LabelRow(source, window_index, info.id, best_code))
    return labels


def check_expectations(labels, partitions, n_windows) -> list[trends.CorrelationRow]:
    series = trends.assemble_series(labels, partitions, n_windows)
    table = trends.correlation_table(series, *SOURCES)
    top = table[0]
    assert top.code == "Leisure" and top.rho == 1.0, f"top correlation is {top}"
    runner_up = table[1]
    assert runner_up.rho is None or runner_up.rho < 1.0, f"rho tie at 1.0: {runner_up}"

    rows = trends.topic_table(partitions, labels)
    groups: dict[tuple[str, str], list[float]] = {}
    for r in rows:
        groups.setdefault((r.source, r.timeframe), []).append(r.vertex_count / (r.cluster_pct / 100.0))
    for key, ratios in groups.items():
        spread = max(ratios) / min(ratios) - 1.0
        assert spread <= 0.01, f"ratio spread {spread:.4f} in {key}"

    codes_seen = {l.code for l in labels}
    missing = set(CODES) - codes_seen
    assert not missing, f"codes never labeled: {sorted(missing)}"
    return table


def main() -> int:
    rng = random.Random(SEED)
    vocab = make_vocab(rng)
    posts = make_posts(rng, vocab)

    DATA_DIR.mkdir(parents=True, exist_ok=True)
    with CORPUS_PATH.open("w", encoding="utf-8") as fh:
        for post in posts:
            fh.write(json.dumps(post, ensure_ascii=False) + "\n")
    print(f"wrote {len(posts)} posts -> {CORPUS_PATH}")

    partitions, n_windows = run_pipeline_in_process()
    labels = derive_labels(partitions, vocab)
    table = check_expectations(labels, partitions, n_windows)

    with LABELS_PATH.open("w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(trends.LABEL_HEADER) + "\n")
        for row in labels:
            fh.write(f"{row.source},{row.window_index},{row.community_id},{row.code}\n")
    print(f"wrote {len(labels)} labels over {len({l.code for l in labels})} codes -> {LABELS_PATH}")
    print("strongest correlations:")
    for row in table[:5]:
        print(f"  {row.code}: {row.rho if row.rho is not None else 'null'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
