"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with:  pytest tests/test_acceptance.py -v -s
"""

from __future__ import annotations

import csv
import random
import time
from datetime import datetime, timedelta, timezone
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

from topicwalk.cli import main
from topicwalk.community import WalkModel, walktrap, walktrap_result, wordcloud
from topicwalk.corpus import Post, Thread, merge_threads
from topicwalk.graph import build_graph, merge_graphs
from topicwalk.textprep import Document, default_config, default_data_path, preprocess
from topicwalk.trends import spearman

from oracles import (
    WINDOW,
    best_partition_brute,
    dsigma_scratch,
    graph_from_edges,
    modularity_brute,
    spearman_brute,
    spearman_d2,
)

T0 = datetime(2020, 1, 1, 12, 0, 0, tzinfo=timezone.utc)

WORKED_TWEET = (
    "NO AR. OMS não orientou evitar sexo com animais para se prevenir do coronavírus. "
    "https://www.aosfatos.org/noticias/oms-nao-orientou-evitar-sexo-com-animais-para-se-prevenir-do-coronavirus/ "
    "#CoronaVirusFacts"
)


class Budget:
    def __init__(self, name: str, seconds: float):
        self.name, self.seconds = name, seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, *rest):
        elapsed = time.perf_counter() - self.start
        if exc_type is None:
            assert elapsed < self.seconds, f"{self.name} took {elapsed:.2f}s (budget {self.seconds}s)"
            print(f"[acceptance] {self.name}: PASS ({elapsed:.2f}s)")
        else:
            print(f"[acceptance] {self.name}: FAIL")
        return False


def post(pid, offset_s, source="acct", text="alpha beta"):
    return Post(id=pid, source=source, created_at=T0 + timedelta(seconds=offset_s), text=text)


def random_doc_graph(rng, alphabet="ABCDEF", max_docs=8, max_len=8):
    docs = [
        Document("s", WINDOW.start, tuple(rng.choice(alphabet) for _ in range(rng.randint(0, max_len))))
        for _ in range(rng.randint(0, max_docs))
    ]
    return docs, build_graph(docs, "s", WINDOW)


def random_weighted_graph(rng, n, p=0.4):
    tokens = [f"T{i}" for i in range(n)]
    edges = []
    for u, v in combinations(tokens, 2):
        if rng.random() < p:
            if rng.random() < 0.5:
                u, v = v, u
            edges.append((u, v, rng.randint(1, 3)))
    return graph_from_edges(edges, extra_vertices=tokens)


@pytest.fixture(scope="session")
def synthetic_run(tmp_path_factory) -> Path:
    """One full pipeline run over the bundled 5115-post corpus and labels."""
    out = tmp_path_factory.mktemp("acceptance") / "run"
    rc = main(
        [
            "run",
            "--input", str(default_data_path("synthetic_corpus.jsonl")),
            "--labels", str(default_data_path("synthetic_labels.csv")),
            "--out", str(out),
        ]
    )
    assert rc == 0
    return out


def test_c01_worked_example_fidelity():
    with Budget("criterion 1 (worked example)", 1.0):
        thread = Thread(source="acct", start_at=T0, member_ids=("t1",), text=WORKED_TWEET)
        doc = preprocess(thread, default_config())
        assert doc.tokens == ("OMS", "ORIENTOU", "EVITAR", "SEXO", "ANIMAIS", "PREVENIR")
        g = build_graph([doc], "acct", WINDOW)
        assert g.n == 6 and g.m == 5
        assert set(g.edges.values()) == {1}
        assert g.edges == {
            ("OMS", "ORIENTOU"): 1,
            ("ORIENTOU", "EVITAR"): 1,
            ("EVITAR", "SEXO"): 1,
            ("SEXO", "ANIMAIS"): 1,
            ("ANIMAIS", "PREVENIR"): 1,
        }


def test_c02_thread_rule_and_conservation():
    with Budget("criterion 2 (thread rule)", 10.0):
        assert len(merge_threads([post("1", 0), post("2", 119)])) == 1
        assert len(merge_threads([post("1", 0), post("2", 120)])) == 2
        chain = merge_threads([post("1", 0), post("2", 90), post("3", 180)])
        assert len(chain) == 1 and chain[0].member_ids == ("1", "2", "3")

        rng = random.Random(2020)
        for _ in range(1000):
            posts = []
            for source in ("a", "b"):
                offsets = sorted(rng.randint(0, 5000) for _ in range(rng.randint(0, 30)))
                posts.extend(post(f"{source}{i}", off, source=source) for i, off in enumerate(offsets))
            gap = rng.randint(1, 400)
            threads = merge_threads(posts, gap)
            assert sum(len(t.member_ids) for t in threads) == len(posts)


def test_c03_graph_laws_on_random_corpora():
    with Budget("criterion 3 (graph laws)", 30.0):
        rng = random.Random(515)
        for _ in range(500):
            docs, g = random_doc_graph(rng)
            pair_count = sum(1 for d in docs for u, v in zip(d.tokens, d.tokens[1:]) if u != v)
            assert sum(g.edges.values()) == pair_count

            shuffled = list(docs)
            rng.shuffle(shuffled)
            g2 = build_graph(shuffled, "s", WINDOW)
            assert g2.vertices == g.vertices and g2.edges == g.edges

            cut = rng.randint(0, len(docs))
            merged = merge_graphs(
                build_graph(docs[:cut], "s", WINDOW), build_graph(docs[cut:], "s", WINDOW)
            )
            assert merged.vertices == g.vertices and merged.edges == g.edges


def test_c04_walktrap_numerics():
    with Budget("criterion 4 (walktrap numerics)", 60.0):
        rng = random.Random(44)
        for _ in range(30):
            g = random_weighted_graph(rng, rng.randint(2, 20))
            model = WalkModel(g, t=4)
            if model.n:
                assert np.all(np.abs(model.pt.sum(axis=1) - 1.0) <= 1e-9)

        for _ in range(25):
            g = random_weighted_graph(rng, rng.randint(3, 20), p=0.35)
            result = walktrap_result(g, 4)
            for step in result.merges:
                assert abs(step.dsigma - dsigma_scratch(result.model, step.left, step.right)) <= 1e-9

        for _ in range(30):
            g = random_weighted_graph(rng, rng.randint(2, 8))
            partition = walktrap(g, 4)
            q_brute = modularity_brute(g, [set(c.members) for c in partition.communities])
            assert abs(partition.modularity - q_brute) <= 1e-12


def test_c05_walktrap_oracle_fixtures():
    with Budget("criterion 5 (walktrap oracle)", 10.0):
        a = [f"A{i}" for i in range(1, 5)]
        b = [f"B{i}" for i in range(1, 5)]
        bridge = graph_from_edges(
            [(u, v) for u, v in combinations(a, 2)]
            + [(u, v) for u, v in combinations(b, 2)]
            + [("A1", "B1")]
        )
        partition = walktrap(bridge, 4)
        got = sorted(frozenset(c.members) for c in partition.communities)
        _, best = best_partition_brute(bridge)
        assert got == sorted(frozenset(c) for c in best)
        assert got == [frozenset(a), frozenset(b)]

        k4 = graph_from_edges([(u, v) for u, v in combinations("WXYZ", 2)])
        assert len(walktrap(k4, 4).communities) == 1


def test_c06_table_consistency_relation(synthetic_run):
    with Budget("criterion 6 (table consistency)", 5.0):
        with (synthetic_run / "topics.csv").open(encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert rows
        groups: dict[tuple[str, str], list[float]] = {}
        for row in rows:
            implied_total = float(row["vertex"]) / (float(row["cluster_pct"]) / 100.0)
            groups.setdefault((row["source"], row["timeframe"]), []).append(implied_total)
        assert len(groups) >= 20
        for key, ratios in groups.items():
            spread = max(ratios) / min(ratios) - 1.0
            assert spread <= 0.01, f"{key}: ratio spread {spread:.4%}"


def test_c07_spearman_correctness():
    with Budget("criterion 7 (spearman)", 10.0):
        x = [3.0, 1.0, 4.0, 1.5, 9.0]
        assert spearman(x, x) == 1.0
        assert spearman(x, [-v for v in x]) == -1.0
        increasing = [1.0, 2.0, 3.0, 4.0, 7.0]
        assert spearman(increasing, list(reversed(increasing))) == -1.0

        rng = random.Random(99)
        checked = 0
        while checked < 1000:
            n = rng.randint(3, 14)
            xs = [float(rng.randint(0, 5)) for _ in range(n)]
            ys = [float(rng.randint(0, 5)) for _ in range(n)]
            if len(set(xs)) == 1 or len(set(ys)) == 1:
                assert spearman(xs, ys) is None
                continue
            assert abs(spearman(xs, ys) - spearman_brute(xs, ys)) <= 1e-12
            checked += 1

        for _ in range(200):
            n = rng.randint(3, 14)
            xs = rng.sample(range(100), n)
            ys = rng.sample(range(100), n)
            xs, ys = [float(v) for v in xs], [float(v) for v in ys]
            assert abs(spearman(xs, ys) - spearman_d2(xs, ys)) <= 1e-12


def test_c08_single_spike_correlation_ranks_first(synthetic_run):
    with Budget("criterion 8 (single-spike correlation)", 5.0):
        with (synthetic_run / "correlations.csv").open(encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["code"] == "Leisure"
        assert float(rows[0]["rho"]) == 1.0
        others = [float(r["rho"]) for r in rows[1:] if r["rho"] != ""]
        assert all(rho < 1.0 for rho in others)

        with (synthetic_run / "series.csv").open(encoding="utf-8", newline="") as fh:
            series = [r for r in csv.DictReader(fh) if r["code"] == "Leisure"]
        assert len(series) == 2
        for row in series:
            values = [float(row[k]) for k in row if k.startswith("w")]
            assert sum(1 for v in values if v > 0) == 1
            assert values[3] > 0  # the shared fortnight


def test_c09_determinism_and_composability(synthetic_run, tmp_path):
    with Budget("criterion 9 (determinism/composability)", 300.0):
        corpus = str(default_data_path("synthetic_corpus.jsonl"))
        labels = str(default_data_path("synthetic_labels.csv"))

        rerun = tmp_path / "rerun"
        assert main(["run", "--input", corpus, "--labels", labels, "--out", str(rerun)]) == 0

        staged = tmp_path / "staged"
        assert main(["ingest", "--input", corpus, "--out", str(staged)]) == 0
        assert main(["prep", "--out", str(staged)]) == 0
        assert main(["graph", "--out", str(staged)]) == 0
        assert main(["cluster", "--out", str(staged)]) == 0
        assert main(["trends", "--labels", labels, "--out", str(staged)]) == 0

        def tree(root: Path) -> dict[str, bytes]:
            return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}

        base = tree(synthetic_run)
        assert tree(rerun) == base
        assert tree(staged) == base


def test_c10_wordcloud_threshold():
    with Budget("criterion 10 (word-cloud threshold)", 1.0):
        leaves = [f"L{i:02d}" for i in range(12)]
        star = graph_from_edges([("HUB", leaf) for leaf in leaves])
        cloud = wordcloud(star, star.vertices, community_id=1, min_degree=10)
        assert cloud.entries == (("HUB", 12),)
