"""Pipeline orchestration and the ``topicwalk`` command line.

Each stage consumes the previous stage's files inside one run directory and
writes its own, so stages can run separately or through ``run`` with
identical results:

    threads.jsonl                         (ingest)
    documents.jsonl                       (prep)
    windows.json, graphs/<source>/...     (graph)
    partitions/, wordclouds/              (cluster)
    topics.csv, series.csv, correlations.csv  (trends, needs a label file)
    run-manifest.json                     (resolved config echo)

Everything is computed by exact probability propagation, no sampling, so a
rerun with the same inputs produces a byte-identical tree. A failed ``run``
leaves no run-manifest.json behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

from topicwalk import __version__, community, corpus, graph as graphmod, textprep, trends

MANIFEST_NAME = "run-manifest.json"


@dataclass(frozen=True)
class IngestConfig:
    input: str | None
    url: str | None
    format: str | None
    gap_seconds: int


@dataclass(frozen=True)
class PrepConfigPaths:
    stopwords: str
    boilerplate: str
    merges: str
    keep_hashtag_body: bool
    strip_digits: bool


@dataclass(frozen=True)
class GraphConfig:
    window_days: int
    anchor: str | None


@dataclass(frozen=True)
class ClusterConfig:
    t: int
    top_k: int
    min_pct: float
    min_degree: int


@dataclass(frozen=True)
class TrendsConfig:
    labels: str | None
    source_a: str | None
    source_b: str | None


def _write_manifest(outdir: Path, stages: dict[str, dict]) -> None:
    payload = {"version": __version__, "deterministic": True, "stages": stages}
    with (outdir / MANIFEST_NAME).open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def _update_manifest(outdir: Path, stage: str, cfg: dict) -> None:
    path = outdir / MANIFEST_NAME
    stages: dict[str, dict] = {}
    if path.exists():
        with path.open("r", encoding="utf-8") as fh:
            stages = json.load(fh).get("stages", {})
    stages[stage] = cfg
    _write_manifest(outdir, stages)


def _window_file(base: Path, source: str, index: int, suffix: str) -> Path:
    return base / source / f"window_{index:02d}{suffix}"


def stage_ingest(outdir: Path, cfg: IngestConfig) -> None:
    if cfg.gap_seconds <= 0:
        raise ValueError(f"gap_seconds must be positive, got {cfg.gap_seconds}")
    if cfg.url is not None:
        posts = corpus.fetch(cfg.url)
    elif cfg.input is not None:
        posts = corpus.ingest(cfg.input, cfg.format)
    else:
        raise ValueError("ingest needs an input file or a url")
    threads = corpus.merge_threads(posts, cfg.gap_seconds)
    corpus.write_threads(threads, outdir / "threads.jsonl")


def stage_prep(outdir: Path, cfg: PrepConfigPaths) -> None:
    threads = corpus.read_threads(outdir / "threads.jsonl")
    strip = textprep.StripRules(keep_hashtag_body=cfg.keep_hashtag_body, digits=cfg.strip_digits)
    prep = textprep.load_config(cfg.stopwords, cfg.boilerplate, cfg.merges, strip)
    documents = [textprep.preprocess(t, prep) for t in threads]
    documents = [d for d in documents if d.tokens]
    textprep.write_documents(documents, outdir / "documents.jsonl")


def stage_graph(outdir: Path, cfg: GraphConfig) -> None:
    documents = textprep.read_documents(outdir / "documents.jsonl")
    anchor = None
    if cfg.anchor is not None:
        anchor = datetime.fromisoformat(cfg.anchor).replace(tzinfo=timezone.utc)
    assignment = graphmod.partition_windows(documents, cfg.window_days, anchor)
    windows = sorted(assignment, key=lambda w: w.index)
    sources = sorted({d.source for d in documents})
    graphmod.write_windows_json(windows, sources, cfg.window_days, outdir / "windows.json")

    for source in sources:
        (outdir / "graphs" / source).mkdir(parents=True, exist_ok=True)
        for window in windows:
            docs = [d for d in assignment[window] if d.source == source]
            wg = graphmod.build_graph(docs, source, window)
            graphmod.export_edgelist(wg, _window_file(outdir / "graphs", source, window.index, ".tsv"))
            summary_path = _window_file(outdir / "graphs", source, window.index, ".summary.json")
            with summary_path.open("w", encoding="utf-8") as fh:
                json.dump(graphmod.graph_summary(wg), fh, ensure_ascii=False, indent=2, sort_keys=True)
                fh.write("\n")


def stage_cluster(outdir: Path, cfg: ClusterConfig) -> None:
    if not 2 <= cfg.t <= 8:
        raise ValueError(f"walk length t must be in 2..8, got {cfg.t}")
    if cfg.top_k <= 0:
        raise ValueError(f"top_k must be positive, got {cfg.top_k}")
    if cfg.min_pct < 0:
        raise ValueError(f"min_pct must be non-negative, got {cfg.min_pct}")
    if cfg.min_degree < 0:
        raise ValueError(f"min_degree must be non-negative, got {cfg.min_degree}")
    windows, sources, _ = graphmod.read_windows_json(outdir / "windows.json")
    for source in sources:
        (outdir / "partitions" / source).mkdir(parents=True, exist_ok=True)
        (outdir / "wordclouds" / source).mkdir(parents=True, exist_ok=True)
        for window in windows:
            edge_path = _window_file(outdir / "graphs", source, window.index, ".tsv")
            wg = graphmod.import_edgelist(edge_path, source, window)
            partition = community.walktrap(wg, cfg.t)
            community.write_partition_json(
                partition, _window_file(outdir / "partitions", source, window.index, ".json")
            )
            clouds = [
                community.wordcloud(wg, info.members, info.id, cfg.min_degree)
                for info in community.top_communities(partition, cfg.top_k, cfg.min_pct)
            ]
            community.write_wordclouds_json(
                clouds, _window_file(outdir / "wordclouds", source, window.index, ".json")
            )


def stage_trends(outdir: Path, cfg: TrendsConfig) -> None:
    if cfg.labels is None:
        print("trends: no label file supplied; skipping topics/series/correlations", file=sys.stderr)
        return
    windows, sources, _ = graphmod.read_windows_json(outdir / "windows.json")
    source_a = cfg.source_a
    source_b = cfg.source_b
    if (source_a is None) != (source_b is None):
        raise ValueError("pass both --source-a and --source-b, or neither")
    if source_a is None:
        if len(sources) != 2:
            raise ValueError(
                f"correlation needs exactly two sources or explicit --source-a/--source-b; found {sources}"
            )
        source_a, source_b = sources

    partitions: dict[tuple[str, int], community.Partition] = {}
    for source in sources:
        for window in windows:
            path = _window_file(outdir / "partitions", source, window.index, ".json")
            partitions[(source, window.index)] = community.read_partition_json(path)

    labels = trends.load_labels(cfg.labels)
    series = trends.assemble_series(labels, partitions, len(windows))
    trends.write_topics_csv(trends.topic_table(partitions, labels), outdir / "topics.csv")
    trends.write_series_csv(series, outdir / "series.csv")
    if len(windows) >= 3:
        table = trends.correlation_table(series, source_a, source_b)
    else:
        print(f"trends: only {len(windows)} windows, too few for rank correlation", file=sys.stderr)
        table = []
    trends.write_correlations_csv(table, outdir / "correlations.csv")


_STAGE_RUNNERS = {
    "ingest": stage_ingest,
    "prep": stage_prep,
    "graph": stage_graph,
    "cluster": stage_cluster,
    "trends": stage_trends,
}


def _run_stage(outdir: Path, stage: str, cfg, update_manifest: bool = True) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        _STAGE_RUNNERS[stage](outdir, cfg)
    except (ValueError, FileNotFoundError) as exc:
        raise type(exc)(f"stage {stage!r}: {exc}") from None
    if update_manifest:
        _update_manifest(outdir, stage, asdict(cfg))


def _validate_run_config(
    ingest_cfg: IngestConfig, graph_cfg: GraphConfig, cluster_cfg: ClusterConfig
) -> None:
    if ingest_cfg.gap_seconds <= 0:
        raise ValueError(f"gap_seconds must be positive, got {ingest_cfg.gap_seconds}")
    if graph_cfg.window_days <= 0:
        raise ValueError(f"window_days must be positive, got {graph_cfg.window_days}")
    if not 2 <= cluster_cfg.t <= 8:
        raise ValueError(f"walk length t must be in 2..8, got {cluster_cfg.t}")
    if cluster_cfg.top_k <= 0:
        raise ValueError(f"top_k must be positive, got {cluster_cfg.top_k}")
    if cluster_cfg.min_pct < 0:
        raise ValueError(f"min_pct must be non-negative, got {cluster_cfg.min_pct}")
    if cluster_cfg.min_degree < 0:
        raise ValueError(f"min_degree must be non-negative, got {cluster_cfg.min_degree}")


def run_pipeline(
    outdir: Path,
    ingest_cfg: IngestConfig,
    prep_cfg: PrepConfigPaths,
    graph_cfg: GraphConfig,
    cluster_cfg: ClusterConfig,
    trends_cfg: TrendsConfig,
) -> None:
    """Run all five stages; the manifest appears only after full success."""
    _validate_run_config(ingest_cfg, graph_cfg, cluster_cfg)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = outdir / MANIFEST_NAME
    if manifest.exists():
        manifest.unlink()
    stages = (
        ("ingest", ingest_cfg),
        ("prep", prep_cfg),
        ("graph", graph_cfg),
        ("cluster", cluster_cfg),
        ("trends", trends_cfg),
    )
    for stage, cfg in stages:
        _run_stage(outdir, stage, cfg, update_manifest=False)
    _write_manifest(outdir, {stage: asdict(cfg) for stage, cfg in stages})


def _add_out_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="run directory (or set TOPICWALK_OUT)")


def _resolve_out(args: argparse.Namespace) -> Path:
    out = args.out or os.environ.get("TOPICWALK_OUT")
    if not out:
        raise ValueError("no output directory: pass --out or set TOPICWALK_OUT")
    return Path(out)


def _add_ingest_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", help="posts file (JSONL or CSV)")
    parser.add_argument("--url", help="HTTP endpoint serving the JSONL format (mock-server ingest)")
    parser.add_argument("--format", choices=["jsonl", "csv"], help="force the input format")
    parser.add_argument("--gap-seconds", type=int, default=corpus.DEFAULT_GAP_SECONDS)


def _add_prep_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--stopwords", default=str(textprep.default_data_path("stopwords.txt")))
    parser.add_argument("--boilerplate", default=str(textprep.default_data_path("boilerplate.txt")))
    parser.add_argument("--merges", default=str(textprep.default_data_path("merges.txt")))
    parser.add_argument("--keep-hashtag-body", action="store_true")
    parser.add_argument("--strip-digits", action="store_true")


def _add_graph_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--window-days", type=int, default=graphmod.DEFAULT_WINDOW_DAYS)
    parser.add_argument("--anchor", help="window 1 start date, YYYY-MM-DD (default: earliest document)")


def _add_cluster_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--t", type=int, default=community.DEFAULT_WALK_LENGTH, help="walk length (2..8)")
    parser.add_argument("--top-k", type=int, default=community.DEFAULT_TOP_K)
    parser.add_argument("--min-pct", type=float, default=0.0, help="drop communities below this cluster %%")
    parser.add_argument("--min-degree", type=int, default=community.DEFAULT_MIN_DEGREE)


def _add_trends_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--labels", help="community label CSV (source,window_index,community_id,code)")
    parser.add_argument("--source-a")
    parser.add_argument("--source-b")


def _ingest_cfg(args: argparse.Namespace) -> IngestConfig:
    return IngestConfig(input=args.input, url=args.url, format=args.format, gap_seconds=args.gap_seconds)


def _prep_cfg(args: argparse.Namespace) -> PrepConfigPaths:
    return PrepConfigPaths(
        stopwords=args.stopwords,
        boilerplate=args.boilerplate,
        merges=args.merges,
        keep_hashtag_body=args.keep_hashtag_body,
        strip_digits=args.strip_digits,
    )


def _graph_cfg(args: argparse.Namespace) -> GraphConfig:
    return GraphConfig(window_days=args.window_days, anchor=args.anchor)


def _cluster_cfg(args: argparse.Namespace) -> ClusterConfig:
    return ClusterConfig(t=args.t, top_k=args.top_k, min_pct=args.min_pct, min_degree=args.min_degree)


def _trends_cfg(args: argparse.Namespace) -> TrendsConfig:
    return TrendsConfig(labels=args.labels, source_a=args.source_a, source_b=args.source_b)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topicwalk",
        description="Fortnight-windowed word-graph topic detection over short-text corpora.",
    )
    parser.add_argument("--version", action="version", version=f"topicwalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate posts and merge rapid posts into threads")
    _add_out_flag(p)
    _add_ingest_flags(p)

    p = sub.add_parser("prep", help="normalize thread text into token documents")
    _add_out_flag(p)
    _add_prep_flags(p)

    p = sub.add_parser("graph", help="build per-source per-window word graphs")
    _add_out_flag(p)
    _add_graph_flags(p)

    p = sub.add_parser("cluster", help="detect communities in each word graph")
    _add_out_flag(p)
    _add_cluster_flags(p)

    p = sub.add_parser("trends", help="topic tables, time series, and cross-source correlations")
    _add_out_flag(p)
    _add_trends_flags(p)

    p = sub.add_parser("run", help="run the whole pipeline")
    _add_out_flag(p)
    _add_ingest_flags(p)
    _add_prep_flags(p)
    _add_graph_flags(p)
    _add_cluster_flags(p)
    _add_trends_flags(p)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        outdir = _resolve_out(args)
        if args.command == "run":
            run_pipeline(
                outdir,
                _ingest_cfg(args),
                _prep_cfg(args),
                _graph_cfg(args),
                _cluster_cfg(args),
                _trends_cfg(args),
            )
        else:
            cfg_builders = {
                "ingest": _ingest_cfg,
                "prep": _prep_cfg,
                "graph": _graph_cfg,
                "cluster": _cluster_cfg,
                "trends": _trends_cfg,
            }
            _run_stage(outdir, args.command, cfg_builders[args.command](args))
    except (ValueError, FileNotFoundError) as exc:
        print(f"topicwalk: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"topicwalk: unexpected failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
