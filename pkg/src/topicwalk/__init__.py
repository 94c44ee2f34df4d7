"""Time-windowed word-graph topic detection for short-text streams.

The pipeline ingests timestamped posts from two (or more) source accounts,
merges rapid-fire posts into threads, normalizes the text into token
sequences, builds one directed weighted word graph per source and fortnight,
clusters each graph with a short-random-walk agglomerative method, and turns
hand-labeled communities into per-topic time series whose cross-source
agreement is measured with Spearman's rho.
"""

__version__ = "0.1.0"

from topicwalk.corpus import Post, Thread, ingest, merge_threads
from topicwalk.textprep import Document, PrepConfig, StripRules, default_config, load_config, preprocess
from topicwalk.graph import Window, WordGraph, build_graph, export_edgelist, import_edgelist, partition_windows
from topicwalk.community import Partition, WordCloud, modularity, top_communities, walktrap, wordcloud
from topicwalk.trends import CorrelationRow, TopicSeries, assemble_series, correlation_table, spearman, topic_table

__all__ = [
    "Post",
    "Thread",
    "ingest",
    "merge_threads",
    "Document",
    "PrepConfig",
    "StripRules",
    "default_config",
    "load_config",
    "preprocess",
    "Window",
    "WordGraph",
    "build_graph",
    "export_edgelist",
    "import_edgelist",
    "partition_windows",
    "Partition",
    "WordCloud",
    "modularity",
    "top_communities",
    "walktrap",
    "wordcloud",
    "CorrelationRow",
    "TopicSeries",
    "assemble_series",
    "correlation_table",
    "spearman",
    "topic_table",
]
