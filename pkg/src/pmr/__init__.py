"""Precision-medicine article retrieval: index, expand, retrieve, label, rank."""

from .evaluation import MetricReport, RunEntry, evaluate, read_qrels, read_run, write_run
from .index import Article, Index, ingest_corpus, ingest_corpus_file, load_snapshot, save_snapshot, tokenize
from .labeler import PerceptronLabeler, extract_features, load_model, save_model
from .ontology import OntologyTables, empty_tables, load_tables
from .pipeline import Engine, PipelineConfig, SearchSettings, build_training_set
from .profile import (
    DEFAULT_TREATMENT_KEYWORDS,
    ExpandedProfile,
    GeneSpec,
    PatientProfile,
    expand_profile,
    parse_topics,
)
from .query import Query, ScoredArticle, demographic_compatible, execute, formulate_query
from .ranker import RankingParams, rank, rank_by_score, sigmoid_norm

__version__ = "0.1.0"

__all__ = [
    "Article",
    "DEFAULT_TREATMENT_KEYWORDS",
    "Engine",
    "ExpandedProfile",
    "GeneSpec",
    "Index",
    "MetricReport",
    "OntologyTables",
    "PatientProfile",
    "PerceptronLabeler",
    "PipelineConfig",
    "Query",
    "RankingParams",
    "RunEntry",
    "ScoredArticle",
    "SearchSettings",
    "build_training_set",
    "demographic_compatible",
    "empty_tables",
    "evaluate",
    "execute",
    "expand_profile",
    "extract_features",
    "formulate_query",
    "ingest_corpus",
    "ingest_corpus_file",
    "load_model",
    "load_snapshot",
    "load_tables",
    "parse_topics",
    "rank",
    "rank_by_score",
    "read_qrels",
    "read_run",
    "save_model",
    "save_snapshot",
    "sigmoid_norm",
    "tokenize",
    "write_run",
    "__version__",
]
