"""End-to-end retrieval pipeline: expand, search, label, rank.

The Engine bundles the immutable index, ontology tables, optional
perceptron model and ranking parameters, and runs the per-topic cycle
behind both the CLI and the HTTP service, so the two surfaces cannot
drift apart.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .evaluation import RunEntry
from .index import Index
from .labeler import PerceptronLabeler, extract_features
from .ontology import OntologyTables
from .profile import (
    DEFAULT_TREATMENT_KEYWORDS,
    ExpandedProfile,
    PatientProfile,
    expand_profile,
    restrict_expansion,
)
from .query import Query, ScoredArticle, demographic_compatible, execute, formulate_query
from .ranker import RankingParams, rank, rank_by_score, sigmoid_norm

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchSettings:
    """Feature toggles and knobs for one search or run."""

    variant_boost: float = 2.0
    other_boost: float = 1.0
    include_variants: bool = True
    use_labeler: bool = True
    use_rerank: bool = True
    demote_irrelevant: bool = False  # demote instead of dropping labeled-irrelevant
    depth: int = 1000


@dataclass
class SearchOutcome:
    results: list[ScoredArticle]
    expanded: ExpandedProfile
    query: Query
    total_matched: int


class Engine:
    """Read-only retrieval engine over loaded resources."""

    def __init__(
        self,
        index: Index,
        tables: OntologyTables,
        model: PerceptronLabeler | None = None,
        params: RankingParams = RankingParams(),
        settings: SearchSettings = SearchSettings(),
        treatment_keywords=DEFAULT_TREATMENT_KEYWORDS,
    ):
        self.index = index
        self.tables = tables
        self.model = model
        self.params = params
        self.settings = settings
        self.treatment_keywords = tuple(treatment_keywords)

    def expand(self, profile: PatientProfile) -> ExpandedProfile:
        return expand_profile(profile, self.tables, self.treatment_keywords)

    def search(
        self,
        profile: PatientProfile,
        params: RankingParams | None = None,
        settings: SearchSettings | None = None,
        keep_terms: set[str] | None = None,
    ) -> SearchOutcome:
        """Full cycle for one profile: expand, match, filter, label, rank."""
        params = params or self.params
        settings = settings or self.settings

        ep = self.expand(profile)
        if keep_terms is not None:
            ep = restrict_expansion(ep, keep_terms)
        query = formulate_query(
            ep,
            variant_boost=settings.variant_boost,
            other_boost=settings.other_boost,
            include_variants=settings.include_variants,
        )
        hits = execute(query, self.index)
        hits = [
            sa
            for sa in hits
            if demographic_compatible(self.index.articles[sa.pmid], profile)
        ]

        demoted: list[ScoredArticle] = []
        if self.model is not None and settings.use_labeler and hits:
            feats = np.stack(
                [extract_features(self.index.articles[sa.pmid], ep) for sa in hits]
            )
            preds = self.model.predict(feats)
            for sa, pred in zip(hits, preds):
                sa.label = "relevant" if pred > 0 else "irrelevant"
            kept = [sa for sa in hits if sa.label == "relevant"]
            if settings.demote_irrelevant:
                demoted = [sa for sa in hits if sa.label == "irrelevant"]
            hits = kept

        if settings.use_rerank:
            ordered = rank(hits, self.index.articles, self.tables.journals, params)
            demoted_ordered = rank(
                demoted, self.index.articles, self.tables.journals, params
            )
        else:
            ordered = rank_by_score(hits)
            demoted_ordered = rank_by_score(demoted)
        for sa in demoted_ordered:
            sa.rank += len(ordered)
        ordered = ordered + demoted_ordered

        total = len(ordered)
        return SearchOutcome(
            results=ordered[: settings.depth],
            expanded=ep,
            query=query,
            total_matched=total,
        )

    def run_topics(
        self,
        topics: list[tuple[str, PatientProfile]],
        tag: str = "pmr",
        jobs: int = 1,
        params: RankingParams | None = None,
        settings: SearchSettings | None = None,
    ) -> tuple[dict[str, list[RunEntry]], list[str]]:
        """Search every topic (optionally in parallel) into run-file entries.

        Per-topic failures are collected and reported; the other topics
        still complete.  Output is keyed and emitted by topic id, so the
        result does not depend on worker scheduling.
        """

        def one(topic) -> tuple[str, list[RunEntry]]:
            topic_id, profile = topic
            outcome = self.search(profile, params=params, settings=settings)
            if not outcome.results:
                log.warning("topic %s matched no articles", topic_id)
            return topic_id, [
                RunEntry(
                    pmid=sa.pmid,
                    rank=sa.rank,
                    score=float(len(outcome.results) - sa.rank + 1),
                    tag=tag,
                )
                for sa in outcome.results
            ]

        run: dict[str, list[RunEntry]] = {}
        failures: list[str] = []
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                futures = {pool.submit(one, t): t[0] for t in topics}
                for fut, topic_id in futures.items():
                    try:
                        tid, entries = fut.result()
                        run[tid] = entries
                    except Exception as exc:  # noqa: BLE001 - per-topic isolation
                        failures.append(f"topic {topic_id}: {exc}")
        else:
            for topic in topics:
                try:
                    tid, entries = one(topic)
                    run[tid] = entries
                except Exception as exc:  # noqa: BLE001
                    failures.append(f"topic {topic[0]}: {exc}")
        for msg in failures:
            log.error("run failure: %s", msg)
        return run, failures

    def result_payload(self, sa: ScoredArticle, params: RankingParams | None = None) -> dict:
        """Score breakdown for one ranked article, as served to clients."""
        params = params or self.params
        article = self.index.articles[sa.pmid]
        h = float(self.tables.journals.impact_of(article.journal))
        return {
            "pmid": sa.pmid,
            "title": article.title,
            "journal": article.journal,
            "year": article.year,
            "rank": sa.rank,
            "score": sa.score,
            "r1": sa.r1,
            "r2": sa.r2,
            "label": sa.label,
            "sigma_h": sigmoid_norm(h, params.h_axis, params.c_h),
            "sigma_y": sigmoid_norm(float(article.year), params.y_axis, params.c_y),
            "matched_terms": list(sa.matched_terms),
        }


def expansion_summary(ep: ExpandedProfile) -> dict:
    """JSON-friendly view of an expansion, for vetting before a search."""
    return {
        "disease": ep.disease,
        "disease_terms": sorted(ep.disease_terms),
        "genes": [
            {
                "name": g.name,
                "terms": sorted(g.terms),
                "specified_variant": g.specified_variant,
                "candidate_variants": sorted(g.candidate_variants),
            }
            for g in ep.genes
        ],
        "drug_terms": sorted(ep.drug_terms),
        "treatment_keywords": list(ep.treatment_keywords),
        "age": ep.age,
        "gender": ep.gender,
        "other": list(ep.other),
    }


def build_training_set(
    index: Index,
    tables: OntologyTables,
    topics: list[tuple[str, PatientProfile]],
    qrels: dict[str, dict[str, int]],
    treatment_keywords=DEFAULT_TREATMENT_KEYWORDS,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Join qrels grades to features; returns (X, y, judged-but-unindexed count)."""
    xs: list[np.ndarray] = []
    ys: list[int] = []
    missing = 0
    for topic_id, profile in topics:
        judged = qrels.get(topic_id)
        if not judged:
            continue
        ep = expand_profile(profile, tables, treatment_keywords)
        for pmid in sorted(judged):
            article = index.articles.get(pmid)
            if article is None:
                missing += 1
                continue
            xs.append(extract_features(article, ep))
            ys.append(judged[pmid])
    if not xs:
        return np.zeros((0, 0)), np.zeros(0, dtype=int), missing
    return np.stack(xs), np.asarray(ys, dtype=int), missing


@dataclass
class PipelineConfig:
    """File-backed settings shared by the CLI subcommands."""

    corpus: str | None = None
    index: str | None = None
    ontology_dir: str | None = None
    topics: str | None = None
    qrels: str | None = None
    model: str | None = None
    run: str | None = None
    report: str | None = None
    tag: str = "pmr"
    jobs: int = 1
    treatment_keywords: tuple[str, ...] = DEFAULT_TREATMENT_KEYWORDS
    ranking: RankingParams = field(default_factory=RankingParams)
    settings: SearchSettings = field(default_factory=SearchSettings)
    optimizer: str = "adadelta"
    learning_rate: float = 0.01
    epochs: int = 10
    seed: int = 42

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        cfg = cls()
        ranking = data.pop("ranking", {})
        settings = data.pop("settings", {})
        keywords = data.pop("treatment_keywords", None)
        for key, value in data.items():
            if not hasattr(cfg, key):
                raise ValueError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
        if keywords is not None:
            cfg.treatment_keywords = tuple(keywords)
        cfg.ranking = replace(cfg.ranking, **ranking)
        cfg.settings = replace(cfg.settings, **settings)
        cfg.ranking.validate()
        return cfg

    def require(self, *names: str) -> None:
        for name in names:
            value = getattr(self, name)
            if not value:
                raise FileNotFoundError(f"required path {name!r} is not configured")
            if name != "run" and name != "report" and not Path(value).exists():
                raise FileNotFoundError(f"{name} path does not exist: {value}")
