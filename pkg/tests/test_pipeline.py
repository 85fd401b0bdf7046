"""Engine search stages, batch runs, training-set assembly and config."""

import json

import numpy as np
import pytest

from pmr.evaluation import read_qrels
from pmr.labeler import FEATURE_NAMES, N_FEATURES, PerceptronLabeler
from pmr.pipeline import (
    Engine,
    PipelineConfig,
    SearchSettings,
    build_training_set,
    expansion_summary,
)
from pmr.ranker import RankingParams


def hand_model(**weights):
    model = PerceptronLabeler()
    w = np.zeros(N_FEATURES)
    for name, value in weights.items():
        w[FEATURE_NAMES.index(name)] = value
    model.weights_ = w
    model.n_features_in_ = N_FEATURES
    return model


ALL_RELEVANT = {"bias": 1.0}
ALL_IRRELEVANT = {"bias": -1.0}
# fires on titles with two gene/variant mentions among few tokens
TITLE_GENE_HEAVY = {"gene_title_phrase": 1.0, "bias": -0.2}


@pytest.fixture()
def engine(index, tables):
    return Engine(index, tables)


class TestSearch:
    def test_membership_and_demographic_filter(self, engine, topics):
        outcome = engine.search(topics[0][1])
        pmids = {sa.pmid for sa in outcome.results}
        assert pmids == {"1001", "1004", "1010", "1011"}
        assert "1002" not in pmids  # male-only study, female profile
        assert [sa.rank for sa in outcome.results] == [1, 2, 3, 4]
        assert outcome.total_matched == 4

    def test_depth_truncation(self, index, tables, topics):
        engine = Engine(index, tables, settings=SearchSettings(depth=2))
        outcome = engine.search(topics[0][1])
        assert len(outcome.results) == 2
        assert outcome.total_matched == 4
        assert [sa.rank for sa in outcome.results] == [1, 2]

    def test_labeler_filters_results(self, index, tables, topics):
        engine = Engine(index, tables, model=hand_model(**ALL_IRRELEVANT))
        outcome = engine.search(topics[0][1])
        assert outcome.results == []
        assert outcome.total_matched == 0

    def test_labeler_pass_through_keeps_membership(self, index, tables, topics):
        baseline = Engine(index, tables).search(topics[0][1])
        engine = Engine(index, tables, model=hand_model(**ALL_RELEVANT))
        outcome = engine.search(topics[0][1])
        assert [sa.pmid for sa in outcome.results] == [sa.pmid for sa in baseline.results]
        assert all(sa.label == "relevant" for sa in outcome.results)

    def test_demote_moves_irrelevant_to_tail(self, index, tables, topics):
        model = hand_model(**TITLE_GENE_HEAVY)
        engine = Engine(
            index,
            tables,
            model=model,
            settings=SearchSettings(demote_irrelevant=True),
        )
        outcome = engine.search(topics[0][1])
        pmids = [sa.pmid for sa in outcome.results]
        assert set(pmids) == {"1001", "1004", "1010", "1011"}
        labels = [sa.label for sa in outcome.results]
        # clause of relevant results first, then the demoted block
        first_irrelevant = labels.index("irrelevant")
        assert all(lab == "irrelevant" for lab in labels[first_irrelevant:])
        assert outcome.results[-1].pmid == "1004"
        assert [sa.rank for sa in outcome.results] == [1, 2, 3, 4]

    def test_drop_and_demote_agree_on_relevant_prefix(self, index, tables, topics):
        model = hand_model(**TITLE_GENE_HEAVY)
        drop = Engine(index, tables, model=model).search(topics[0][1])
        demote = Engine(
            index, tables, model=model, settings=SearchSettings(demote_irrelevant=True)
        ).search(topics[0][1])
        kept = [sa.pmid for sa in drop.results]
        assert [sa.pmid for sa in demote.results[: len(kept)]] == kept

    def test_no_rerank_orders_by_raw_score(self, index, tables, topics):
        engine = Engine(index, tables, settings=SearchSettings(use_rerank=False))
        outcome = engine.search(topics[0][1])
        scores = [sa.score for sa in outcome.results]
        assert scores == sorted(scores, reverse=True)
        assert all(sa.r1 == 0 and sa.r2 == 0.0 for sa in outcome.results)

    def test_keep_terms_restricts_matching(self, engine, topics):
        ep = engine.expand(topics[0][1])
        summary = expansion_summary(ep)
        all_terms = set(summary["disease_terms"]) | set(summary["drug_terms"])
        all_terms |= set(summary["treatment_keywords"])
        for gene in summary["genes"]:
            all_terms |= set(gene["terms"])
            all_terms |= set(gene["candidate_variants"])
        # 1004 reaches the disease clause only through this synonym
        outcome = engine.search(topics[0][1], keep_terms=all_terms - {"adenocarcinoma of lung"})
        pmids = {sa.pmid for sa in outcome.results}
        assert pmids == {"1001", "1010", "1011"}

    def test_per_call_params_override(self, index, tables, topics):
        engine = Engine(index, tables)
        default = engine.search(topics[0][1])
        flat = engine.search(topics[0][1], params=RankingParams(w_h=0.0, w_y=0.0))
        assert {sa.pmid for sa in default.results} == {sa.pmid for sa in flat.results}
        assert all(
            sa.r2 == pytest.approx((sa.score % 20.0) / 20.0) for sa in flat.results
        )

    def test_topic_two_and_three(self, engine, topics):
        # 1006 names the drug dabrafenib but never the gene, so the
        # mandatory gene clause keeps it out
        melanoma = engine.search(topics[1][1])
        assert {sa.pmid for sa in melanoma.results} == {"1005", "1012"}
        gastric = engine.search(topics[2][1])
        assert {sa.pmid for sa in gastric.results} == {"1007", "1009"}


class TestRunTopics:
    def test_deterministic_and_well_formed(self, engine, topics):
        run_a, fail_a = engine.run_topics(topics, tag="t")
        run_b, fail_b = engine.run_topics(topics, tag="t")
        assert fail_a == fail_b == []
        assert run_a == run_b
        for entries in run_a.values():
            assert [e.rank for e in entries] == list(range(1, len(entries) + 1))
            scores = [e.score for e in entries]
            assert scores == sorted(scores, reverse=True)
            assert scores[0] == float(len(entries))
            assert all(e.tag == "t" for e in entries)

    def test_parallel_equals_serial(self, engine, topics):
        serial, _ = engine.run_topics(topics, jobs=1)
        parallel, _ = engine.run_topics(topics, jobs=3)
        assert serial == parallel

    def test_failure_isolation(self, engine, topics):
        broken = topics + [("bad", None)]
        run, failures = engine.run_topics(broken)
        assert set(run) == {tid for tid, _ in topics}
        assert len(failures) == 1
        assert failures[0].startswith("topic bad:")


class TestResultPayload:
    def test_fields(self, engine, topics):
        outcome = engine.search(topics[0][1])
        payload = engine.result_payload(outcome.results[0])
        assert set(payload) == {
            "pmid",
            "title",
            "journal",
            "year",
            "rank",
            "score",
            "r1",
            "r2",
            "label",
            "sigma_h",
            "sigma_y",
            "matched_terms",
        }
        assert 0.0 <= payload["sigma_h"] <= 1.0
        assert 0.0 <= payload["sigma_y"] <= 1.0
        assert payload["rank"] == 1
        assert isinstance(payload["matched_terms"], list)


class TestExpansionSummary:
    def test_topic_one(self, engine, topics):
        summary = expansion_summary(engine.expand(topics[0][1]))
        assert summary["disease"] == "Lung adenocarcinoma"
        assert summary["disease_terms"] == [
            "adenocarcinoma of lung",
            "lung adenocarcinoma",
            "lung cancer",
        ]
        (gene,) = summary["genes"]
        assert gene["name"] == "KRAS"
        assert gene["specified_variant"] == "g12c"
        assert gene["candidate_variants"] == []
        assert summary["gender"] == "female"
        assert summary["age"] == 61
        assert "sotorasib" in summary["drug_terms"]


class TestBuildTrainingSet:
    def test_join_shape_and_grades(self, index, tables, topics, qrels_path):
        qrels = read_qrels(qrels_path)
        X, y, missing = build_training_set(index, tables, topics, qrels)
        assert X.shape == (8, N_FEATURES)
        assert missing == 0
        assert sorted(set(y.tolist())) == [0, 1, 2]
        # bias column is always 1
        assert (X[:, -1] == 1.0).all()

    def test_missing_pmids_counted(self, index, tables, topics, qrels_path):
        qrels = read_qrels(qrels_path)
        qrels["1"]["99999"] = 2
        X, y, missing = build_training_set(index, tables, topics, qrels)
        assert missing == 1
        assert X.shape[0] == 8

    def test_topics_without_judgments_skipped(self, index, tables, topics):
        X, y, missing = build_training_set(index, tables, topics, {"1": {"1001": 2}})
        assert X.shape[0] == 1

    def test_empty(self, index, tables):
        X, y, missing = build_training_set(index, tables, [], {})
        assert X.shape[0] == 0 and y.shape[0] == 0 and missing == 0


class TestPipelineConfig:
    def test_from_file_nested(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(
            json.dumps(
                {
                    "corpus": "corpus.jsonl",
                    "tag": "mytag",
                    "jobs": 4,
                    "ranking": {"k": 10.0, "w_h": 0.5},
                    "settings": {"depth": 50, "use_labeler": False},
                    "treatment_keywords": ["therapy"],
                    "optimizer": "sgd",
                }
            )
        )
        cfg = PipelineConfig.from_file(path)
        assert cfg.corpus == "corpus.jsonl"
        assert cfg.tag == "mytag"
        assert cfg.jobs == 4
        assert cfg.ranking.k == 10.0
        assert cfg.ranking.w_h == 0.5
        assert cfg.ranking.w_s == 1.0  # untouched default
        assert cfg.settings.depth == 50
        assert cfg.settings.use_labeler is False
        assert cfg.treatment_keywords == ("therapy",)
        assert cfg.optimizer == "sgd"

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"corpsu": "x"}')
        with pytest.raises(ValueError, match="corpsu"):
            PipelineConfig.from_file(path)

    def test_invalid_ranking_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"ranking": {"k": -1.0}}')
        with pytest.raises(ValueError):
            PipelineConfig.from_file(path)

    def test_require_unset(self):
        with pytest.raises(FileNotFoundError, match="corpus"):
            PipelineConfig().require("corpus")

    def test_require_missing_file(self):
        cfg = PipelineConfig(corpus="/no/such/file.jsonl")
        with pytest.raises(FileNotFoundError, match="does not exist"):
            cfg.require("corpus")

    def test_require_output_paths_need_no_file(self):
        cfg = PipelineConfig(run="out/run.txt", report="out/report.json")
        cfg.require("run", "report")
