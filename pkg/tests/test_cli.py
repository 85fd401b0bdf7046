"""End-to-end command-line runs against the committed fixtures."""

import json

import pytest

from pmr.cli import build_parser, main
from pmr.index import load_snapshot
from pmr.labeler import load_model


@pytest.fixture(scope="module")
def workspace(tmp_path_factory, data_dir):
    """Shared snapshot built once through the CLI itself."""
    ws = tmp_path_factory.mktemp("cli")
    code = main(
        [
            "index",
            "--corpus",
            str(data_dir / "corpus.jsonl"),
            "--index",
            str(ws / "index.json"),
        ]
    )
    assert code == 0
    return ws


def search_argv(workspace, ontology_dir, *extra):
    return [
        "search",
        "--index",
        str(workspace / "index.json"),
        "--ontology-dir",
        str(ontology_dir),
        "--disease",
        "Lung adenocarcinoma",
        "--gene",
        "KRAS (G12C)",
        "--age",
        "61",
        "--gender",
        "female",
        "--other",
        "Hypertension",
        "--other",
        "Hypercholesterolemia",
        *extra,
    ]


class TestIndex:
    def test_summary_and_snapshot(self, workspace, capsys, data_dir):
        code = main(
            [
                "index",
                "--corpus",
                str(data_dir / "corpus.jsonl"),
                "--index",
                str(workspace / "again.json"),
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "read 12 records: indexed 11, filtered 1" in out
        assert "snapshot written to" in out
        index = load_snapshot(workspace / "again.json")
        assert index.n_docs == 11

    def test_missing_corpus_is_usage_error(self, capsys, tmp_path):
        code = main(["index", "--corpus", str(tmp_path / "nope.jsonl"), "--index", "x"])
        err = capsys.readouterr().err
        assert code == 2
        assert "error:" in err
        assert "corpus" in err


class TestExpand:
    def test_all_topics_json(self, capsys, ontology_dir, data_dir):
        code = main(
            [
                "expand",
                "--ontology-dir",
                str(ontology_dir),
                "--topics",
                str(data_dir / "topics.json"),
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        payload = json.loads(out)
        assert set(payload) == {"1", "2", "3"}
        assert "sotorasib" in payload["1"]["drug_terms"]

    def test_single_topic_filter(self, capsys, ontology_dir, data_dir):
        code = main(
            [
                "expand",
                "--ontology-dir",
                str(ontology_dir),
                "--topics",
                str(data_dir / "topics.json"),
                "--topic",
                "2",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert set(json.loads(out)) == {"2"}

    def test_unknown_topic_fails(self, capsys, ontology_dir, data_dir):
        code = main(
            [
                "expand",
                "--ontology-dir",
                str(ontology_dir),
                "--topics",
                str(data_dir / "topics.json"),
                "--topic",
                "42",
            ]
        )
        assert code == 1
        assert "no topic with id" in capsys.readouterr().err


class TestSearch:
    def test_table_output(self, workspace, ontology_dir, capsys):
        code = main(search_argv(workspace, ontology_dir))
        out = capsys.readouterr().out
        assert code == 0
        assert "4 of 4 matched articles:" in out
        for pmid in ("1001", "1004", "1010", "1011"):
            assert pmid in out
        assert "1002" not in out

    def test_explain_lists_clause_contributions(self, workspace, ontology_dir, capsys):
        code = main(search_argv(workspace, ontology_dir, "--explain"))
        out = capsys.readouterr().out
        assert code == 0
        assert "query:" in out
        assert "disease:" in out
        assert "gene:KRAS:" in out

    def test_missing_disease_is_usage_error(self, workspace, ontology_dir, capsys):
        code = main(
            [
                "search",
                "--index",
                str(workspace / "index.json"),
                "--ontology-dir",
                str(ontology_dir),
            ]
        )
        assert code == 2
        assert "--disease is required" in capsys.readouterr().err

    def test_bad_gender_is_usage_error(self, workspace, ontology_dir, capsys):
        argv = search_argv(workspace, ontology_dir)
        argv[argv.index("female")] = "unknown"
        assert main(argv) == 2
        assert "--gender" in capsys.readouterr().err

    def test_invalid_ranking_flag_is_usage_error(self, workspace, ontology_dir, capsys):
        code = main(search_argv(workspace, ontology_dir, "--k", "-5"))
        assert code == 2
        assert "k must be" in capsys.readouterr().err

    def test_depth_flag_truncates(self, workspace, ontology_dir, capsys):
        code = main(search_argv(workspace, ontology_dir, "--depth", "2"))
        out = capsys.readouterr().out
        assert code == 0
        assert "2 of 4 matched articles:" in out


class TestTrainRunEvaluate:
    def test_full_loop(self, workspace, ontology_dir, data_dir, capsys):
        model_path = workspace / "model.json"
        code = main(
            [
                "train",
                "--index",
                str(workspace / "index.json"),
                "--ontology-dir",
                str(ontology_dir),
                "--topics",
                str(data_dir / "topics.json"),
                "--qrels",
                str(data_dir / "qrels.txt"),
                "--model",
                str(model_path),
                "--optimizer",
                "adagrad",
                "--epochs",
                "20",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "trained on 8 examples" in out
        assert f"model written to {model_path}" in out
        model = load_model(model_path)
        assert model.optimizer == "adagrad"

        run_path = workspace / "run.txt"
        code = main(
            [
                "run",
                "--index",
                str(workspace / "index.json"),
                "--ontology-dir",
                str(ontology_dir),
                "--topics",
                str(data_dir / "topics.json"),
                "--run",
                str(run_path),
                "--tag",
                "clitest",
                "--no-labeler",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "topics to" in out
        lines = run_path.read_text().strip().splitlines()
        assert lines
        for line in lines:
            parts = line.split()
            assert len(parts) == 6
            assert parts[1] == "Q0"
            assert parts[5] == "clitest"

        report_path = workspace / "report.json"
        code = main(
            [
                "evaluate",
                "--run",
                str(run_path),
                "--qrels",
                str(data_dir / "qrels.txt"),
                "--report",
                str(report_path),
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[0].startswith("topic")
        assert any(line.startswith("mean") for line in out.splitlines())
        records = json.loads(report_path.read_text())
        assert set(records["per_topic"]) == {"1", "2", "3"}

    def test_train_holdout_line(self, workspace, ontology_dir, data_dir, capsys):
        code = main(
            [
                "train",
                "--index",
                str(workspace / "index.json"),
                "--ontology-dir",
                str(ontology_dir),
                "--topics",
                str(data_dir / "topics.json"),
                "--qrels",
                str(data_dir / "qrels.txt"),
                "--model",
                str(workspace / "model2.json"),
                "--holdout",
                "0.25",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "holdout accuracy" in out
        assert "on 2" in out

    def test_train_bad_holdout(self, workspace, ontology_dir, data_dir, capsys):
        code = main(
            [
                "train",
                "--index",
                str(workspace / "index.json"),
                "--ontology-dir",
                str(ontology_dir),
                "--topics",
                str(data_dir / "topics.json"),
                "--qrels",
                str(data_dir / "qrels.txt"),
                "--model",
                str(workspace / "model3.json"),
                "--holdout",
                "1.5",
            ]
        )
        assert code == 2
        assert "--holdout" in capsys.readouterr().err


class TestConfigFile:
    def test_config_supplies_paths_and_flags_override(
        self, workspace, ontology_dir, data_dir, tmp_path, capsys
    ):
        config = {
            "index": str(workspace / "index.json"),
            "ontology_dir": str(ontology_dir),
            "topics": str(data_dir / "topics.json"),
            "run": str(tmp_path / "from_config.txt"),
            "tag": "configtag",
            "ranking": {"k": 10.0},
        }
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(config))

        code = main(["run", "--config", str(config_path)])
        assert code == 0
        capsys.readouterr()
        text = (tmp_path / "from_config.txt").read_text()
        assert " configtag" in text

        override_path = tmp_path / "override.txt"
        code = main(
            ["run", "--config", str(config_path), "--run", str(override_path), "--tag", "flagtag"]
        )
        assert code == 0
        assert " flagtag" in override_path.read_text()

    def test_missing_config_file(self, capsys):
        code = main(["run", "--config", "/no/such/config.json"])
        assert code == 2
        assert "config path does not exist" in capsys.readouterr().err

    def test_malformed_config(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code = main(["run", "--config", str(path)])
        assert code == 2


class TestFlagPlumbing:
    def test_toggle_flags_map_to_settings(self):
        from pmr.cli import _settings_from
        from pmr.pipeline import PipelineConfig

        parser = build_parser()
        args = parser.parse_args(
            [
                "search",
                "--no-labeler",
                "--no-variants",
                "--no-rerank",
                "--demote",
                "--depth",
                "7",
                "--variant-boost",
                "3.5",
                "--other-boost",
                "0.5",
            ]
        )
        settings = _settings_from(args, PipelineConfig())
        assert settings.use_labeler is False
        assert settings.include_variants is False
        assert settings.use_rerank is False
        assert settings.demote_irrelevant is True
        assert settings.depth == 7
        assert settings.variant_boost == 3.5
        assert settings.other_boost == 0.5

    def test_ranking_flags_map_to_params(self):
        from pmr.cli import _ranking_from
        from pmr.pipeline import PipelineConfig

        parser = build_parser()
        args = parser.parse_args(
            ["search", "--k", "15", "--wh", "0.2", "--formula", "as_printed"]
        )
        params = _ranking_from(args, PipelineConfig())
        assert params.k == 15.0
        assert params.w_h == 0.2
        assert params.formula_variant == "as_printed"
        assert params.w_s == 1.0


class TestServe:
    def test_env_defaults_and_app_wiring(self, workspace, ontology_dir, monkeypatch, capsys):
        import uvicorn

        captured = {}

        def fake_run(app, host, port, log_level):
            captured["app"] = app
            captured["host"] = host
            captured["port"] = port

        monkeypatch.setattr(uvicorn, "run", fake_run)
        monkeypatch.setenv("PMR_BIND", "0.0.0.0")
        monkeypatch.setenv("PMR_PORT", "9099")
        code = main(
            [
                "serve",
                "--index",
                str(workspace / "index.json"),
                "--ontology-dir",
                str(ontology_dir),
            ]
        )
        assert code == 0
        assert captured["host"] == "0.0.0.0"
        assert captured["port"] == 9099
        assert captured["app"].title  # FastAPI app object

    def test_flags_beat_env(self, workspace, ontology_dir, monkeypatch):
        import uvicorn

        captured = {}
        monkeypatch.setattr(
            uvicorn, "run", lambda app, host, port, log_level: captured.update(host=host, port=port)
        )
        monkeypatch.setenv("PMR_BIND", "0.0.0.0")
        monkeypatch.setenv("PMR_PORT", "9099")
        code = main(
            [
                "serve",
                "--index",
                str(workspace / "index.json"),
                "--ontology-dir",
                str(ontology_dir),
                "--bind",
                "127.0.0.1",
                "--port",
                "8123",
            ]
        )
        assert code == 0
        assert captured == {"host": "127.0.0.1", "port": 8123}
