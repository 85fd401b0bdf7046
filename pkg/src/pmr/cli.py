"""Command-line interface for building, searching and scoring the corpus.

Subcommands: index, expand, search, train, run, evaluate, serve.  Every
subcommand accepts --config pointing at a JSON settings file; explicit
flags override file values.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import evaluation
from .index import Index, ingest_corpus_file, load_snapshot, save_snapshot
from .labeler import PerceptronLabeler, load_model, save_model
from .ontology import load_tables
from .pipeline import (
    Engine,
    PipelineConfig,
    SearchSettings,
    build_training_set,
    expansion_summary,
)
from .profile import GeneSpec, PatientProfile, parse_gene_entry, parse_topics
from .query import explain as explain_query
from .ranker import RankingParams

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

_RANKING_FLAGS = {
    "k": "k",
    "ws": "w_s",
    "wh": "w_h",
    "wy": "w_y",
    "h_axis": "h_axis",
    "y_axis": "y_axis",
    "ch": "c_h",
    "cy": "c_y",
    "formula": "formula_variant",
}


def _add_ranking_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("ranking")
    group.add_argument("--k", type=float, help="bucket width for the primary score")
    group.add_argument("--ws", type=float, help="weight of the in-bucket score term")
    group.add_argument("--wh", type=float, help="weight of the journal impact term")
    group.add_argument("--wy", type=float, help="weight of the publication year term")
    group.add_argument("--h-axis", type=float, help="impact sigmoid midpoint")
    group.add_argument("--y-axis", type=float, help="year sigmoid midpoint")
    group.add_argument("--ch", type=float, help="impact sigmoid steepness")
    group.add_argument("--cy", type=float, help="year sigmoid steepness")
    group.add_argument(
        "--formula",
        choices=["additive", "as_printed"],
        help="secondary score combination variant",
    )


def _add_toggle_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("pipeline toggles")
    group.add_argument("--depth", type=int, help="results kept per topic (default 1000)")
    group.add_argument("--no-labeler", action="store_true", help="skip relevance labeling")
    group.add_argument("--no-variants", action="store_true", help="skip candidate variant clauses")
    group.add_argument("--no-rerank", action="store_true", help="order by raw score only")
    group.add_argument(
        "--demote",
        action="store_true",
        help="move labeled-irrelevant articles to the bottom instead of dropping them",
    )
    group.add_argument("--variant-boost", type=float, help="boost for variant clauses")
    group.add_argument("--other-boost", type=float, help="boost for other-condition clauses")


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise FileNotFoundError(f"config path does not exist: {path}")
        return PipelineConfig.from_file(path)
    return PipelineConfig()


def _merge(args: argparse.Namespace, cfg: PipelineConfig, *names: str) -> None:
    """Copy explicitly-set CLI path/scalar flags over the config values."""
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)


def _ranking_from(args: argparse.Namespace, cfg: PipelineConfig) -> RankingParams:
    overrides = {}
    for flag, fname in _RANKING_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[fname] = value
    params = dataclasses.replace(cfg.ranking, **overrides)
    params.validate()
    return params


def _settings_from(args: argparse.Namespace, cfg: PipelineConfig) -> SearchSettings:
    base = cfg.settings
    changes = {}
    if getattr(args, "depth", None) is not None:
        changes["depth"] = args.depth
    if getattr(args, "no_labeler", False):
        changes["use_labeler"] = False
    if getattr(args, "no_variants", False):
        changes["include_variants"] = False
    if getattr(args, "no_rerank", False):
        changes["use_rerank"] = False
    if getattr(args, "demote", False):
        changes["demote_irrelevant"] = True
    if getattr(args, "variant_boost", None) is not None:
        changes["variant_boost"] = args.variant_boost
    if getattr(args, "other_boost", None) is not None:
        changes["other_boost"] = args.other_boost
    return dataclasses.replace(base, **changes)


def _require_file(path: str | None, what: str) -> Path:
    if not path:
        raise FileNotFoundError(f"{what} path is required (flag or config)")
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"{what} path does not exist: {p}")
    return p


def _engine_from(args: argparse.Namespace, cfg: PipelineConfig, need_model: bool = False) -> Engine:
    index_path = _require_file(cfg.index, "index snapshot")
    ontology_dir = _require_file(cfg.ontology_dir, "ontology directory")
    index = load_snapshot(index_path)
    tables = load_tables(ontology_dir)
    model = None
    if cfg.model:
        model = load_model(_require_file(cfg.model, "model"))
    elif need_model:
        raise FileNotFoundError("model path is required (flag or config)")
    return Engine(
        index,
        tables,
        model=model,
        params=_ranking_from(args, cfg),
        settings=_settings_from(args, cfg),
        treatment_keywords=cfg.treatment_keywords,
    )


def _profile_from_flags(args: argparse.Namespace) -> PatientProfile:
    if not args.disease:
        raise ValueError("--disease is required")
    genes: list[GeneSpec] = [parse_gene_entry(g) for g in args.gene or []]
    gender = args.gender
    if gender is not None:
        gender = gender.strip().lower()
        if gender not in ("male", "female"):
            raise ValueError("--gender must be 'male' or 'female'")
    profile = PatientProfile(
        disease=args.disease,
        genes=tuple(genes),
        age=args.age,
        gender=gender,
        other=tuple(args.other or []),
    )
    profile.validate()
    return profile


def cmd_index(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    _merge(args, cfg, "corpus", "index")
    corpus_path = _require_file(cfg.corpus, "corpus")
    if not cfg.index:
        raise FileNotFoundError("output index path is required (flag or config)")
    index = ingest_corpus_file(corpus_path)
    save_snapshot(index, cfg.index)
    print(index.report.summary())
    print(f"snapshot written to {cfg.index}")
    return EXIT_OK


def cmd_expand(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    _merge(args, cfg, "ontology_dir", "topics")
    tables = load_tables(_require_file(cfg.ontology_dir, "ontology directory"))
    topics = parse_topics(_require_file(cfg.topics, "topics"))
    if args.topic is not None:
        topics = [t for t in topics if t[0] == args.topic]
        if not topics:
            print(f"no topic with id {args.topic!r}", file=sys.stderr)
            return EXIT_FAILURE
    engine = Engine(Index(), tables, treatment_keywords=cfg.treatment_keywords)
    out = {tid: expansion_summary(engine.expand(profile)) for tid, profile in topics}
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_search(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    _merge(args, cfg, "index", "ontology_dir", "model")
    engine = _engine_from(args, cfg)
    profile = _profile_from_flags(args)
    outcome = engine.search(profile)

    if args.explain:
        print("query:")
        print(outcome.query.to_text())
        print()
    print(f"{len(outcome.results)} of {outcome.total_matched} matched articles:")
    for sa in outcome.results:
        payload = engine.result_payload(sa)
        label = payload["label"] or "-"
        print(
            f"{payload['rank']:>4}  {payload['pmid']:<12} r1={payload['r1']} "
            f"r2={payload['r2']:.4f} s={payload['score']:.4f} {label:<10} "
            f"{payload['title'][:70]}"
        )
        if args.explain:
            for part in explain_query(outcome.query, engine.index, sa.pmid):
                if part.matched:
                    print(f"      {part.name}: {part.contribution:.4f}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    _merge(args, cfg, "index", "ontology_dir", "topics", "qrels", "model")
    _merge(args, cfg, "optimizer", "learning_rate", "epochs", "seed")
    index = load_snapshot(_require_file(cfg.index, "index snapshot"))
    tables = load_tables(_require_file(cfg.ontology_dir, "ontology directory"))
    topics = parse_topics(_require_file(cfg.topics, "topics"))
    qrels = evaluation.read_qrels(_require_file(cfg.qrels, "qrels"))
    if not cfg.model:
        raise FileNotFoundError("output model path is required (flag or config)")

    X, y, missing = build_training_set(
        index, tables, topics, qrels, cfg.treatment_keywords
    )
    if missing:
        log.warning("%d judged articles are not in the index", missing)
    if X.size == 0:
        print("no training examples found", file=sys.stderr)
        return EXIT_FAILURE

    holdout = args.holdout if args.holdout is not None else 0.0
    if not 0.0 <= holdout < 1.0:
        raise ValueError("--holdout must be in [0, 1)")
    n_hold = int(round(len(y) * holdout))
    if n_hold:
        import numpy as np

        rng = np.random.default_rng(cfg.seed)
        order = rng.permutation(len(y))
        hold_idx, train_idx = order[:n_hold], order[n_hold:]
        X_hold, y_hold = X[hold_idx], y[hold_idx]
        X, y = X[train_idx], y[train_idx]
    labeler = PerceptronLabeler(
        optimizer=cfg.optimizer,
        learning_rate=cfg.learning_rate,
        epochs=cfg.epochs,
        seed=cfg.seed,
    )
    labeler.fit(X, y)
    save_model(labeler, cfg.model)
    print(
        f"trained on {len(y)} examples, {labeler.n_updates_} updates, "
        f"training accuracy {labeler.training_accuracy(X, y):.4f}"
    )
    if n_hold:
        print(f"holdout accuracy {labeler.training_accuracy(X_hold, y_hold):.4f} on {n_hold}")
    print(f"model written to {cfg.model}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    _merge(args, cfg, "index", "ontology_dir", "topics", "model", "run", "tag", "jobs")
    engine = _engine_from(args, cfg)
    topics = parse_topics(_require_file(cfg.topics, "topics"))
    if not cfg.run:
        raise FileNotFoundError("output run path is required (flag or config)")
    run, failures = engine.run_topics(topics, tag=cfg.tag, jobs=cfg.jobs)
    evaluation.write_run(run, cfg.run)
    total = sum(len(v) for v in run.values())
    print(f"wrote {total} entries for {len(run)} topics to {cfg.run}")
    if failures:
        for msg in failures:
            print(f"failed: {msg}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    _merge(args, cfg, "run", "qrels", "report")
    run = evaluation.read_run(_require_file(cfg.run, "run"))
    qrels = evaluation.read_qrels(_require_file(cfg.qrels, "qrels"))
    report = evaluation.evaluate(run, qrels)
    print(report.to_text())
    if cfg.report:
        report.to_json(cfg.report)
        print(f"report written to {cfg.report}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    _merge(args, cfg, "index", "ontology_dir", "model")
    engine = _engine_from(args, cfg)

    import os

    import uvicorn

    from .service import create_app

    host = args.bind or os.environ.get("PMR_BIND", "127.0.0.1")
    port = args.port or int(os.environ.get("PMR_PORT", "8080"))
    app = create_app(engine)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmr",
        description="Precision-medicine article retrieval over a local corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON settings file; flags override its values")

    p = sub.add_parser("index", help="ingest a corpus file into an index snapshot")
    common(p)
    p.add_argument("--corpus", help="corpus file, one JSON article per line")
    p.add_argument("--index", help="output snapshot path")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("expand", help="print ontology expansions for topics")
    common(p)
    p.add_argument("--ontology-dir", dest="ontology_dir", help="directory of ontology tables")
    p.add_argument("--topics", help="topics JSON file")
    p.add_argument("--topic", help="only expand the topic with this id")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("search", help="search one profile given on the command line")
    common(p)
    p.add_argument("--index", help="index snapshot path")
    p.add_argument("--ontology-dir", dest="ontology_dir", help="directory of ontology tables")
    p.add_argument("--model", help="optional perceptron model path")
    p.add_argument("--disease", help="disease name")
    p.add_argument(
        "--gene",
        action="append",
        help="gene, optionally with variant: 'KRAS (G12C)'; repeatable",
    )
    p.add_argument("--age", type=int, help="patient age in years")
    p.add_argument("--gender", help="patient gender: male or female")
    p.add_argument("--other", action="append", help="other condition; repeatable")
    p.add_argument("--explain", action="store_true", help="print query and per-clause scores")
    _add_toggle_flags(p)
    _add_ranking_flags(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("train", help="train the relevance labeler from qrels")
    common(p)
    p.add_argument("--index", help="index snapshot path")
    p.add_argument("--ontology-dir", dest="ontology_dir", help="directory of ontology tables")
    p.add_argument("--topics", help="topics JSON file")
    p.add_argument("--qrels", help="relevance judgments file")
    p.add_argument("--model", help="output model path")
    p.add_argument("--optimizer", choices=["sgd", "adagrad", "adadelta"])
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--holdout", type=float, help="fraction held out for accuracy reporting")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("run", help="search all topics and write a run file")
    common(p)
    p.add_argument("--index", help="index snapshot path")
    p.add_argument("--ontology-dir", dest="ontology_dir", help="directory of ontology tables")
    p.add_argument("--topics", help="topics JSON file")
    p.add_argument("--model", help="perceptron model path")
    p.add_argument("--run", help="output run file path")
    p.add_argument("--tag", help="run tag written in the last column")
    p.add_argument("--jobs", type=int, help="parallel topic workers")
    _add_toggle_flags(p)
    _add_ranking_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("evaluate", help="score a run file against qrels")
    common(p)
    p.add_argument("--run", help="run file path")
    p.add_argument("--qrels", help="relevance judgments file")
    p.add_argument("--report", help="optional JSON report output path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="start the HTTP service")
    common(p)
    p.add_argument("--index", help="index snapshot path")
    p.add_argument("--ontology-dir", dest="ontology_dir", help="directory of ontology tables")
    p.add_argument("--model", help="optional perceptron model path")
    p.add_argument("--bind", help="bind address (default PMR_BIND or 127.0.0.1)")
    p.add_argument("--port", type=int, help="port (default PMR_PORT or 8080)")
    _add_toggle_flags(p)
    _add_ranking_flags(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
