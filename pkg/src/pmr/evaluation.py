"""Trec-format run/qrels IO and rank-quality metrics.

Metrics follow the reference evaluator's conventions: "relevant" for the
precision family means grade >= 1, NDCG uses linear gain with a
log2(rank+1) discount, and per-topic values are averaged arithmetically
over the topics present in the qrels.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

GRADES = (0, 1, 2)


@dataclass
class RunEntry:
    pmid: str
    rank: int
    score: float
    tag: str = "pmr"


Qrels = dict[str, dict[str, int]]  # topic -> pmid -> grade
Run = dict[str, list[RunEntry]]  # topic -> entries ordered by rank


def read_qrels(path) -> Qrels:
    """Parse ``topic 0 pmid grade`` lines; malformed lines are skipped."""
    qrels: Qrels = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4:
                log.warning("qrels line %d: expected 4 fields, got %d", lineno, len(parts))
                continue
            topic, _, pmid, grade_s = parts
            try:
                grade = int(grade_s)
            except ValueError:
                log.warning("qrels line %d: bad grade %r", lineno, grade_s)
                continue
            if grade not in GRADES:
                log.warning("qrels line %d: grade %d outside 0..2", lineno, grade)
                continue
            qrels.setdefault(topic, {})[pmid] = grade
    return qrels


def write_qrels(qrels: Qrels, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for topic in sorted(qrels):
            for pmid in sorted(qrels[topic]):
                fh.write(f"{topic} 0 {pmid} {qrels[topic][pmid]}\n")


def read_run(path) -> Run:
    """Parse ``topic Q0 pmid rank score tag`` lines, reordering by rank."""
    run: Run = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 6:
                log.warning("run line %d: expected 6 fields, got %d", lineno, len(parts))
                continue
            topic, _, pmid, rank_s, score_s, tag = parts
            try:
                entry = RunEntry(pmid=pmid, rank=int(rank_s), score=float(score_s), tag=tag)
            except ValueError:
                log.warning("run line %d: bad rank/score", lineno)
                continue
            run.setdefault(topic, []).append(entry)
    for entries in run.values():
        entries.sort(key=lambda e: e.rank)
    return run


def write_run(run: Run, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for topic in sorted(run):
            for e in run[topic]:
                fh.write(f"{topic} Q0 {e.pmid} {e.rank} {e.score:.6f} {e.tag}\n")


def _grade(qrel: dict[str, int], pmid: str) -> int:
    return qrel.get(pmid, 0)


def precision_at(entries: list[RunEntry], qrel: dict[str, int], cutoff: int) -> float:
    """Fraction of the top ``cutoff`` slots holding a grade >= 1 document.

    Unretrieved slots (run shorter than the cutoff) count as non-relevant.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    hits = sum(1 for e in entries[:cutoff] if _grade(qrel, e.pmid) >= 1)
    return hits / cutoff


def r_precision(entries: list[RunEntry], qrel: dict[str, int]) -> float:
    """Precision at R, the topic's number of grade >= 1 documents; 0 when R=0."""
    r = sum(1 for g in qrel.values() if g >= 1)
    if r == 0:
        return 0.0
    return precision_at(entries, qrel, r)


def ndcg(entries: list[RunEntry], qrel: dict[str, int], cutoff: int | None = None) -> float:
    """Linear-gain NDCG with log2(rank+1) discount; 0 when the ideal gain is 0."""
    depth = len(entries) if cutoff is None else min(cutoff, len(entries))
    dcg = sum(
        _grade(qrel, entries[i].pmid) / math.log2(i + 2) for i in range(depth)
    )
    ideal = sorted(qrel.values(), reverse=True)
    if cutoff is not None:
        ideal = ideal[:cutoff]
    idcg = sum(g / math.log2(i + 2) for i, g in enumerate(ideal))
    if idcg == 0:
        return 0.0
    return dcg / idcg


METRICS = ("P@5", "P@10", "R-prec", "NDCG", "NDCG@10")


@dataclass
class MetricReport:
    per_topic: dict[str, dict[str, float]] = field(default_factory=dict)
    mean: dict[str, float] = field(default_factory=dict)
    skipped_topics: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        width = max((len(t) for t in self.per_topic), default=5)
        width = max(width, len("topic"), len("mean"))
        header = "topic".ljust(width) + "".join(f"{m:>10}" for m in METRICS) + f"{'infNDCG':>10}"
        lines = [header]
        for topic in sorted(self.per_topic):
            vals = self.per_topic[topic]
            lines.append(
                topic.ljust(width)
                + "".join(f"{vals[m]:>10.4f}" for m in METRICS)
                + f"{'n/a':>10}"
            )
        lines.append(
            "mean".ljust(width)
            + "".join(f"{self.mean[m]:>10.4f}" for m in METRICS)
            + f"{'n/a':>10}"
        )
        return "\n".join(lines)

    def to_records(self) -> dict:
        return {
            "per_topic": self.per_topic,
            "mean": self.mean,
            "infNDCG": "n/a",
            "skipped_topics": self.skipped_topics,
        }

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_records(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def topic_metrics(entries: list[RunEntry], qrel: dict[str, int]) -> dict[str, float]:
    return {
        "P@5": precision_at(entries, qrel, 5),
        "P@10": precision_at(entries, qrel, 10),
        "R-prec": r_precision(entries, qrel),
        "NDCG": ndcg(entries, qrel),
        "NDCG@10": ndcg(entries, qrel, 10),
    }


def evaluate(run: Run, qrels: Qrels) -> MetricReport:
    """Per-topic metrics plus their mean over every topic in the qrels.

    Run topics without judgments are skipped with a warning; judged topics
    missing from the run evaluate against an empty result list.
    """
    report = MetricReport()
    for topic in run:
        if topic not in qrels:
            log.warning("run topic %s has no qrels; skipped", topic)
            report.skipped_topics.append(topic)
    for topic in sorted(qrels):
        report.per_topic[topic] = topic_metrics(run.get(topic, []), qrels[topic])
    n = len(report.per_topic)
    for metric in METRICS:
        report.mean[metric] = (
            sum(v[metric] for v in report.per_topic.values()) / n if n else 0.0
        )
    return report
