"""Corpus ingestion and a fielded inverted index with tf-idf scoring.

Articles arrive as newline-delimited JSON records and are kept only when
at least one MeSH code falls in the diseases ("C") or chemicals-and-drugs
("D") categories.  Title, abstract and keywords are indexed as separate
fields with token positions, so the query layer can do both term and
adjacent-phrase matching.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

FIELDS = ("title", "abstract", "keywords")

SNAPSHOT_FORMAT = "pmr-index"
SNAPSHOT_VERSION = 1

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric characters, dropping empties."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Article:
    """One abstract record. ``year`` is 0 when the source had none."""

    pmid: str
    title: str = ""
    abstract: str = ""
    keywords: tuple[str, ...] = ()
    mesh_codes: tuple[str, ...] = ()
    journal: str = ""
    year: int = 0

    def field_text(self, name: str) -> str:
        if name == "title":
            return self.title
        if name == "abstract":
            return self.abstract
        if name == "keywords":
            # keywords are concatenated and position-tokenized as one field
            return " ".join(self.keywords)
        raise ValueError(f"unknown field {name!r}")

    def to_dict(self) -> dict:
        return {
            "pmid": self.pmid,
            "title": self.title,
            "abstract": self.abstract,
            "keywords": list(self.keywords),
            "mesh": list(self.mesh_codes),
            "journal": self.journal,
            "year": self.year,
        }


def mesh_filter(article: Article) -> bool:
    """Keep an article iff any MeSH code starts with 'C' or 'D'."""
    return any(code.startswith(("C", "D")) for code in article.mesh_codes)


class RecordError(ValueError):
    """A corpus record that cannot be turned into an Article."""


def parse_record(obj: dict) -> Article:
    """Validate one decoded corpus record and build an Article."""
    if not isinstance(obj, dict):
        raise RecordError("record is not an object")
    pmid = obj.get("pmid")
    if not isinstance(pmid, str) or not pmid.strip():
        raise RecordError("missing or empty pmid")
    year = obj.get("year")
    if year is None:
        year = 0
    if not isinstance(year, int) or isinstance(year, bool):
        raise RecordError(f"year is not an integer: {year!r}")
    if year != 0 and not 1800 <= year <= 2100:
        raise RecordError(f"year out of range: {year}")
    keywords = obj.get("keywords") or []
    mesh = obj.get("mesh") or []
    for name, val in (("keywords", keywords), ("mesh", mesh)):
        if not isinstance(val, list) or not all(isinstance(v, str) for v in val):
            raise RecordError(f"{name} is not a list of strings")
    return Article(
        pmid=pmid.strip(),
        title=str(obj.get("title") or ""),
        abstract=str(obj.get("abstract") or ""),
        keywords=tuple(keywords),
        mesh_codes=tuple(mesh),
        journal=str(obj.get("journal") or ""),
        year=year,
    )


@dataclass
class IngestReport:
    """Counts and per-line problems from one ingestion pass."""

    read: int = 0
    indexed: int = 0
    filtered: int = 0
    errors: list[str] = field(default_factory=list)

    def summary(self) -> str:
        return (
            f"read {self.read} records: indexed {self.indexed}, "
            f"filtered {self.filtered} (no C/D MeSH code), "
            f"skipped {len(self.errors)} bad"
        )


class Index:
    """Immutable fielded inverted index over a filtered article corpus.

    Per field it keeps term -> pmid -> positions (strictly increasing) and
    the token count of every document field.  Built once by
    :func:`ingest_corpus` or :meth:`from_dict`; treat as read-only after
    that, which makes concurrent readers safe.
    """

    def __init__(self) -> None:
        self.articles: dict[str, Article] = {}
        self._postings: dict[str, dict[str, dict[str, tuple[int, ...]]]] = {
            f: {} for f in FIELDS
        }
        self._field_len: dict[str, dict[str, int]] = {f: {} for f in FIELDS}
        self.report = IngestReport()

    @property
    def n_docs(self) -> int:
        return len(self.articles)

    def _add(self, article: Article) -> None:
        self.articles[article.pmid] = article
        for fname in FIELDS:
            tokens = tokenize(article.field_text(fname))
            self._field_len[fname][article.pmid] = len(tokens)
            for pos, tok in enumerate(tokens):
                per_doc = self._postings[fname].setdefault(tok, {})
                per_doc[article.pmid] = per_doc.get(article.pmid, ()) + (pos,)

    def df(self, field_name: str, term: str) -> int:
        return len(self._postings[field_name].get(term, {}))

    def postings(self, field_name: str, term: str) -> dict[str, tuple[int, ...]]:
        return self._postings[field_name].get(term, {})

    def positions(self, field_name: str, term: str, pmid: str) -> tuple[int, ...]:
        return self._postings[field_name].get(term, {}).get(pmid, ())

    def field_length(self, field_name: str, pmid: str) -> int:
        return self._field_len[field_name].get(pmid, 0)

    def term_score(self, field_name: str, term: str, pmid: str) -> float:
        """sqrt(tf) * idf^2 * lengthNorm for one term in one document field.

        idf = 1 + ln(N / (df + 1)); lengthNorm = 1 / sqrt(field token count).
        0.0 when the term does not occur in that field of that document.
        """
        if pmid not in self.articles:
            raise KeyError(f"pmid {pmid!r} is not indexed")
        positions = self.positions(field_name, term, pmid)
        if not positions:
            return 0.0
        tf = len(positions)
        idf = 1.0 + math.log(self.n_docs / (self.df(field_name, term) + 1))
        length_norm = 1.0 / math.sqrt(self._field_len[field_name][pmid])
        return math.sqrt(tf) * idf * idf * length_norm

    def phrase_positions(self, field_name: str, tokens: tuple[str, ...], pmid: str) -> list[int]:
        """Start positions where ``tokens`` occur as an adjacent run."""
        if not tokens:
            return []
        first = self.positions(field_name, tokens[0], pmid)
        if not first:
            return []
        rest = [set(self.positions(field_name, t, pmid)) for t in tokens[1:]]
        starts = []
        for p in first:
            if all(p + i + 1 in s for i, s in enumerate(rest)):
                starts.append(p)
        return starts

    def to_dict(self) -> dict:
        """Canonical serializable form; stable for identical ingest streams."""
        return {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "articles": {pmid: a.to_dict() for pmid, a in self.articles.items()},
            "postings": {
                fname: {
                    term: {pmid: list(pos) for pmid, pos in per_doc.items()}
                    for term, per_doc in terms.items()
                }
                for fname, terms in self._postings.items()
            },
            "field_lengths": self._field_len,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Index":
        if data.get("format") != SNAPSHOT_FORMAT:
            raise ValueError("not an index snapshot")
        if data.get("version") != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {data.get('version')!r}")
        idx = cls()
        for pmid, rec in data["articles"].items():
            idx.articles[pmid] = parse_record(rec)
        idx._postings = {
            fname: {
                term: {pmid: tuple(pos) for pmid, pos in per_doc.items()}
                for term, per_doc in terms.items()
            }
            for fname, terms in data["postings"].items()
        }
        idx._field_len = {
            fname: dict(lengths) for fname, lengths in data["field_lengths"].items()
        }
        return idx


def ingest_corpus(lines) -> Index:
    """Build an Index from an iterable of newline-delimited JSON records.

    Malformed records and duplicate pmids are reported with their line
    number in ``index.report`` and skipped; ingestion continues.
    """
    idx = Index()
    report = idx.report
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        report.read += 1
        try:
            article = parse_record(json.loads(line))
        except (json.JSONDecodeError, RecordError) as exc:
            report.errors.append(f"line {lineno}: {exc}")
            continue
        if article.pmid in idx.articles:
            report.errors.append(f"line {lineno}: duplicate pmid {article.pmid}")
            continue
        if not mesh_filter(article):
            report.filtered += 1
            continue
        idx._add(article)
        report.indexed += 1
    return idx


def ingest_corpus_file(path) -> Index:
    with open(path, encoding="utf-8") as fh:
        return ingest_corpus(fh)


def save_snapshot(index: Index, path) -> None:
    """Write the canonical JSON snapshot; byte-identical for identical input."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(index.to_dict(), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_snapshot(path) -> Index:
    with open(path, encoding="utf-8") as fh:
        return Index.from_dict(json.load(fh))
