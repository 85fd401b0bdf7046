"""Boolean query formulation and execution over the inverted index.

A query is a clause tree: every *must* clause has to match, no *must_not*
clause may match, and *should* clauses only add score.  Each clause is a
disjunction of fielded term/phrase matchers built from an expanded
profile's term sets.  Scores are tf-idf sums per matched matcher, scaled
by the clause boost and a coord factor (fraction of clauses matched), and
the result is the adjusted relevance score used by the ranking stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .index import FIELDS, Article, Index, tokenize
from .profile import ExpandedProfile, PatientProfile

DEFAULT_VARIANT_BOOST = 2.0
DEFAULT_OTHER_BOOST = 1.0

MALE_WORDS = frozenset({"male", "males", "men", "man", "boy", "boys"})
FEMALE_WORDS = frozenset({"female", "females", "women", "woman", "girl", "girls"})


@dataclass(frozen=True)
class Matcher:
    """One fielded matcher: a single token or an adjacent token phrase."""

    field: str
    tokens: tuple[str, ...]

    @property
    def is_phrase(self) -> bool:
        return len(self.tokens) > 1

    @property
    def surface(self) -> str:
        return " ".join(self.tokens)

    def matches(self, index: Index, pmid: str) -> bool:
        if self.is_phrase:
            return bool(index.phrase_positions(self.field, self.tokens, pmid))
        return bool(index.positions(self.field, self.tokens[0], pmid))

    def score(self, index: Index, pmid: str) -> float:
        """tf-idf contribution; phrase tokens only count when adjacent."""
        if not self.matches(index, pmid):
            return 0.0
        return sum(index.term_score(self.field, tok, pmid) for tok in self.tokens)

    def candidate_pmids(self, index: Index) -> set[str]:
        docs = set(index.postings(self.field, self.tokens[0]))
        for tok in self.tokens[1:]:
            docs &= set(index.postings(self.field, tok))
        if self.is_phrase:
            docs = {p for p in docs if index.phrase_positions(self.field, self.tokens, p)}
        return docs


@dataclass(frozen=True)
class Clause:
    """Disjunction of matchers with a score boost."""

    name: str
    matchers: tuple[Matcher, ...]
    boost: float = 1.0

    def candidate_pmids(self, index: Index) -> set[str]:
        docs: set[str] = set()
        for m in self.matchers:
            docs |= m.candidate_pmids(index)
        return docs

    def score(self, index: Index, pmid: str) -> float:
        return self.boost * sum(m.score(index, pmid) for m in self.matchers)

    def matches(self, index: Index, pmid: str) -> bool:
        return any(m.matches(index, pmid) for m in self.matchers)


@dataclass
class Query:
    must: list[Clause] = field(default_factory=list)
    should: list[Clause] = field(default_factory=list)
    must_not: list[Clause] = field(default_factory=list)

    def to_text(self) -> str:
        """Readable AST rendering, used by the CLI --explain output."""
        lines = []
        for kind, clauses in (("MUST", self.must), ("MUST_NOT", self.must_not), ("SHOULD", self.should)):
            for clause in clauses:
                lines.append(f"{kind} {clause.name} (boost={clause.boost:g})")
                by_surface: dict[str, list[str]] = {}
                for m in clause.matchers:
                    by_surface.setdefault(
                        f'"{m.surface}"' if m.is_phrase else m.surface, []
                    ).append(m.field)
                for surface in sorted(by_surface):
                    lines.append(f"    {surface} [{', '.join(sorted(set(by_surface[surface])))}]")
        return "\n".join(lines)


@dataclass
class ScoredArticle:
    """A retrieved article working its way through label + rank stages.

    ``score`` is the adjusted relevance score straight out of execute();
    label, r1, r2 and rank are filled in by the later stages.
    """

    pmid: str
    score: float
    matched_should: int = 0
    matched_terms: tuple[str, ...] = ()
    label: str | None = None  # "relevant" | "irrelevant" once labeled
    r1: int = 0
    r2: float = 0.0
    rank: int = 0


def matchers_for_terms(terms, fields=FIELDS) -> tuple[Matcher, ...]:
    """One matcher per (term, field); multi-token terms become phrases."""
    matchers = []
    for term in sorted(terms):
        tokens = tuple(tokenize(term))
        if not tokens:
            continue
        for fname in fields:
            matchers.append(Matcher(field=fname, tokens=tokens))
    return tuple(matchers)


def formulate_query(
    ep: ExpandedProfile,
    variant_boost: float = DEFAULT_VARIANT_BOOST,
    other_boost: float = DEFAULT_OTHER_BOOST,
    include_variants: bool = True,
) -> Query:
    """Compile an expanded profile into the boolean retrieval query.

    Required: the disease (any synonym), every gene (any synonym), a
    specified variant when the profile pinned one, and a related drug or
    treatment keyword.  Optional with boost: candidate variants for
    unpinned genes, plus other-condition phrases.  Demographics are not
    part of the boolean query; they are enforced post-hoc.
    """
    query = Query()
    query.must.append(Clause("disease", matchers_for_terms(ep.disease_terms)))
    for gene in ep.genes:
        query.must.append(Clause(f"gene:{gene.name}", matchers_for_terms(gene.terms)))
        if gene.specified_variant:
            query.must.append(
                Clause(f"variant:{gene.name}", matchers_for_terms({gene.specified_variant}))
            )
        elif include_variants and gene.candidate_variants:
            query.should.append(
                Clause(
                    f"candidate-variants:{gene.name}",
                    matchers_for_terms(gene.candidate_variants),
                    boost=variant_boost,
                )
            )
    query.must.append(
        Clause(
            "drug-or-treatment",
            matchers_for_terms(set(ep.drug_terms) | set(ep.treatment_keywords)),
        )
    )
    for cond in ep.other:
        query.should.append(
            Clause(f"other:{cond}", matchers_for_terms({cond}), boost=other_boost)
        )
    return query


def execute(query: Query, index: Index) -> list[ScoredArticle]:
    """Run the boolean query and score every satisfying article.

    An article qualifies iff it matches every must clause and no must_not
    clause.  Its adjusted relevance score is the boosted tf-idf sum over
    matched must+should clauses times the coord factor
    (matched clauses / total clauses).  Results come back sorted by score
    (descending), pmid breaking ties.
    """
    if not query.must:
        return []
    candidates: set[str] | None = None
    for clause in query.must:
        docs = clause.candidate_pmids(index)
        candidates = docs if candidates is None else candidates & docs
        if not candidates:
            return []
    assert candidates is not None
    for clause in query.must_not:
        candidates -= clause.candidate_pmids(index)

    total_clauses = len(query.must) + len(query.should)
    results = []
    for pmid in candidates:
        raw = 0.0
        matched = 0
        matched_should = 0
        matched_terms: set[str] = set()
        for clause in query.must:
            raw += clause.score(index, pmid)
            matched += 1
            matched_terms |= {m.surface for m in clause.matchers if m.matches(index, pmid)}
        for clause in query.should:
            if clause.matches(index, pmid):
                raw += clause.score(index, pmid)
                matched += 1
                matched_should += 1
                matched_terms |= {
                    m.surface for m in clause.matchers if m.matches(index, pmid)
                }
        coord = matched / total_clauses
        results.append(
            ScoredArticle(
                pmid=pmid,
                score=raw * coord,
                matched_should=matched_should,
                matched_terms=tuple(sorted(matched_terms)),
            )
        )
    results.sort(key=lambda sa: (-sa.score, sa.pmid))
    return results


def demographic_compatible(article: Article, profile: PatientProfile) -> bool:
    """An article may not contradict the profile's gender.

    Compatible when it mentions the profile's gender (alone or alongside
    the other), or mentions neither; incompatible only when it mentions
    exclusively the opposite gender.  Profiles without a gender accept
    everything.
    """
    if profile.gender is None:
        return True
    tokens = set(tokenize(article.title + " " + article.abstract))
    has_male = bool(tokens & MALE_WORDS)
    has_female = bool(tokens & FEMALE_WORDS)
    if profile.gender == "male":
        return has_male or not has_female
    return has_female or not has_male


@dataclass
class ClauseReport:
    kind: str
    name: str
    boost: float
    matched: bool
    contribution: float
    matched_surfaces: tuple[str, ...]


def explain(query: Query, index: Index, pmid: str) -> list[ClauseReport]:
    """Per-clause score contributions (pre-coord) for one document."""
    reports = []
    for kind, clauses in (("must", query.must), ("should", query.should)):
        for clause in clauses:
            matched = clause.matches(index, pmid)
            reports.append(
                ClauseReport(
                    kind=kind,
                    name=clause.name,
                    boost=clause.boost,
                    matched=matched,
                    contribution=clause.score(index, pmid) if matched else 0.0,
                    matched_surfaces=tuple(
                        sorted(
                            m.surface for m in clause.matchers if m.matches(index, pmid)
                        )
                    ),
                )
            )
    return reports
