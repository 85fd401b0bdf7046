"""Flat-file ontology tables: synonyms, gene variants, drug links, journal impact.

All five sources share one TSV convention: UTF-8, one record per line,
literal tab separator, ``#`` comment lines ignored.  Terms are case-folded
on load so every lookup is case-insensitive.  Tables are immutable after
load and safe for concurrent readers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)


class SynonymTable:
    """Bidirectional concept <-> surface-term map.

    Every surface term belongs to exactly one concept; a term seen again
    under a different concept is treated as a malformed line.
    """

    def __init__(self) -> None:
        self._concept_terms: dict[str, set[str]] = {}
        self._term_concept: dict[str, str] = {}

    def add(self, concept_id: str, term: str) -> None:
        term = term.casefold()
        owner = self._term_concept.get(term)
        if owner is not None and owner != concept_id:
            raise ValueError(f"term {term!r} already mapped to concept {owner}")
        self._term_concept[term] = concept_id
        self._concept_terms.setdefault(concept_id, set()).add(term)

    def concept_of(self, term: str) -> str | None:
        return self._term_concept.get(term.casefold())

    def synonyms(self, term: str) -> set[str]:
        """All surface terms of the concept owning ``term``, itself included.

        Unknown terms fall back to the singleton {term} so downstream query
        formulation never fails on out-of-vocabulary profiles.
        """
        folded = term.casefold()
        concept = self._term_concept.get(folded)
        if concept is None:
            return {folded}
        return set(self._concept_terms[concept])

    def concepts(self) -> list[str]:
        return sorted(self._concept_terms)

    def terms_of(self, concept_id: str) -> set[str]:
        return set(self._concept_terms.get(concept_id, ()))

    def __len__(self) -> int:
        return len(self._term_concept)


class VariantTable:
    """Gene concept id -> set of known variant strings."""

    def __init__(self) -> None:
        self._variants: dict[str, set[str]] = {}

    def add(self, gene_concept_id: str, variant: str) -> None:
        variant = variant.casefold()
        if not variant:
            raise ValueError("empty variant")
        self._variants.setdefault(gene_concept_id, set()).add(variant)

    def variants_of(self, gene_concept_id: str) -> set[str]:
        return set(self._variants.get(gene_concept_id, ()))

    def genes(self) -> list[str]:
        return sorted(self._variants)

    def __len__(self) -> int:
        return sum(len(v) for v in self._variants.values())


class DrugAssociations:
    """Disease or gene concept id -> associated drug names (case-folded)."""

    def __init__(self) -> None:
        self._drugs: dict[str, set[str]] = {}

    def add(self, concept_id: str, drug: str) -> None:
        drug = drug.casefold()
        if not drug:
            raise ValueError("empty drug name")
        self._drugs.setdefault(concept_id, set()).add(drug)

    def drugs_for(self, concept_id: str | None) -> set[str]:
        if concept_id is None:
            return set()
        return set(self._drugs.get(concept_id, ()))

    def concepts(self) -> list[str]:
        return sorted(self._drugs)


class JournalImpact:
    """Journal name (case-folded) -> H5 index; unknown journals score 0."""

    def __init__(self) -> None:
        self._h5: dict[str, int] = {}

    def add(self, journal: str, h5: int) -> None:
        if h5 < 0:
            raise ValueError("negative H5 index")
        self._h5[journal.casefold()] = h5

    def impact_of(self, journal: str) -> int:
        return self._h5.get(journal.casefold(), 0)

    def journals(self) -> list[str]:
        return sorted(self._h5)


@dataclass
class OntologyTables:
    """The five loaded tables plus the parse report."""

    diseases: SynonymTable
    genes: SynonymTable
    variants: VariantTable
    drugs: DrugAssociations
    journals: JournalImpact
    skipped: list[str] = field(default_factory=list)


FILE_NAMES = {
    "diseases": "diseases.tsv",
    "genes": "genes.tsv",
    "variants": "variants.tsv",
    "drugs": "drugs.tsv",
    "journals": "journals.tsv",
}


def _iter_tsv(path: Path, skipped: list[str]):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                skipped.append(f"{path.name}:{lineno}: malformed line {line!r}")
                continue
            yield lineno, parts[0].strip(), parts[1].strip()


def load_tables(directory) -> OntologyTables:
    """Load all five TSV tables from ``directory``.

    A missing file is fatal and named in the error; malformed lines are
    skipped and listed in the returned ``skipped`` report.
    """
    directory = Path(directory)
    missing = [n for n in FILE_NAMES.values() if not (directory / n).is_file()]
    if missing:
        raise FileNotFoundError(
            f"missing ontology file(s) in {directory}: {', '.join(missing)}"
        )

    skipped: list[str] = []
    diseases = SynonymTable()
    genes = SynonymTable()
    variants = VariantTable()
    drugs = DrugAssociations()
    journals = JournalImpact()

    for table, fname in ((diseases, "diseases.tsv"), (genes, "genes.tsv")):
        for lineno, concept, term in _iter_tsv(directory / fname, skipped):
            try:
                table.add(concept, term)
            except ValueError as exc:
                skipped.append(f"{fname}:{lineno}: {exc}")

    for lineno, gene_concept, variant in _iter_tsv(directory / "variants.tsv", skipped):
        variants.add(gene_concept, variant)

    for lineno, concept, drug in _iter_tsv(directory / "drugs.tsv", skipped):
        drugs.add(concept, drug)

    for lineno, journal, h5 in _iter_tsv(directory / "journals.tsv", skipped):
        try:
            value = int(h5)
            if value < 0:
                raise ValueError
        except ValueError:
            skipped.append(f"journals.tsv:{lineno}: bad H5 value {h5!r}")
            continue
        journals.add(journal, value)

    for msg in skipped:
        log.warning("ontology: skipped %s", msg)
    return OntologyTables(diseases, genes, variants, drugs, journals, skipped)


def empty_tables() -> OntologyTables:
    return OntologyTables(
        SynonymTable(), SynonymTable(), VariantTable(), DrugAssociations(), JournalImpact()
    )


def dump_tables(tables: OntologyTables, directory) -> None:
    """Write the tables back as canonicalized (sorted, case-folded) TSV files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    def write(name: str, rows) -> None:
        with open(directory / name, "w", encoding="utf-8") as fh:
            for a, b in rows:
                fh.write(f"{a}\t{b}\n")

    for table, name in ((tables.diseases, "diseases.tsv"), (tables.genes, "genes.tsv")):
        rows = []
        for concept in table.concepts():
            rows.extend((concept, term) for term in sorted(table.terms_of(concept)))
        write(name, sorted(rows))
    write(
        "variants.tsv",
        sorted(
            (gene, v)
            for gene in tables.variants.genes()
            for v in sorted(tables.variants.variants_of(gene))
        ),
    )
    write(
        "drugs.tsv",
        sorted(
            (concept, d)
            for concept in tables.drugs.concepts()
            for d in sorted(tables.drugs.drugs_for(concept))
        ),
    )
    write(
        "journals.tsv",
        [(j, str(tables.journals.impact_of(j))) for j in tables.journals.journals()],
    )
