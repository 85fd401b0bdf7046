"""Patient topics and their ontology-driven expansion.

A topic carries a disease, one or more genes (optionally with a variant),
demographics and other conditions.  Expansion swaps each raw name for its
full synonym set, pulls candidate variants for genes where none was
specified, and attaches disease/gene-linked drug names plus the configured
treatment keywords.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, replace

from .ontology import OntologyTables

log = logging.getLogger(__name__)

# Open-ended in the source material; overridable wherever profiles are expanded.
DEFAULT_TREATMENT_KEYWORDS = (
    "treatment",
    "surgery",
    "therapy",
    "radiotherapy",
    "immunotherapy",
    "chemotherapy",
    "targeted therapy",
    "resection",
    "prognosis",
)

_AGE_RE = re.compile(r"(\d{1,3})\s*-?\s*year[\s-]*old", re.IGNORECASE)
_FEMALE_RE = re.compile(r"\b(female|woman|girl)\b", re.IGNORECASE)
_MALE_RE = re.compile(r"\b(male|man|boy)\b", re.IGNORECASE)
_GENE_VARIANT_RE = re.compile(r"^\s*(.*?)\s*\(\s*([^)]*?)\s*\)\s*$")


@dataclass(frozen=True)
class GeneSpec:
    name: str
    variant: str | None = None


@dataclass(frozen=True)
class PatientProfile:
    disease: str
    genes: tuple[GeneSpec, ...]
    age: int | None = None
    gender: str | None = None  # "male" | "female"
    other: tuple[str, ...] = ()

    def validate(self) -> None:
        if not self.disease.strip():
            raise ValueError("profile has no disease")
        if not self.genes:
            raise ValueError("profile has no genes")
        if self.age is not None and not 0 <= self.age <= 130:
            raise ValueError(f"age out of range: {self.age}")
        if self.gender not in (None, "male", "female"):
            raise ValueError(f"bad gender {self.gender!r}")


@dataclass(frozen=True)
class GeneExpansion:
    """One gene after expansion.

    Either the profile pinned a variant (candidate set stays empty) or all
    known variants of the gene become candidates for optional matching.
    """

    name: str
    terms: frozenset[str]
    specified_variant: str | None = None
    candidate_variants: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ExpandedProfile:
    disease: str
    disease_terms: frozenset[str]
    genes: tuple[GeneExpansion, ...]
    drug_terms: frozenset[str]
    treatment_keywords: tuple[str, ...]
    age: int | None = None
    gender: str | None = None
    other: tuple[str, ...] = ()

    def gene_class_terms(self) -> frozenset[str]:
        """All gene-related terms, variants included (for feature extraction)."""
        terms: set[str] = set()
        for g in self.genes:
            terms |= g.terms
            if g.specified_variant:
                terms.add(g.specified_variant)
            terms |= g.candidate_variants
        return frozenset(terms)


def parse_demographic(text: str) -> tuple[int | None, str | None]:
    """Pull age and gender out of a free-text demographic like "61-year-old female"."""
    age = None
    m = _AGE_RE.search(text)
    if m:
        age = int(m.group(1))
        if not 0 <= age <= 130:
            age = None
    gender = None
    if _FEMALE_RE.search(text):
        gender = "female"
    elif _MALE_RE.search(text):
        gender = "male"
    return age, gender


def parse_gene_entry(entry) -> GeneSpec:
    """Accept "KRAS (G12C)" strings or {"name": ..., "variant": ...} objects."""
    if isinstance(entry, str):
        m = _GENE_VARIANT_RE.match(entry)
        if m and m.group(1) and m.group(2):
            return GeneSpec(name=m.group(1), variant=m.group(2))
        return GeneSpec(name=entry.strip())
    if isinstance(entry, dict):
        name = str(entry.get("name", "")).strip()
        if not name:
            raise ValueError("gene entry has no name")
        variant = entry.get("variant")
        return GeneSpec(name=name, variant=str(variant).strip() if variant else None)
    raise ValueError(f"bad gene entry {entry!r}")


def parse_topics(source) -> list[tuple[str, PatientProfile]]:
    """Read a topics file: a JSON array of {id, disease, genes[], demographic, other[]}.

    Topics missing a disease or genes are rejected with an error;
    unparseable demographics leave age/gender absent with a warning.
    """
    if hasattr(source, "read"):
        data = json.load(source)
    else:
        with open(source, encoding="utf-8") as fh:
            data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError("topics file must contain a JSON array")

    topics: list[tuple[str, PatientProfile]] = []
    for i, obj in enumerate(data):
        topic_id = str(obj.get("id", i + 1))
        disease = str(obj.get("disease", "")).strip()
        if not disease:
            raise ValueError(f"topic {topic_id}: missing disease")
        raw_genes = obj.get("genes") or []
        if not raw_genes:
            raise ValueError(f"topic {topic_id}: missing genes")
        genes = tuple(parse_gene_entry(g) for g in raw_genes)

        demographic = str(obj.get("demographic", "") or "")
        age, gender = parse_demographic(demographic)
        if demographic.strip() and age is None and gender is None:
            log.warning(
                "topic %s: could not parse demographic %r", topic_id, demographic
            )
        other = tuple(str(o) for o in (obj.get("other") or []) if str(o).strip())

        profile = PatientProfile(
            disease=disease, genes=genes, age=age, gender=gender, other=other
        )
        profile.validate()
        topics.append((topic_id, profile))
    return topics


def expand_profile(
    profile: PatientProfile,
    tables: OntologyTables,
    treatment_keywords=DEFAULT_TREATMENT_KEYWORDS,
) -> ExpandedProfile:
    """Expand a raw profile through the ontology tables.

    Pure and deterministic; unknown terms fall back to themselves so the
    result always covers at least the raw profile.
    """
    profile.validate()
    disease_terms = tables.diseases.synonyms(profile.disease)
    disease_concept = tables.diseases.concept_of(profile.disease)

    drug_terms: set[str] = set(tables.drugs.drugs_for(disease_concept))
    genes: list[GeneExpansion] = []
    for gene in profile.genes:
        gene_terms = tables.genes.synonyms(gene.name)
        concept = tables.genes.concept_of(gene.name)
        drug_terms |= tables.drugs.drugs_for(concept)
        if gene.variant:
            genes.append(
                GeneExpansion(
                    name=gene.name,
                    terms=frozenset(gene_terms),
                    specified_variant=gene.variant.casefold(),
                )
            )
        else:
            candidates = tables.variants.variants_of(concept) if concept else set()
            genes.append(
                GeneExpansion(
                    name=gene.name,
                    terms=frozenset(gene_terms),
                    candidate_variants=frozenset(candidates),
                )
            )

    return ExpandedProfile(
        disease=profile.disease,
        disease_terms=frozenset(disease_terms),
        genes=tuple(genes),
        drug_terms=frozenset(drug_terms),
        treatment_keywords=tuple(treatment_keywords),
        age=profile.age,
        gender=profile.gender,
        other=profile.other,
    )


def restrict_expansion(ep: ExpandedProfile, keep_terms: set[str]) -> ExpandedProfile:
    """Drop expanded terms outside ``keep_terms`` (case-folded surface forms).

    Raw profile names always survive, so the expansion stays valid.  Used
    by clients that let a clinician deselect synonyms before searching.
    """
    keep = {t.casefold() for t in keep_terms}

    def kept(terms: frozenset[str], always: set[str]) -> frozenset[str]:
        return frozenset({t for t in terms if t in keep} | always)

    genes = tuple(
        replace(
            g,
            terms=kept(g.terms, {g.name.casefold()}),
            candidate_variants=frozenset(t for t in g.candidate_variants if t in keep),
        )
        for g in ep.genes
    )
    return replace(
        ep,
        disease_terms=kept(ep.disease_terms, {ep.disease.casefold()}),
        genes=genes,
        drug_terms=frozenset(t for t in ep.drug_terms if t in keep),
    )
