"""Brute-force full-scan retrieval oracle, independent of the package.

Reimplements the retrieval rules from first principles over raw article
dicts, with no inverted index and no imports from the package under test:

  - keep articles with a MeSH code starting with "C" or "D"
  - tokens are lowercase alphanumeric runs; keywords join into one field
  - a matcher is one (possibly multi-token) term in one field; it matches
    when the token sequence occurs adjacently; its score is the sum of
    its constituent tokens' scores, each sqrt(tf) * idf^2 / sqrt(len)
    with idf = 1 + ln(N / (df + 1))
  - a clause is a boosted disjunction of matchers over all three fields;
    an article qualifies iff every must clause matches and no must_not
    clause does
  - s = coord * sum of boosted matched-clause scores, where coord is the
    fraction of must+should clauses matched
  - a gendered profile excludes articles whose title+abstract mention
    only the opposite gender's words

Queries are plain dicts: {"must": [clause...], "should": [...],
"must_not": [...]} with clause = {"name": str, "terms": [str...],
"boost": float}.
"""

import math
import re

FIELDS = ("title", "abstract", "keywords")
MALE_WORDS = {"male", "males", "men", "man", "boy", "boys"}
FEMALE_WORDS = {"female", "females", "women", "woman", "girl", "girls"}


def toks(text):
    return re.findall(r"[a-z0-9]+", text.lower())


def field_tokens(article, field):
    if field == "keywords":
        return toks(" ".join(article.get("keywords") or []))
    return toks(article.get(field) or "")


class BruteForceSearcher:
    """Scans every kept article for every query; no index structures."""

    def __init__(self, articles):
        self.docs = {}
        for art in articles:
            mesh = art.get("mesh") or []
            if not any(code.startswith(("C", "D")) for code in mesh):
                continue
            self.docs[art["pmid"]] = {
                "raw": art,
                "tokens": {f: field_tokens(art, f) for f in FIELDS},
            }
        self.n = len(self.docs)

    def _df(self, field, token):
        return sum(1 for d in self.docs.values() if token in d["tokens"][field])

    def _phrase_occurs(self, tokens, phrase):
        k = len(phrase)
        return any(tokens[i : i + k] == phrase for i in range(len(tokens) - k + 1))

    def _matcher_score(self, pmid, field, phrase):
        tokens = self.docs[pmid]["tokens"][field]
        if not self._phrase_occurs(tokens, phrase):
            return None
        total = 0.0
        for token in phrase:
            tf = tokens.count(token)
            idf = 1.0 + math.log(self.n / (self._df(field, token) + 1))
            total += math.sqrt(tf) * idf * idf / math.sqrt(len(tokens))
        return total

    def _clause(self, pmid, clause):
        matched = False
        score = 0.0
        for term in clause["terms"]:
            phrase = toks(term)
            if not phrase:
                continue
            for field in FIELDS:
                part = self._matcher_score(pmid, field, phrase)
                if part is not None:
                    matched = True
                    score += part
        return matched, clause.get("boost", 1.0) * score

    def gender_ok(self, pmid, gender):
        if gender is None:
            return True
        words = set(
            self.docs[pmid]["tokens"]["title"] + self.docs[pmid]["tokens"]["abstract"]
        )
        mine = FEMALE_WORDS if gender == "female" else MALE_WORDS
        theirs = MALE_WORDS if gender == "female" else FEMALE_WORDS
        if words & mine:
            return True
        return not (words & theirs)

    def search(self, query, gender=None):
        """Returns {pmid: adjusted score} for qualifying compatible articles."""
        results = {}
        scored = query["must"] + query.get("should", [])
        for pmid in self.docs:
            parts = [self._clause(pmid, c) for c in scored]
            n_must = len(query["must"])
            if not all(m for m, _ in parts[:n_must]):
                continue
            if any(self._clause(pmid, c)[0] for c in query.get("must_not", [])):
                continue
            if not self.gender_ok(pmid, gender):
                continue
            coord = sum(1 for m, _ in parts if m) / len(parts)
            results[pmid] = coord * sum(s for m, s in parts if m)
        return results


def query_from_expansion(exp):
    """Build the plain-dict query from an expansion summary dict.

    Mirrors the stated formulation rules: musts are the disease synonyms,
    each gene's synonyms, any pinned variant, and drugs-or-treatment
    keywords; shoulds are candidate variants (boosted) and other
    conditions.
    """
    must = [{"name": "disease", "terms": sorted(exp["disease_terms"]), "boost": 1.0}]
    should = []
    for gene in exp["genes"]:
        must.append({"name": f"gene:{gene['name']}", "terms": sorted(gene["terms"]), "boost": 1.0})
        if gene["specified_variant"]:
            must.append(
                {"name": f"variant:{gene['name']}", "terms": [gene["specified_variant"]], "boost": 1.0}
            )
        elif gene["candidate_variants"]:
            should.append(
                {
                    "name": f"candidate-variants:{gene['name']}",
                    "terms": sorted(gene["candidate_variants"]),
                    "boost": 2.0,
                }
            )
    must.append(
        {
            "name": "drug-or-treatment",
            "terms": sorted(set(exp["drug_terms"]) | set(exp["treatment_keywords"])),
            "boost": 1.0,
        }
    )
    for cond in exp["other"]:
        should.append({"name": f"other:{cond}", "terms": [cond], "boost": 1.0})
    return {"must": must, "should": should, "must_not": []}
