"""Two-tier result ranking: score buckets first, then impact and recency.

The adjusted relevance score s stays the primary factor via the bucket
score r1 = floor(s/k); inside a bucket, a secondary score r2 blends the
score remainder with sigmoid-normalized journal impact and publication
year.  The additive r2 keeps each factor independently monotone; the
as-printed variant (impact inside the denominator) is available for
fidelity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .index import Article
from .ontology import JournalImpact
from .query import ScoredArticle


@dataclass(frozen=True)
class RankingParams:
    k: float = 20.0
    w_s: float = 1.0
    w_h: float = 1.0
    w_y: float = 1.0
    h_axis: float = 200.0
    y_axis: float = 2008.0
    c_h: float = 0.05
    c_y: float = 1.0
    formula_variant: str = "additive"  # or "as_printed"

    def validate(self) -> None:
        if self.k <= 0:
            raise ValueError("k must be > 0")
        if self.c_h <= 0 or self.c_y <= 0:
            raise ValueError("sigmoid scales must be > 0")
        if min(self.w_s, self.w_h, self.w_y) < 0:
            raise ValueError("weights must be >= 0")
        if self.formula_variant not in ("additive", "as_printed"):
            raise ValueError(f"unknown formula variant {self.formula_variant!r}")


def sigmoid_norm(x: float, axis: float, c: float) -> float:
    """1 / (1 + exp(-c*(x - axis))): 0.5 at the axis, rising with x.

    Evaluated branch-wise so extreme inputs saturate to 0.0/1.0 instead of
    overflowing.
    """
    t = c * (x - axis)
    if t >= 0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def primary_score(s: float, k: float) -> int:
    """Bucket index floor(s/k); scores within k of each other can share it."""
    return math.floor(s / k)


def secondary_score(s: float, h: float, y: float, params: RankingParams) -> float:
    """Within-bucket blend of score remainder, journal impact and recency."""
    remainder = s - params.k * math.floor(s / params.k)
    sig_h = sigmoid_norm(h, params.h_axis, params.c_h)
    sig_y = sigmoid_norm(y, params.y_axis, params.c_y)
    if params.formula_variant == "as_printed":
        return params.w_s * remainder / (params.k + params.w_h * sig_h) + params.w_y * sig_y
    return params.w_s * (remainder / params.k) + params.w_h * sig_h + params.w_y * sig_y


def rank(
    candidates: list[ScoredArticle],
    articles: dict[str, Article],
    impacts: JournalImpact,
    params: RankingParams = RankingParams(),
) -> list[ScoredArticle]:
    """Order candidates by (r1 desc, r2 desc, s desc, pmid asc) and number them.

    Input order never matters; missing years (0) and unknown journals (0)
    simply land at the cold end of their sigmoids.
    """
    params.validate()
    for sa in candidates:
        article = articles[sa.pmid]
        sa.r1 = primary_score(sa.score, params.k)
        sa.r2 = secondary_score(
            sa.score, float(impacts.impact_of(article.journal)), float(article.year), params
        )
    ordered = sorted(candidates, key=lambda sa: (-sa.r1, -sa.r2, -sa.score, sa.pmid))
    for i, sa in enumerate(ordered, start=1):
        sa.rank = i
    return ordered


def rank_by_score(candidates: list[ScoredArticle]) -> list[ScoredArticle]:
    """Plain score-descending order: the ranking stage's ablation baseline."""
    ordered = sorted(candidates, key=lambda sa: (-sa.score, sa.pmid))
    for i, sa in enumerate(ordered, start=1):
        sa.rank = i
        sa.r1 = 0
        sa.r2 = 0.0
    return ordered
