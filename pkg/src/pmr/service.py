"""HTTP service exposing search, expansion and article lookup.

The service is stateless: every request carries the full profile and any
parameter overrides, so identical requests give identical responses. It
shares the Engine with the CLI, keeping the two surfaces in agreement.
"""

from __future__ import annotations

import dataclasses
import time

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, field_validator

from .index import tokenize
from .pipeline import Engine, SearchSettings, expansion_summary
from .profile import GeneSpec, PatientProfile, parse_gene_entry
from .ranker import RankingParams

MAX_PAGE_SIZE = 200


class GeneIn(BaseModel):
    name: str
    variant: str | None = None


class ProfileIn(BaseModel):
    disease: str
    genes: list[GeneIn | str] = Field(default_factory=list)
    age: int | None = None
    gender: str | None = None
    other: list[str] = Field(default_factory=list)

    @field_validator("disease")
    @classmethod
    def _disease_nonempty(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("disease must be non-empty")
        return v

    @field_validator("gender")
    @classmethod
    def _gender_known(cls, v: str | None) -> str | None:
        if v is None:
            return None
        v = v.strip().lower()
        if v not in ("male", "female"):
            raise ValueError("gender must be 'male' or 'female'")
        return v

    @field_validator("age")
    @classmethod
    def _age_plausible(cls, v: int | None) -> int | None:
        if v is not None and not 0 <= v <= 130:
            raise ValueError("age must be between 0 and 130")
        return v

    def to_profile(self) -> PatientProfile:
        genes = []
        for g in self.genes:
            if isinstance(g, str):
                genes.append(parse_gene_entry(g))
            else:
                genes.append(GeneSpec(name=g.name, variant=g.variant))
        profile = PatientProfile(
            disease=self.disease,
            genes=tuple(genes),
            age=self.age,
            gender=self.gender,
            other=tuple(self.other),
        )
        profile.validate()
        return profile


class RankingIn(BaseModel):
    k: float | None = None
    w_s: float | None = None
    w_h: float | None = None
    w_y: float | None = None
    h_axis: float | None = None
    y_axis: float | None = None
    c_h: float | None = None
    c_y: float | None = None
    formula_variant: str | None = None

    def overrides(self) -> dict:
        return {k: v for k, v in self.model_dump().items() if v is not None}


class SearchIn(BaseModel):
    profile: ProfileIn
    params: RankingIn | None = None
    page_size: int = 10
    offset: int = 0
    keep_terms: list[str] | None = None
    use_labeler: bool | None = None
    include_variants: bool | None = None
    use_rerank: bool | None = None
    demote_irrelevant: bool | None = None

    @field_validator("page_size")
    @classmethod
    def _page_size_bounded(cls, v: int) -> int:
        if not 1 <= v <= MAX_PAGE_SIZE:
            raise ValueError(f"page_size must be between 1 and {MAX_PAGE_SIZE}")
        return v

    @field_validator("offset")
    @classmethod
    def _offset_nonnegative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("offset must be non-negative")
        return v


class ExpandIn(BaseModel):
    profile: ProfileIn


def _resolve_params(engine: Engine, override: RankingIn | None) -> RankingParams:
    if override is None:
        return engine.params
    params = dataclasses.replace(engine.params, **override.overrides())
    try:
        params.validate()
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return params


def _resolve_settings(engine: Engine, body: SearchIn) -> SearchSettings:
    changes = {}
    if body.use_labeler is not None:
        changes["use_labeler"] = body.use_labeler
    if body.include_variants is not None:
        changes["include_variants"] = body.include_variants
    if body.use_rerank is not None:
        changes["use_rerank"] = body.use_rerank
    if body.demote_irrelevant is not None:
        changes["demote_irrelevant"] = body.demote_irrelevant
    if not changes:
        return engine.settings
    return dataclasses.replace(engine.settings, **changes)


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="pmr", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def _validation_to_400(request: Request, exc: RequestValidationError):
        details = [
            {
                "field": ".".join(str(p) for p in err.get("loc", ()) if p != "body"),
                "message": err.get("msg", "invalid value"),
            }
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"error": "invalid request", "details": details})

    @app.get("/health")
    async def health() -> dict:
        return {"status": "ok", "articles": engine.index.n_docs}

    @app.get("/config")
    async def config() -> dict:
        return {
            "ranking": dataclasses.asdict(engine.params),
            "settings": dataclasses.asdict(engine.settings),
            "treatment_keywords": list(engine.treatment_keywords),
            "has_model": engine.model is not None,
            "articles": engine.index.n_docs,
        }

    @app.post("/expand")
    async def expand(body: ExpandIn) -> dict:
        try:
            profile = body.profile.to_profile()
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"expansion": expansion_summary(engine.expand(profile))}

    @app.post("/search")
    async def search(body: SearchIn) -> dict:
        try:
            profile = body.profile.to_profile()
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        params = _resolve_params(engine, body.params)
        settings = _resolve_settings(engine, body)
        keep = set(body.keep_terms) if body.keep_terms is not None else None
        started = time.perf_counter()
        outcome = engine.search(profile, params=params, settings=settings, keep_terms=keep)
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        window = outcome.results[body.offset : body.offset + body.page_size]
        return {
            "total": outcome.total_matched,
            "offset": body.offset,
            "items": [engine.result_payload(sa, params) for sa in window],
            "expansion": expansion_summary(outcome.expanded),
            "timing_ms": elapsed_ms,
        }

    @app.get("/article/{pmid}")
    async def article(pmid: str, terms: list[str] = Query(default=[])) -> dict:
        art = engine.index.articles.get(pmid)
        if art is None:
            raise HTTPException(status_code=404, detail=f"no article {pmid}")
        highlights = []
        for term in terms:
            tokens = tuple(tokenize(term))
            if not tokens:
                continue
            fields = [
                f
                for f in ("title", "abstract", "keywords")
                if engine.index.phrase_positions(f, tokens, pmid)
            ]
            if fields:
                highlights.append({"term": term, "fields": fields})
        return {"article": art.to_dict(), "highlights": highlights}

    return app
