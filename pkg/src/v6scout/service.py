"""Read-only HTTP service over one immutable model; backend for the explorer UI.

Endpoints (all JSON, each response carries the schema version):

    GET  /health    liveness probe
    GET  /model     the full model archive document
    POST /query     {"evidence": {label: code_id}} -> per-segment posteriors
    POST /generate  {"n": int, "evidence": {...}, "seed": int} -> candidates

Responses are pure functions of (model, request body): there is no
per-request state and generation seeds come from the request, so
identical requests produce identical bodies.
"""

from __future__ import annotations

from typing import Mapping

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .bn import EvidenceError, InconsistentEvidenceError, posterior_marginals
from .hitlist import GenerationRequest, format_target, generate_targets
from .modelio import AnalysisModel, model_document

SCHEMA_VERSION = 1


class QueryBody(BaseModel):
    evidence: dict[str, str] = Field(default_factory=dict)


class GenerateBody(BaseModel):
    n: int = Field(ge=1)
    evidence: dict[str, str] = Field(default_factory=dict)
    seed: int = 0


def format_probability(p: float) -> str:
    """Two-significant-figure percentage, e.g. 100%, 17%, 2.3%, 0.048%."""
    pct = p * 100.0
    if pct >= 99.95:
        return "100%"
    if pct <= 0.0:
        return "0%"
    digits = 1
    threshold = 9.95
    while pct < threshold and digits < 10:
        digits += 1
        threshold /= 10.0
    return f"{pct:.{digits - 1}f}%" if digits > 1 else f"{pct:.0f}%"


def query_response(model: AnalysisModel, evidence: Mapping[str, str]) -> dict:
    marginals = posterior_marginals(model.net, evidence)
    segments = []
    for dic in model.dictionaries:
        label = dic.segment.label
        segments.append(
            {
                "label": label,
                "start": dic.segment.start,
                "end": dic.segment.end,
                "codes": [
                    {
                        "id": code.id,
                        "display": code.display(dic.segment.width),
                        "p": marginals[label][code.id],
                        "p_display": format_probability(marginals[label][code.id]),
                    }
                    for code in dic.codes
                ],
            }
        )
    return {
        "version": SCHEMA_VERSION,
        "evidence": dict(evidence),
        "segments": segments,
    }


def create_app(
    model: AnalysisModel,
    *,
    cors_origins: list[str] | None = None,
    generate_cap: int = 10_000,
    ui_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="v6scout", version=str(SCHEMA_VERSION))
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )
    document = model_document(model)  # model is immutable; render once

    @app.exception_handler(RequestValidationError)
    async def _bad_body(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={
                "version": SCHEMA_VERSION,
                "error": "malformed-request",
                "detail": exc.errors(),
            },
        )

    @app.exception_handler(EvidenceError)
    async def _bad_evidence(request: Request, exc: EvidenceError):
        return JSONResponse(
            status_code=400,
            content={
                "version": SCHEMA_VERSION,
                "error": "unknown-evidence",
                "detail": str(exc),
                "valid": list(exc.valid),
            },
        )

    @app.exception_handler(InconsistentEvidenceError)
    async def _zero_evidence(request: Request, exc: InconsistentEvidenceError):
        return JSONResponse(
            status_code=422,
            content={
                "version": SCHEMA_VERSION,
                "error": "inconsistent-evidence",
                "detail": str(exc),
            },
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": SCHEMA_VERSION}

    @app.get("/model")
    def get_model() -> dict:
        return document

    @app.post("/query")
    def post_query(body: QueryBody) -> dict:
        return query_response(model, body.evidence)

    @app.post("/generate")
    def post_generate(body: GenerateBody):
        if body.n > generate_cap:
            return JSONResponse(
                status_code=400,
                content={
                    "version": SCHEMA_VERSION,
                    "error": "n-too-large",
                    "detail": f"n={body.n} exceeds per-request cap {generate_cap}",
                },
            )
        result = generate_targets(
            model,
            GenerationRequest(n=body.n, evidence=body.evidence, seed=body.seed),
        )
        return {
            "version": SCHEMA_VERSION,
            "requested": body.n,
            "count": len(result),
            "underrun": result.underrun,
            "candidates": [
                {
                    "address": format_target(addr, model.mode),
                    "log_p": logp,
                    "log_p_display": f"{logp:.4f}",
                }
                for addr, logp in zip(result.addresses, result.log_probs)
            ],
        }

    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app


def serve_http(
    model: AnalysisModel,
    host: str = "127.0.0.1",
    port: int = 8000,
    cors_origins: list[str] | None = None,
    generate_cap: int = 10_000,
    ui_dir: str | None = None,
) -> None:
    """Run the service until interrupted."""
    import uvicorn

    app = create_app(
        model, cors_origins=cors_origins, generate_cap=generate_cap, ui_dir=ui_dir
    )
    uvicorn.run(app, host=host, port=port, log_level="info")
