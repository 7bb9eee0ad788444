"""HTTP front-end: one POST endpoint per handler, domain errors as 400s.

Run locally with ``uvicorn peersel.service.app:app``.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..model import PeerselError
from . import handlers
from . import schemas as S

app = FastAPI(
    title="peersel",
    version=__version__,
    description="Exact peer-selection mechanisms over signed relation networks.",
)


@app.exception_handler(PeerselError)
async def _domain_error(_: Request, exc: PeerselError) -> JSONResponse:
    return JSONResponse(
        status_code=400, content={"error": str(exc), "type": type(exc).__name__}
    )


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/run", response_model=S.RunResponse)
def run(req: S.RunRequest) -> S.RunResponse:
    return handlers.handle_run(req)


@app.post("/check", response_model=S.CheckResponse)
def check(req: S.CheckRequest) -> S.CheckResponse:
    return handlers.handle_check(req)


@app.post("/dsic", response_model=S.DsicResponse)
def dsic(req: S.DsicRequest) -> S.DsicResponse:
    return handlers.handle_dsic(req)


@app.post("/efficiency", response_model=S.EfficiencyResponse)
def efficiency(req: S.EfficiencyRequest) -> S.EfficiencyResponse:
    return handlers.handle_efficiency(req)


@app.post("/compare", response_model=S.CompareResponse)
def compare(req: S.CompareRequest) -> S.CompareResponse:
    return handlers.handle_compare(req)


@app.post("/balance", response_model=S.BalanceResponse)
def balance(req: S.BalanceRequest) -> S.BalanceResponse:
    return handlers.handle_balance(req)


@app.post("/classify", response_model=S.ClassifyResponse)
def classify(req: S.ClassifyRequest) -> S.ClassifyResponse:
    return handlers.handle_classify(req)


@app.post("/witness", response_model=S.WitnessResponse)
def witness(req: S.WitnessRequest) -> S.WitnessResponse:
    return handlers.handle_witness(req)


@app.post("/generate", response_model=S.GenerateResponse)
def generate(req: S.GenerateRequest) -> S.GenerateResponse:
    return handlers.handle_generate(req)
