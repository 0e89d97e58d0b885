"""HTTP layer over the experiment service.

Participant endpoints expose only the stage-scoped snapshot; everything the
client displays comes from the server, and the server stays authoritative on
validation. Admin endpoints cover export, the lottery, and strategy uploads.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import dataset
from ..game import InvalidMove, OutOfTurn
from ..questionnaires import ResponseError
from ..session import (
    ExperimentService,
    ServiceConfig,
    StageError,
    UnknownSubject,
)
from ..strategy import StrategyError, parse_strategy_config
from . import schemas


def create_app(service: ExperimentService | None = None) -> FastAPI:
    service = service or ExperimentService(ServiceConfig())
    app = FastAPI(title="trustlab session service")
    app.state.service = service

    @app.exception_handler(UnknownSubject)
    async def _unknown(request, exc):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(StageError)
    async def _stage(request, exc):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(OutOfTurn)
    async def _turn(request, exc):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(InvalidMove)
    async def _move(request, exc):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ResponseError)
    async def _response(request, exc):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(StrategyError)
    async def _strategy(request, exc):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/slots")
    def slots():
        return {"slots": list(service.config.slot_times)}

    @app.post("/register", response_model=schemas.RegisterResponse)
    def register(body: schemas.RegisterRequest):
        try:
            subject_id = service.register(body.slot)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"subject_id": subject_id, "slot": body.slot}

    @app.post("/subjects/{subject_id}/start", response_model=schemas.StartResponse)
    def start(subject_id: str):
        service.start(subject_id)  # treatment deliberately not returned
        return {"subject_id": subject_id}

    @app.get("/subjects/{subject_id}/state")
    def state(subject_id: str):
        return service.snapshot(subject_id)

    @app.post("/subjects/{subject_id}/instructions/ack", response_model=schemas.AckResponse)
    def ack_instructions(subject_id: str):
        service.acknowledge_instructions(subject_id)
        return _ack(subject_id)

    @app.post("/subjects/{subject_id}/send", response_model=schemas.AckResponse)
    def submit_send(subject_id: str, body: schemas.AmountRequest):
        service.submit_send(subject_id, body.amount)
        return _ack(subject_id)

    @app.post("/subjects/{subject_id}/return", response_model=schemas.AckResponse)
    def submit_return(subject_id: str, body: schemas.AmountRequest):
        service.submit_return(subject_id, body.amount)
        return _ack(subject_id)

    @app.post(
        "/subjects/{subject_id}/answers/time-preference",
        response_model=schemas.AckResponse,
    )
    def answer_time_pref(subject_id: str, body: schemas.TimePrefAnswer):
        service.submit_time_pref(subject_id, body.position, body.choice)
        return _ack(subject_id)

    @app.post("/subjects/{subject_id}/answers/trust", response_model=schemas.AckResponse)
    def answer_trust(subject_id: str, body: schemas.TrustAnswer):
        service.submit_trust(subject_id, body.position, body.value)
        return _ack(subject_id)

    @app.post("/subjects/{subject_id}/answers/certainty", response_model=schemas.AckResponse)
    def answer_certainty(subject_id: str, body: schemas.CertaintyAnswer):
        service.submit_certainty(subject_id, body.block, body.agreement, body.certainty)
        return _ack(subject_id)

    @app.post("/subjects/{subject_id}/answers/demographics", response_model=schemas.AckResponse)
    def answer_demographics(subject_id: str, body: schemas.DemographicsAnswer):
        service.submit_demographics(subject_id, body.answers)
        return _ack(subject_id)

    @app.post("/subjects/{subject_id}/debrief/ack", response_model=schemas.AckResponse)
    def ack_debrief(subject_id: str):
        service.acknowledge_debrief(subject_id)
        return _ack(subject_id)

    @app.post("/admin/export", response_model=schemas.ExportResponse)
    def admin_export(body: schemas.ExportRequest):
        tables = dataset.export_tables(service)
        paths = dataset.write_tables(tables, body.out_dir)
        return {
            "paths": {name: str(path) for name, path in paths.items()},
            "row_counts": {name: len(frame) for name, frame in tables.items()},
        }

    @app.post("/admin/lottery", response_model=schemas.LotteryResponse)
    def admin_lottery():
        try:
            result = service.draw_lottery()
        except ValueError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"winner": result.winner, "reward": result.reward, "weights": result.weights}

    @app.post("/admin/strategy-table", response_model=schemas.StrategyUploadResponse)
    def admin_strategy(body: schemas.StrategyUpload):
        high, low = parse_strategy_config(body.config)  # raises StrategyError on violation
        service.high_table, service.low_table = high, low
        service._emit("", "strategy_table_loaded", {"version": high.version})
        return {"version": high.version}

    @app.get("/admin/sessions", response_model=schemas.SessionSummary)
    def admin_sessions():
        by_stage: dict[str, int] = {}
        for flow in service.flows.values():
            by_stage[flow.stage.name.lower()] = by_stage.get(flow.stage.name.lower(), 0) + 1
        return {
            "slots": list(service.config.slot_times),
            "subjects_by_stage": by_stage,
            "total_subjects": len(service.flows),
        }

    def _ack(subject_id: str) -> dict:
        return {
            "subject_id": subject_id,
            "stage": service.flows[subject_id].stage.name.lower(),
        }

    return app
