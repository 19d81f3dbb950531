"""HTTP/JSON API for game clients and the parent dashboard.

Endpoints:
  POST /v1/children/{id}/sessions/{sid}/trials   ingest one TrialRecord
  GET  /v1/children/{id}/report                  full report document
  GET  /v1/children/{id}/alerts?since=ms         alerts, time ordered
  GET  /v1/healthz

Report and alert responses are emitted as canonical bytes (not re-encoded
by the framework) so live responses stay byte-identical to replays.
Errors use standard status codes with a JSON body {code, message}.
"""

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .config import AppConfig
from .errors import BadRequest, NotFound
from .jsonutil import canonical_dumps
from .store import EventStore

_JSON = "application/json"


def create_app(config: AppConfig | None = None, store: EventStore | None = None) -> FastAPI:
    config = config or AppConfig()
    store = store or EventStore(config)
    app = FastAPI(title="gamesight", version="1")
    app.state.store = store
    app.state.config = config

    @app.exception_handler(NotFound)
    async def _not_found(request: Request, exc: NotFound):
        return JSONResponse(status_code=404, content={"code": "not_found", "message": str(exc)})

    @app.exception_handler(BadRequest)
    async def _bad_request(request: Request, exc: BadRequest):
        return JSONResponse(status_code=400, content={"code": "bad_request", "message": str(exc)})

    @app.get("/v1/healthz")
    async def healthz():
        return {"status": "ok", "children": len(store.children())}

    @app.post("/v1/children/{child_id}/sessions/{session_id}/trials")
    async def ingest(child_id: str, session_id: str, request: Request):
        try:
            body = await request.json()
        except Exception as exc:
            raise BadRequest(f"body is not valid JSON: {exc}") from exc
        ack = store.ingest_trial(child_id, session_id, body)
        return JSONResponse(status_code=200, content=ack)

    @app.get("/v1/children/{child_id}/report")
    async def report(child_id: str):
        doc = store.report(child_id)
        return Response(content=canonical_dumps(doc), media_type=_JSON)

    @app.get("/v1/children/{child_id}/alerts")
    async def alerts(child_id: str, since: int = 0):
        items = store.alerts(child_id, since_ms=since)
        return Response(
            content=canonical_dumps({"v": 1, "alerts": items}), media_type=_JSON
        )

    return app


def serve(config: AppConfig, host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=config.port)
