"""HTTP API hosting maps, assessments, and live elicitation sessions.

Single-node, in-memory service with write-through persistence to a
storage directory (maps as lossless JSON, assessments beside them,
session logs as JSON lines). Sessions are owned by a bearer token minted
at creation and expire after a TTL. Per-map and per-session operations
are serialized behind locks, so no request observes a half-applied
mutation; answers are idempotent on retry with the same prompt id and
payload.

Error bodies carry the same stable codes the model raises:
404 unknown ids, 409 stale prompt ids, 410 expired or finished sessions,
400 everything the domain rejects.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from fastapi import Body, FastAPI, Header, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import dsl, hypogen, render
from .analysis import InvalidMap, structure_report
from .elicitation import (
    ElicitationSession,
    SessionDone,
    SessionError,
    StalePrompt,
)
from .model import CognitiveMap, MapError
from .registry import (
    AssessmentRegistry,
    Evidence,
    EvidenceSource,
    RegistryError,
    RiskLevel,
    Status,
    UnknownHypothesis,
    summary,
)

DEFAULT_SESSION_TTL = 24 * 3600


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, extra: Optional[dict] = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.extra = extra or {}

    def response(self) -> JSONResponse:
        body = {"code": self.code, "message": self.message, **self.extra}
        return JSONResponse(status_code=self.status, content=body)


@dataclass
class SessionHandle:
    session: ElicitationSession
    token: str
    expires_at: float
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_answer: Optional[tuple] = None  # (prompt_id, payload_json, response)
    finished: bool = False


@dataclass
class MapHandle:
    map: CognitiveMap
    registry: AssessmentRegistry = field(default_factory=AssessmentRegistry)
    lock: threading.Lock = field(default_factory=threading.Lock)


class ServiceState:
    def __init__(self, storage_dir: Path, session_ttl: float = DEFAULT_SESSION_TTL):
        self.storage_dir = storage_dir
        self.maps_dir = storage_dir / "maps"
        self.sessions_dir = storage_dir / "sessions"
        self.maps_dir.mkdir(parents=True, exist_ok=True)
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.session_ttl = session_ttl
        self.maps: Dict[str, MapHandle] = {}
        self.sessions: Dict[str, SessionHandle] = {}
        self._load_existing()

    def _load_existing(self) -> None:
        for path in sorted(self.maps_dir.glob("*.json")):
            if path.name.endswith(".assessments.json"):
                continue
            cmap = dsl.import_json(path.read_text(encoding="utf-8"))
            handle = MapHandle(map=cmap)
            assessments = self.maps_dir / f"{cmap.id}.assessments.json"
            if assessments.exists():
                known = [hypogen.hypothesis_id_for_edge(e) for e in cmap.edges]
                handle.registry = AssessmentRegistry.load(assessments, known_ids=known)
            self.maps[cmap.id] = handle

    # -- persistence --------------------------------------------------------

    def persist_map(self, handle: MapHandle) -> None:
        path = self.maps_dir / f"{handle.map.id}.json"
        path.write_text(dsl.export_json(handle.map), encoding="utf-8")

    def persist_registry(self, handle: MapHandle) -> None:
        path = self.maps_dir / f"{handle.map.id}.assessments.json"
        handle.registry.save(path)

    def persist_session_log(self, handle: SessionHandle) -> None:
        path = self.sessions_dir / f"{handle.session.id}.log.jsonl"
        path.write_text(handle.session.log_jsonl(), encoding="utf-8")

    # -- lookups --------------------------------------------------------------

    def map_handle(self, map_id: str) -> MapHandle:
        handle = self.maps.get(map_id)
        if handle is None:
            raise ApiError(404, "UnknownMap", f"no map with id {map_id!r}")
        return handle

    def session_handle(self, session_id: str, token: Optional[str]) -> SessionHandle:
        handle = self.sessions.get(session_id)
        if handle is None:
            raise ApiError(404, "UnknownSession", f"no session with id {session_id!r}")
        if time.monotonic() > handle.expires_at:
            raise ApiError(410, "SessionExpired", "session expired")
        if token != handle.token:
            raise ApiError(401, "BadToken", "missing or wrong session token")
        return handle


def _bearer(authorization: Optional[str]) -> Optional[str]:
    if authorization and authorization.startswith("Bearer "):
        return authorization[len("Bearer "):]
    return None


def _map_from_body(body: dict, keep_id: Optional[str] = None) -> CognitiveMap:
    if not isinstance(body, dict):
        raise ApiError(400, "BadBody", "expected a JSON object")
    if "dsl" in body:
        result = dsl.parse(str(body["dsl"]))
        if not result.ok:
            raise ApiError(400, "ParseError", "map source has errors",
                           {"diagnostics": [d.to_dict() for d in result.errors]})
        cmap = result.map
    elif "map" in body:
        try:
            cmap = dsl.map_from_dict(body["map"])
        except dsl.JsonFormatError as exc:
            raise ApiError(400, exc.code, exc.message,
                           {"path": exc.path}) from None
    else:
        raise ApiError(400, "BadBody", 'body needs a "dsl" or "map" field')
    if keep_id:
        cmap.id = keep_id
    return cmap


def _prompt_payload(session: ElicitationSession) -> Optional[dict]:
    try:
        prompt = session.next_prompt()
    except SessionDone:
        return None
    return prompt.to_dict() if prompt else None


def build_app(storage_dir: Path, cors_origins: Optional[List[str]] = None,
              session_ttl: float = DEFAULT_SESSION_TTL,
              static_dir: Optional[Path] = None) -> FastAPI:
    state = ServiceState(Path(storage_dir), session_ttl=session_ttl)
    app = FastAPI(title="hymap service")
    app.state.hymap = state

    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return exc.response()

    def _domain(exc: Exception) -> ApiError:
        code = getattr(exc, "code", exc.__class__.__name__)
        return ApiError(400, code, str(exc))

    # -- maps ---------------------------------------------------------------

    @app.post("/maps")
    def create_map(body: dict = Body(...)):
        cmap = _map_from_body(body)
        handle = MapHandle(map=cmap)
        state.maps[cmap.id] = handle
        state.persist_map(handle)
        return {"id": cmap.id, "map": dsl.map_to_dict(cmap)}

    @app.get("/maps/{map_id}")
    def get_map(map_id: str):
        handle = state.map_handle(map_id)
        return dsl.map_to_dict(handle.map)

    @app.put("/maps/{map_id}")
    def put_map(map_id: str, body: dict = Body(...)):
        handle = state.map_handle(map_id)
        with handle.lock:
            cmap = _map_from_body(body, keep_id=map_id)
            handle.map = cmap
            state.persist_map(handle)
            return dsl.map_to_dict(cmap)

    @app.get("/maps/{map_id}/diagnostics")
    def get_diagnostics(map_id: str):
        handle = state.map_handle(map_id)
        diagnostics = handle.map.validate()
        return {
            "diagnostics": [d.to_dict() for d in diagnostics],
            "report": structure_report(handle.map).to_dict(),
        }

    @app.get("/maps/{map_id}/layout")
    def get_layout(map_id: str):
        handle = state.map_handle(map_id)
        try:
            return render.layout(handle.map)
        except InvalidMap as exc:
            raise _domain(exc) from None

    @app.get("/maps/{map_id}/hypotheses")
    def get_hypotheses(map_id: str, prioritized: int = Query(default=0)):
        handle = state.map_handle(map_id)
        try:
            hypotheses = hypogen.generate(handle.map)
        except InvalidMap as exc:
            raise _domain(exc) from None
        if prioritized:
            hypotheses = hypogen.prioritize(hypotheses, handle.registry)
        return {"hypotheses": hypogen.to_dicts(hypotheses, handle.registry)}

    @app.get("/maps/{map_id}/summary")
    def get_summary(map_id: str, all_statuses: int = Query(default=0)):
        handle = state.map_handle(map_id)
        hypotheses = hypogen.generate(handle.map)
        table = summary(handle.registry, hypotheses, paper_mode=not all_statuses)
        return {"summary": table.to_dict(), "markdown": table.to_markdown()}

    # -- assessments -----------------------------------------------------------

    @app.post("/hypotheses/{hypothesis_id}/assessment")
    def post_assessment(hypothesis_id: str, body: dict = Body(...)):
        map_id = body.get("map_id")
        if not map_id:
            raise ApiError(400, "BadBody", 'body needs a "map_id" field')
        handle = state.map_handle(map_id)
        with handle.lock:
            known = [hypogen.hypothesis_id_for_edge(e) for e in handle.map.edges]
            try:
                status = Status(body.get("status"))
                risk = RiskLevel(body["risk"]) if body.get("risk") else None
                evidence = [
                    Evidence(source=EvidenceSource(e["source"]),
                             note=e.get("note", ""), date=e.get("date"))
                    for e in body.get("evidence", [])
                ]
            except (ValueError, KeyError, TypeError) as exc:
                raise ApiError(400, "BadBody", f"malformed assessment: {exc}") from None
            try:
                assessment = handle.registry.assess(
                    hypothesis_id, status, risk=risk, evidence=evidence, known_ids=known)
            except UnknownHypothesis as exc:
                raise ApiError(404, exc.code, str(exc)) from None
            except RegistryError as exc:
                raise _domain(exc) from None
            state.persist_registry(handle)
            return assessment.to_dict()

    # -- sessions -----------------------------------------------------------------

    @app.post("/sessions")
    def create_session(body: dict = Body(...)):
        title = str(body.get("title", ""))
        session = ElicitationSession(title=title)
        handle = SessionHandle(
            session=session,
            token=secrets.token_urlsafe(16),
            expires_at=time.monotonic() + state.session_ttl,
        )
        state.sessions[session.id] = handle
        state.persist_session_log(handle)
        return {
            "session_id": session.id,
            "token": handle.token,
            "prompt": _prompt_payload(session),
            "phase": session.phase.value,
        }

    @app.get("/sessions/{session_id}/prompt")
    def get_prompt(session_id: str, authorization: Optional[str] = Header(default=None)):
        handle = state.session_handle(session_id, _bearer(authorization))
        if handle.finished:
            raise ApiError(410, "SessionDone", "session already finished")
        with handle.lock:
            return {"prompt": _prompt_payload(handle.session),
                    "phase": handle.session.phase.value}

    @app.get("/sessions/{session_id}/layout")
    def get_session_layout(session_id: str,
                           authorization: Optional[str] = Header(default=None)):
        """Canvas view of the map under construction."""
        handle = state.session_handle(session_id, _bearer(authorization))
        with handle.lock:
            try:
                return render.layout(handle.session.map)
            except InvalidMap:
                # before the naming answer there is no product yet
                return {"version": render.LAYOUT_SCHEMA_VERSION, "band_count": 0,
                        "bands": [], "width": 0, "height": 0, "nodes": [], "edges": []}

    @app.post("/sessions/{session_id}/answer")
    def post_answer(session_id: str, body: dict = Body(...),
                    authorization: Optional[str] = Header(default=None)):
        handle = state.session_handle(session_id, _bearer(authorization))
        if handle.finished:
            raise ApiError(410, "SessionDone", "session already finished")
        prompt_id = body.get("prompt_id")
        if not isinstance(prompt_id, str):
            raise ApiError(400, "BadBody", 'body needs a "prompt_id" field')
        payload = body.get("payload")
        payload_json = json.dumps(payload, sort_keys=True)
        with handle.lock:
            if handle.last_answer and handle.last_answer[0] == prompt_id:
                if handle.last_answer[1] == payload_json:
                    return handle.last_answer[2]  # idempotent retry
                raise ApiError(409, "StalePrompt",
                               f"prompt {prompt_id!r} was already answered differently")
            try:
                deltas = handle.session.answer(prompt_id, payload)
            except StalePrompt as exc:
                raise ApiError(409, exc.code, str(exc)) from None
            except SessionDone as exc:
                raise ApiError(410, exc.code, str(exc)) from None
            except (SessionError, MapError, InvalidMap) as exc:
                raise _domain(exc) from None
            response = {
                "deltas": deltas,
                "prompt": _prompt_payload(handle.session),
                "phase": handle.session.phase.value,
                "map": dsl.map_to_dict(handle.session.map),
            }
            handle.last_answer = (prompt_id, payload_json, response)
            state.persist_session_log(handle)
            return response

    @app.post("/sessions/{session_id}/finish")
    def post_finish(session_id: str, authorization: Optional[str] = Header(default=None)):
        handle = state.session_handle(session_id, _bearer(authorization))
        with handle.lock:
            if handle.finished:
                raise ApiError(410, "SessionDone", "session already finished")
            try:
                result = handle.session.finish()
            except (SessionError, InvalidMap) as exc:
                raise _domain(exc) from None
            handle.finished = True
            state.persist_session_log(handle)
            map_handle = MapHandle(map=result.map)
            state.maps[result.map.id] = map_handle
            state.persist_map(map_handle)
            return {
                "map_id": result.map.id,
                "map": dsl.map_to_dict(result.map),
                "hypotheses": [h.to_dict() for h in result.hypotheses],
                "warnings": result.warnings,
            }

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
