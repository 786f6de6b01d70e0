"""HTTP facade over models, prediction, diagnosis, and sensitivity.

Sessions hold an immutable network (from a model document, or built from a
scenario plus params) and the current evidence. Evidence updates go through
an explicit PUT and bump a version counter (last writer wins, serialized per
session); what-if calls are read-only overlays and never touch the stored
evidence. Responses are emitted by the same canonical serializers the CLI
uses, so a given (model, evidence) pair yields byte-equal results through
either surface. Sessions live in memory, with optional snapshot-to-file
persistence across restarts.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import io
from .defect import (
    DEFAULT_PARAMS,
    DEFECTS_FOUND,
    FIELD_DEFECTS,
    build_defect_network,
    diagnose_from_verification,
)
from .errors import (
    HeisenbnError,
    InferenceError,
    UnknownNode,
    ValidationError,
    ZeroProbabilityEvidence,
)
from .inference import query_posteriors
from .network import Evidence, Network
from .sensitivity import force_state, tornado_analysis


class UnknownSession(UnknownNode):
    """Maps to 404 alongside unknown-node errors."""


@dataclass
class Session:
    session_id: str
    kind: str  # "model" | "scenario"
    net: Network
    evidence: Evidence
    version: int = 0
    scenario: object | None = None
    params: object | None = None
    created_at: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def add(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.session_id] = session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise LookupError(session_id)
        return session

    def all(self) -> list[Session]:
        with self._lock:
            return list(self._sessions.values())


def _canonical(obj, status_code: int = 200) -> Response:
    return Response(io.canonical_json(obj), status_code=status_code,
                    media_type="application/json")


def _error_response(status: int, exc: Exception) -> JSONResponse:
    payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    return JSONResponse(payload, status_code=status)


def _session_obj(session: Session) -> dict:
    return {
        "session_id": session.session_id,
        "kind": session.kind,
        "version": session.version,
        "nodes": sorted(session.net.node_ids),
        "created_at": session.created_at,
    }


def create_app(snapshot_path: str | None = None, ui_dir: str | None = None) -> FastAPI:
    store = SessionStore()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if snapshot_path:
            _load_snapshot(store, snapshot_path)
        yield
        if snapshot_path:
            _write_snapshot(store, snapshot_path)

    app = FastAPI(title="heisenbn", lifespan=lifespan)

    @app.exception_handler(HeisenbnError)
    async def handle_toolkit_error(request: Request, exc: HeisenbnError):
        if isinstance(exc, ZeroProbabilityEvidence):
            return _error_response(409, exc)
        if isinstance(exc, UnknownNode):
            return _error_response(404, exc)
        if isinstance(exc, InferenceError):
            return _error_response(500, exc)
        return _error_response(400, exc)

    async def _body(request: Request) -> dict:
        raw = await request.body()
        try:
            parsed = json.loads(raw or b"{}")
        except json.JSONDecodeError as exc:
            raise ValidationError(f"request body is not valid JSON: {exc}")
        if not isinstance(parsed, dict):
            raise ValidationError("request body must be a JSON object")
        return parsed

    def _get_session(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except LookupError:
            raise UnknownSession(f"unknown session {session_id!r}")

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await _body(request)
        if ("model" in body) == ("scenario" in body):
            raise ValidationError("provide exactly one of 'model' or 'scenario'")
        if "model" in body:
            net = io.parse_model(io.canonical_json(body["model"]))
            session = Session(uuid.uuid4().hex, "model", net, Evidence({}))
        else:
            scenario = io.parse_scenario(io.canonical_json(
                {"format_version": io.FORMAT_VERSION, **body["scenario"]}))
            params = DEFAULT_PARAMS
            if "params" in body and body["params"] is not None:
                params = io.parse_params(io.canonical_json(
                    {"format_version": io.FORMAT_VERSION, **body["params"]}))
            net, ev = build_defect_network(scenario, params)
            session = Session(uuid.uuid4().hex, "scenario", net, ev,
                              scenario=scenario, params=params)
        store.add(session)
        return _canonical({"session_id": session.session_id,
                           "kind": session.kind,
                           "version": session.version}, status_code=201)

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return _canonical(_session_obj(_get_session(session_id)))

    @app.put("/sessions/{session_id}/evidence")
    async def put_evidence(session_id: str, request: Request):
        session = _get_session(session_id)
        body = await _body(request)
        ev = io.parse_evidence(io.canonical_json(body), session.net)
        with session.lock:
            session.evidence = ev
            session.version += 1
            version = session.version
        return _canonical({"version": version})

    @app.get("/sessions/{session_id}/posteriors")
    async def get_posteriors(session_id: str, targets: str):
        session = _get_session(session_id)
        target_list = [t for t in targets.split(",") if t]
        if not target_list:
            raise ValidationError("targets query parameter is empty")
        report = query_posteriors(session.net, session.evidence, target_list)
        return _canonical(io.posterior_report_obj(report))

    @app.get("/sessions/{session_id}/predict")
    async def predict(session_id: str):
        session = _get_session(session_id)
        if session.kind != "scenario":
            raise ValidationError("predict needs a scenario-backed session")
        # The forward pass is a pure function of scenario evidence, not of any
        # evidence later PUT into the session.
        net, ev = build_defect_network(session.scenario, session.params)
        report = query_posteriors(net, ev, [DEFECTS_FOUND, FIELD_DEFECTS])
        return _canonical(io.posterior_report_obj(report))

    @app.post("/sessions/{session_id}/diagnose")
    async def diagnose(session_id: str, request: Request):
        session = _get_session(session_id)
        if session.kind != "scenario":
            raise ValidationError("diagnose needs a scenario-backed session")
        body = await _body(request)
        if "found" not in body:
            raise ValidationError("body needs a 'found' count")
        found = body["found"]
        if not isinstance(found, int) or isinstance(found, bool):
            raise ValidationError("'found' must be an integer")
        report = diagnose_from_verification(session.scenario, session.params, found)
        return _canonical(io.posterior_report_obj(report))

    @app.post("/sessions/{session_id}/whatif")
    async def whatif(session_id: str, request: Request):
        session = _get_session(session_id)
        body = await _body(request)
        for key in ("node", "state"):
            if key not in body or not isinstance(body[key], str):
                raise ValidationError(f"body needs a string {key!r}")
        targets = body.get("targets")
        if targets is None:
            if session.kind != "scenario":
                raise ValidationError("model sessions need explicit 'targets'")
            targets = [DEFECTS_FOUND, FIELD_DEFECTS]
        with session.lock:
            evidence = session.evidence
            version = session.version
        overlay = force_state(session.net, evidence, body["node"], body["state"])
        if overlay is None:
            raise ZeroProbabilityEvidence(
                f"state {body['state']!r} contradicts the session evidence "
                f"on {body['node']!r}")
        base = query_posteriors(session.net, evidence, targets)
        forced = query_posteriors(session.net, overlay, targets)
        return _canonical({
            "version": version,
            "node": body["node"],
            "state": body["state"],
            "base": io.posterior_report_obj(base),
            "whatif": io.posterior_report_obj(forced),
        })

    @app.get("/sessions/{session_id}/sensitivity")
    async def sensitivity(session_id: str, target: str, inputs: str | None = None):
        session = _get_session(session_id)
        if inputs:
            input_list = [s for s in inputs.split(",") if s]
        else:
            input_list = [nid for nid in sorted(session.net.node_ids)
                          if nid != target and not session.net.parents(nid)]
        result = tornado_analysis(session.net, session.evidence, target, input_list)
        return _canonical(io.sensitivity_obj(result))

    @app.get("/rating-scales")
    async def rating_scales():
        return _canonical(io.rating_scales_obj())

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


# --- snapshot persistence ---------------------------------------------------

def _write_snapshot(store: SessionStore, path: str) -> None:
    sessions = []
    for session in sorted(store.all(), key=lambda s: s.session_id):
        obj = {
            "session_id": session.session_id,
            "kind": session.kind,
            "version": session.version,
            "created_at": session.created_at,
            "evidence": json.loads(io.serialize_evidence(session.evidence, session.net)),
        }
        if session.kind == "scenario":
            obj["scenario"] = io._scenario_obj(session.scenario)
            obj["params"] = io._params_obj(session.params)
        else:
            obj["model"] = json.loads(io.serialize_model(session.net))
        sessions.append(obj)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(io.canonical_json({"sessions": sessions}))


def _load_snapshot(store: SessionStore, path: str) -> None:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        return
    for obj in doc.get("sessions", []):
        if obj.get("kind") == "scenario":
            scenario = io.parse_scenario(io.canonical_json(
                {"format_version": io.FORMAT_VERSION, **obj["scenario"]}))
            params = io.parse_params(io.canonical_json(
                {"format_version": io.FORMAT_VERSION, **obj["params"]}))
            net, _ = build_defect_network(scenario, params)
            session = Session(obj["session_id"], "scenario", net, Evidence({}),
                              version=obj.get("version", 0), scenario=scenario,
                              params=params, created_at=obj.get("created_at", 0.0))
        else:
            net = io.parse_model(io.canonical_json(obj["model"]))
            session = Session(obj["session_id"], "model", net, Evidence({}),
                              version=obj.get("version", 0),
                              created_at=obj.get("created_at", 0.0))
        session.evidence = io.parse_evidence(io.canonical_json(obj["evidence"]),
                                             session.net)
        store.add(session)
