"""Loopback HTTP/JSON service exposing the rating-session protocol.

Endpoints:

    POST /sessions                  create a session (body: session_id?,
                                    subject_id, method)
    GET  /sessions/{id}             state summary
    POST /sessions/{id}/events      append one event record (same field
                                    names as the event log) and apply it
    GET  /sessions/{id}/current     interpolated FeatureVector/VA at the
                                    session's cursor
    POST /sessions/{id}/finalize    close the session, returning its
                                    committed rating
    GET  /interpolate?r=R&phi=PHI   stateless interpolation query
    GET  /map                       the active map configuration document

Responses are JSON with an ``ok`` flag; errors carry ``{"error": {"code",
"message"}}``. Events that are mode-illegal are logged before rejection so
a replay of the log reproduces exactly what the live service did; malformed
events and clock regressions are rejected without logging.

Connections may be concurrent; events within one session are serialized in
arrival order under a per-session lock, and each session writes its own
append-only log file.
"""
from __future__ import annotations

import json
import math
import re
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any
from urllib.parse import parse_qs, urlparse

from .expression import (
    Cursor,
    FeatureVector,
    PolarMap,
    interpolate_expression,
    interpolate_va,
    map_to_document,
)
from .scales import VAScore
from .session import (
    ClockError,
    CommittedRating,
    EventLog,
    EventValidationError,
    INITIAL_STATE,
    METHODS,
    ProtocolError,
    RatingEvent,
    SessionState,
    handle_event,
)

__all__ = ["MoodService", "ServiceCore", "SESSION_ID_PATTERN"]

SESSION_ID_PATTERN = re.compile(r"^[A-Za-z0-9_-]{1,64}$")


def _fv_dict(fv: FeatureVector) -> dict[str, float]:
    return {name: value for name, value in zip(fv.schema.names, fv.values)}


def _va_dict(va: VAScore) -> dict[str, float]:
    return {"valence": va.valence, "arousal": va.arousal}


def _committed_dict(rating: CommittedRating) -> dict[str, Any]:
    return {
        "stimulus_id": rating.stimulus_id,
        "cursor": {"r": rating.cursor.r, "phi": rating.cursor.phi},
        "fv": _fv_dict(rating.fv),
        "va": _va_dict(rating.va),
    }


@dataclass
class _Session:
    session_id: str
    subject_id: str
    method: str
    log: EventLog
    state: SessionState = INITIAL_STATE
    lock: threading.Lock = field(default_factory=threading.Lock)
    events_logged: int = 0
    protocol_errors: int = 0
    finalized: bool = False


class _ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class ServiceCore:
    """Transport-independent request handling; returns (status, body) pairs."""

    def __init__(self, pmap: PolarMap, log_dir: str):
        self.pmap = pmap
        self.log_dir = Path(log_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, _Session] = {}
        self._registry_lock = threading.Lock()
        self._counter = 0

    # -- helpers

    def _session(self, session_id: str) -> _Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise _ServiceError(404, "unknown-session", f"no session {session_id!r}")
        return session

    def _summary(self, session: _Session) -> dict[str, Any]:
        state = session.state
        return {
            "session_id": session.session_id,
            "subject_id": session.subject_id,
            "method": session.method,
            "mode": state.mode,
            "cursor": {"r": state.cursor.r, "phi": state.cursor.phi},
            "stimulus_id": state.stimulus_id,
            "committed": None if state.committed is None else _committed_dict(state.committed),
            "events_logged": session.events_logged,
            "protocol_errors": session.protocol_errors,
            "finalized": session.finalized,
            "last_t_mono": session.log.last_t_mono(session.session_id) or 0,
        }

    def _interpolation(self, cursor: Cursor) -> dict[str, Any]:
        return {
            "cursor": {"r": cursor.r, "phi": cursor.phi},
            "fv": _fv_dict(interpolate_expression(self.pmap, cursor)),
            "va": _va_dict(interpolate_va(self.pmap, cursor)),
        }

    # -- endpoints

    def create_session(self, body: dict[str, Any]) -> tuple[int, dict[str, Any]]:
        if not isinstance(body, dict):
            raise _ServiceError(400, "invalid-request", "body must be a JSON object")
        subject_id = body.get("subject_id")
        method = body.get("method")
        if not isinstance(subject_id, str) or not subject_id:
            raise _ServiceError(400, "invalid-request", "subject_id must be a non-empty string")
        if method not in METHODS:
            raise _ServiceError(400, "invalid-request", f"method must be one of {METHODS}")
        session_id = body.get("session_id")
        with self._registry_lock:
            if session_id is None:
                self._counter += 1
                session_id = f"s{self._counter:04d}"
            if not isinstance(session_id, str) or not SESSION_ID_PATTERN.match(session_id):
                raise _ServiceError(
                    400, "invalid-request",
                    "session_id must match [A-Za-z0-9_-]{1,64}",
                )
            if session_id in self._sessions:
                raise _ServiceError(409, "duplicate-session", f"session {session_id!r} exists")
            log = EventLog(self.log_dir / f"{session_id}.jsonl")
            self._sessions[session_id] = _Session(session_id, subject_id, method, log)
            session = self._sessions[session_id]
        return 200, {"ok": True, "session": self._summary(session)}

    def get_session(self, session_id: str) -> tuple[int, dict[str, Any]]:
        session = self._session(session_id)
        with session.lock:
            return 200, {"ok": True, "session": self._summary(session)}

    def post_event(self, session_id: str, body: dict[str, Any]) -> tuple[int, dict[str, Any]]:
        session = self._session(session_id)
        if not isinstance(body, dict):
            raise _ServiceError(400, "invalid-event", "body must be a JSON object")
        record = dict(body)
        record.setdefault("session_id", session.session_id)
        record.setdefault("subject_id", session.subject_id)
        record.setdefault("method", session.method)
        record.setdefault("stimulus_id", None)
        record.setdefault("payload", None)
        record.setdefault("t_wall", datetime.now(timezone.utc).isoformat())
        if record["session_id"] != session.session_id:
            raise _ServiceError(400, "invalid-event", "session_id does not match the URL")
        if record["method"] != session.method:
            raise _ServiceError(400, "invalid-event", "method does not match the session")
        try:
            event = RatingEvent(**record)
        except TypeError as exc:
            raise _ServiceError(400, "invalid-event", f"bad event record: {exc}") from None
        with session.lock:
            if session.finalized:
                raise _ServiceError(409, "session-finalized", "session is finalized")
            try:
                session.log.append(event)
            except EventValidationError as exc:
                raise _ServiceError(400, "invalid-event", str(exc)) from None
            except ClockError as exc:
                raise _ServiceError(409, "clock-regression", str(exc)) from None
            session.events_logged += 1
            try:
                session.state = handle_event(session.state, event, self.pmap)
            except ProtocolError as exc:
                session.protocol_errors += 1
                raise _ServiceError(422, "protocol-error", str(exc)) from None
            return 200, {"ok": True, "state": self._summary(session)}

    def get_current(self, session_id: str) -> tuple[int, dict[str, Any]]:
        session = self._session(session_id)
        with session.lock:
            body = self._interpolation(session.state.cursor)
            body.update(
                ok=True,
                mode=session.state.mode,
                stimulus_id=session.state.stimulus_id,
            )
            return 200, body

    def finalize(self, session_id: str) -> tuple[int, dict[str, Any]]:
        session = self._session(session_id)
        with session.lock:
            if session.state.committed is None:
                raise _ServiceError(409, "no-committed-rating", "nothing confirmed yet")
            if not session.finalized:
                session.finalized = True
                session.log.close()
            return 200, {
                "ok": True,
                "committed": _committed_dict(session.state.committed),
                "events_logged": session.events_logged,
                "protocol_errors": session.protocol_errors,
            }

    def interpolate_query(self, query: dict[str, list[str]]) -> tuple[int, dict[str, Any]]:
        try:
            r = float(query["r"][0])
            phi = float(query["phi"][0])
        except (KeyError, IndexError, ValueError):
            raise _ServiceError(400, "invalid-request", "r and phi query parameters required") from None
        if not (math.isfinite(r) and math.isfinite(phi)):
            raise _ServiceError(400, "invalid-request", "r and phi must be finite")
        body = self._interpolation(Cursor(r, phi))
        body["ok"] = True
        return 200, body

    def get_map(self) -> tuple[int, dict[str, Any]]:
        return 200, {"ok": True, "map": map_to_document(self.pmap)}

    def close(self) -> None:
        with self._registry_lock:
            for session in self._sessions.values():
                if not session.finalized:
                    session.log.close()

    # -- routing

    def handle(self, verb: str, path: str, body: dict[str, Any] | None) -> tuple[int, dict[str, Any]]:
        parsed = urlparse(path)
        parts = [p for p in parsed.path.split("/") if p]
        try:
            if verb == "POST" and parts == ["sessions"]:
                return self.create_session(body if body is not None else {})
            if len(parts) == 2 and parts[0] == "sessions":
                if verb == "GET":
                    return self.get_session(parts[1])
            if len(parts) == 3 and parts[0] == "sessions":
                sid, tail = parts[1], parts[2]
                if verb == "POST" and tail == "events":
                    return self.post_event(sid, body if body is not None else {})
                if verb == "GET" and tail == "current":
                    return self.get_current(sid)
                if verb == "POST" and tail == "finalize":
                    return self.finalize(sid)
            if verb == "GET" and parts == ["interpolate"]:
                return self.interpolate_query(parse_qs(parsed.query))
            if verb == "GET" and parts == ["map"]:
                return self.get_map()
        except _ServiceError as exc:
            return exc.status, {
                "ok": False,
                "error": {"code": exc.code, "message": exc.message},
            }
        return 404, {
            "ok": False,
            "error": {"code": "not-found", "message": f"no route {verb} {parsed.path}"},
        }


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    core: ServiceCore

    def log_message(self, format: str, *args: Any) -> None:
        pass  # success paths must stay quiet

    def _reply(self, status: int, body: dict[str, Any]) -> None:
        data = json.dumps(body, separators=(",", ":")).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _read_body(self) -> dict[str, Any] | None:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return None
        raw = self.rfile.read(length)
        try:
            parsed = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise _ServiceError(400, "invalid-json", "body is not valid JSON") from None
        if not isinstance(parsed, dict):
            raise _ServiceError(400, "invalid-json", "body must be a JSON object")
        return parsed

    def do_GET(self) -> None:
        status, body = self.core.handle("GET", self.path, None)
        self._reply(status, body)

    def do_POST(self) -> None:
        try:
            body = self._read_body()
        except _ServiceError as exc:
            self._reply(exc.status, {"ok": False, "error": {"code": exc.code, "message": exc.message}})
            return
        status, reply = self.core.handle("POST", self.path, body)
        self._reply(status, reply)


class MoodService:
    """Threaded loopback server wrapping a ServiceCore."""

    def __init__(self, pmap: PolarMap, log_dir: str, host: str = "127.0.0.1", port: int = 0):
        self.core = ServiceCore(pmap, log_dir)
        handler = type("BoundHandler", (_Handler,), {"core": self.core})
        self._server = ThreadingHTTPServer((host, port), handler)
        self._thread: threading.Thread | None = None

    @property
    def host(self) -> str:
        return self._server.server_address[0]

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    def start(self) -> None:
        """Serve on a background thread (for embedding and tests)."""
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def shutdown(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join()
            self._thread = None
        self.core.close()
