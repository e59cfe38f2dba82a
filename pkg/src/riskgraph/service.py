"""HTTP evaluation service consumed by the what-if UI.

Stateless between requests except for an in-memory store of what-if
overlays keyed by opaque session tokens; sessions expire after an idle
timeout.  The service writes to disk only on explicit graph save calls.
Evaluation responses are byte-identical to the CLI's JSON report for the
same graph, profile, and overlay.
"""

from __future__ import annotations

import json
import re
import secrets
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .countermeasures import Overlay, what_if
from .errors import (
    GraphInvalidError,
    ParseError,
    ProfileError,
    RiskGraphError,
)
from .feasibility import evaluate_graph
from .io import emit_report, parse_graph
from .profiles import builtin_names, load_builtin, load_profile, resolve_profile

_ID_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")
_MAX_BODY = 10 * 1024 * 1024

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, path: str = ""):
        super().__init__(message)
        self.status = status
        self.code = code
        self.path = path


class SessionStore:
    """Overlay per session token; read-modify-write is atomic per store."""

    def __init__(self, timeout: float):
        self.timeout = timeout
        self._lock = threading.Lock()
        self._sessions: dict[str, tuple[dict, float]] = {}

    def _purge(self, now: float) -> None:
        expired = [token for token, (_, touched) in self._sessions.items()
                   if touched + self.timeout < now]
        for token in expired:
            del self._sessions[token]

    def update(self, token: str | None, overlay_doc: dict | None) -> tuple[str, dict]:
        """Fetch or create a session; a supplied overlay replaces the stored one."""
        now = time.monotonic()
        with self._lock:
            self._purge(now)
            if not token or token not in self._sessions:
                token = secrets.token_urlsafe(16)
                stored = {"disabled": [], "rating_overrides": {}}
            else:
                stored = self._sessions[token][0]
            if overlay_doc is not None:
                stored = overlay_doc
            self._sessions[token] = (stored, now)
            return token, stored


class RiskGraphService:
    def __init__(self, graph_dir: str, ui_dir: str | None,
                 profile_dirs: list[str], session_timeout: float):
        self.graph_dir = Path(graph_dir)
        self.ui_dir = Path(ui_dir) if ui_dir else None
        self.profile_dirs = list(profile_dirs)
        self.sessions = SessionStore(session_timeout)

    # -- lookups ----------------------------------------------------------

    def _graph_path(self, graph_id: str) -> Path:
        if not _ID_PATTERN.match(graph_id) or ".." in graph_id:
            raise ApiError(400, "BAD_ID", f"illegal graph id {graph_id!r}")
        return self.graph_dir / f"{graph_id}.rag"

    def _load_graph_and_profile(self, body: dict):
        if "graph" in body and body["graph"] is not None:
            text = json.dumps(body["graph"])
        elif body.get("graph_id"):
            path = self._graph_path(str(body["graph_id"]))
            if not path.is_file():
                raise ApiError(404, "NOT_FOUND", f"no graph {body['graph_id']!r}",
                               path="graph_id")
            text = path.read_text(encoding="utf-8")
        else:
            raise ApiError(400, "BAD_REQUEST", "supply graph_id or an inline graph")
        try:
            graph = parse_graph(text)
        except ParseError as exc:
            raise ApiError(400, "PARSE_ERROR", str(exc), path=exc.path or "graph")
        name = body.get("profile")
        try:
            if name:
                profile = resolve_profile(str(name), self.profile_dirs)
            elif graph.inline_profile is not None:
                profile = load_profile(graph.inline_profile)
            else:
                profile = resolve_profile(graph.profile_name, self.profile_dirs)
        except ProfileError as exc:
            raise ApiError(400, "PROFILE_ERROR", str(exc), path=exc.path or "profile")
        return graph, profile

    @staticmethod
    def _overlay(body: dict) -> Overlay:
        doc = body.get("overlay")
        if doc is None:
            return Overlay()
        if not isinstance(doc, dict):
            raise ApiError(400, "BAD_REQUEST", "overlay must be an object",
                           path="overlay")
        return Overlay.from_dict(doc)

    # -- handlers ---------------------------------------------------------

    def list_graphs(self):
        graphs = []
        for path in sorted(self.graph_dir.glob("*.rag")):
            entry = {"id": path.stem, "title": path.stem, "profile": None}
            try:
                graph = parse_graph(path.read_bytes())
                entry["title"] = graph.metadata.get("title", path.stem)
                entry["profile"] = graph.profile_name
            except ParseError:
                entry["error"] = "unparseable"
            graphs.append(entry)
        return graphs

    def get_graph(self, graph_id: str):
        path = self._graph_path(graph_id)
        if not path.is_file():
            raise ApiError(404, "NOT_FOUND", f"no graph {graph_id!r}")
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ApiError(500, "CORRUPT", f"stored graph is not JSON: {exc}")

    def save_graph(self, graph_id: str, body: dict):
        path = self._graph_path(graph_id)
        text = json.dumps(body, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        try:
            parse_graph(text)
        except ParseError as exc:
            raise ApiError(400, "PARSE_ERROR", str(exc), path=exc.path or "")
        path.write_text(text, encoding="utf-8")
        return {"saved": graph_id}

    def list_profiles(self):
        profiles = []
        seen = set()
        for directory in self.profile_dirs:
            for path in sorted(Path(directory).glob("*.ragp")):
                if path.stem in seen:
                    continue
                seen.add(path.stem)
                profiles.append({"name": path.stem, "builtin": False})
        for name in builtin_names():
            if name not in seen:
                profile = load_builtin(name)
                profiles.append({"name": name, "title": profile.title, "builtin": True})
        return sorted(profiles, key=lambda p: p["name"])

    def evaluate(self, body: dict) -> bytes:
        graph, profile = self._load_graph_and_profile(body)
        overlay = self._overlay(body)
        try:
            evaluation = evaluate_graph(graph, profile, overlay)
        except GraphInvalidError as exc:
            raise ApiError(422, "INVALID_GRAPH", exc.report.render())
        except RiskGraphError as exc:
            raise ApiError(400, "EVALUATION_ERROR", str(exc))
        return emit_report(evaluation, graph, profile, "json").encode("utf-8")

    def whatif(self, body: dict) -> dict:
        graph, profile = self._load_graph_and_profile(body)
        overlay_doc = body.get("overlay")
        token, overlay_doc = self.sessions.update(body.get("session"), overlay_doc)
        overlay = Overlay.from_dict(overlay_doc)
        try:
            result = what_if(graph, profile, overlay)
        except GraphInvalidError as exc:
            raise ApiError(422, "INVALID_GRAPH", exc.report.render())
        except RiskGraphError as exc:
            raise ApiError(400, "EVALUATION_ERROR", str(exc))
        doc = result.to_dict(include_baseline=bool(body.get("baseline")))
        doc["session"] = token
        return doc


def make_handler(service: RiskGraphService):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, *args):  # quiet by default
            pass

        def _send(self, status: int, payload: bytes, content_type: str):
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(payload)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(payload)

        def _send_json(self, status: int, doc) -> None:
            payload = json.dumps(doc, indent=2, sort_keys=True,
                                 ensure_ascii=False).encode("utf-8") + b"\n"
            self._send(status, payload, "application/json")

        def _send_error(self, exc: ApiError) -> None:
            self._send_json(exc.status, {"code": exc.code, "message": str(exc),
                                         "path": exc.path})

        def _read_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length > _MAX_BODY:
                raise ApiError(413, "TOO_LARGE", "request body too large")
            raw = self.rfile.read(length) if length else b""
            if not raw:
                raise ApiError(400, "BAD_REQUEST", "empty request body")
            try:
                doc = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise ApiError(400, "BAD_REQUEST", f"malformed JSON body: {exc}")
            if not isinstance(doc, dict):
                raise ApiError(400, "BAD_REQUEST", "body must be a JSON object")
            return doc

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            try:
                path = self.path.split("?", 1)[0]
                if path == "/api/v1/graphs":
                    self._send_json(200, service.list_graphs())
                elif path.startswith("/api/v1/graphs/"):
                    self._send_json(200, service.get_graph(path.rsplit("/", 1)[1]))
                elif path == "/api/v1/profiles":
                    self._send_json(200, service.list_profiles())
                elif path.startswith("/api/"):
                    raise ApiError(404, "NOT_FOUND", f"no such endpoint {path}")
                else:
                    self._serve_static(path)
            except ApiError as exc:
                self._send_error(exc)

        def do_POST(self):
            try:
                path = self.path.split("?", 1)[0]
                body = self._read_body()
                if path == "/api/v1/evaluate":
                    self._send(200, service.evaluate(body), "application/json")
                elif path == "/api/v1/whatif":
                    self._send_json(200, service.whatif(body))
                elif path.startswith("/api/v1/graphs/"):
                    self._send_json(200, service.save_graph(path.rsplit("/", 1)[1], body))
                else:
                    raise ApiError(404, "NOT_FOUND", f"no such endpoint {path}")
            except ApiError as exc:
                self._send_error(exc)

        def _serve_static(self, path: str) -> None:
            if service.ui_dir is None:
                raise ApiError(404, "NOT_FOUND", "no UI bundle configured")
            relative = path.lstrip("/") or "index.html"
            candidate = (service.ui_dir / relative).resolve()
            root = service.ui_dir.resolve()
            if not str(candidate).startswith(str(root)) or not candidate.is_file():
                raise ApiError(404, "NOT_FOUND", f"no such file {path}")
            content_type = _CONTENT_TYPES.get(candidate.suffix, "application/octet-stream")
            self._send(200, candidate.read_bytes(), content_type)

    return Handler


def create_server(port: int, graph_dir: str, ui_dir: str | None,
                  profile_dirs: list[str],
                  session_timeout: float = 3600.0) -> ThreadingHTTPServer:
    service = RiskGraphService(graph_dir, ui_dir, profile_dirs, session_timeout)
    return ThreadingHTTPServer(("127.0.0.1", port), make_handler(service))


def serve(port: int, graph_dir: str, ui_dir: str | None,
          profile_dirs: list[str], session_timeout: float) -> int:
    if ui_dir is None:
        default = Path("frontend") / "dist"
        ui_dir = str(default) if default.is_dir() else None
    server = create_server(port, graph_dir, ui_dir, profile_dirs, session_timeout)
    host, bound_port = server.server_address[:2]
    print(f"riskgraph service on http://{host}:{bound_port}/ "
          f"(graphs: {graph_dir}, ui: {ui_dir or 'none'})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0
