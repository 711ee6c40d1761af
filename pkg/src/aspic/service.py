"""JSON session service: named sessions over newline-delimited TCP and
WebSocket, with optional static assets for the web console.

Requests are {"id", "session", "command"} where command is a shell line;
"create" and "destroy" are the two session-management verbs handled here
rather than by the shell. Responses echo the id, carry "status" ok|error,
and on ok mirror the shell's structured result (query outcomes under
"verdict"/"sat"/"models"/"consolidated", informational text under
"message") plus a small "state-digest". Everything runs on one event loop,
so commands within a session apply strictly in arrival order.
"""

from __future__ import annotations

import asyncio
import json
from http import HTTPStatus
from pathlib import Path
from typing import Optional, Sequence

from .shell import CommandResult, Session


class SessionManager:
    def __init__(self, preload: Sequence[str] = ()) -> None:
        self._sessions: dict[str, Session] = {}
        self._preload = tuple(preload)

    def create(self, name: str) -> Session:
        if name in self._sessions:
            raise KeyError(f"session {name!r} already exists")
        session = Session()
        for path in self._preload:
            session.execute_line(f"load {path}")
        self._sessions[name] = session
        return session

    def destroy(self, name: str) -> None:
        if name not in self._sessions:
            raise KeyError(f"unknown session {name!r}")
        del self._sessions[name]

    def get(self, name: str) -> Optional[Session]:
        return self._sessions.get(name)

    def handle_request(self, request) -> dict:
        """One request to one response; never raises."""
        if not isinstance(request, dict):
            return {"id": None, "status": "error", "message": "request must be an object"}
        rid = request.get("id")
        try:
            command = request.get("command")
            name = request.get("session")
            if not isinstance(command, str) or not command.strip():
                return self._err(rid, "missing command")
            if not isinstance(name, str) or not name:
                return self._err(rid, "missing session")
            verb = command.strip()
            if verb == "create":
                self.create(name)
                return self._ok(rid, self._sessions[name], message=f"session {name!r} created")
            if verb == "destroy":
                self.destroy(name)
                return {"id": rid, "status": "ok", "message": f"session {name!r} destroyed"}
            session = self._sessions.get(name)
            if session is None:
                return self._err(rid, f"unknown session {name!r} (create it first)")
            result = session.execute_line(command)
            if not result.ok:
                return self._err(rid, result.error or "command failed", session)
            return self._ok(rid, session, result=result)
        except KeyError as exc:
            return self._err(rid, str(exc.args[0]) if exc.args else str(exc))
        except Exception as exc:  # the server must answer, whatever broke
            return self._err(rid, f"internal error: {exc}")

    @staticmethod
    def _err(rid, message: str, session: Optional[Session] = None) -> dict:
        response = {"id": rid, "status": "error", "message": message}
        if session is not None:
            response["state-digest"] = session.digest()
        return response

    @staticmethod
    def _ok(
        rid,
        session: Session,
        result: Optional[CommandResult] = None,
        message: Optional[str] = None,
    ) -> dict:
        response: dict = {"id": rid, "status": "ok"}
        response["warnings"] = list(result.warnings) if result else []
        if result is not None:
            if result.message is not None:
                response["message"] = result.message
            if result.verdict is not None:
                response["verdict"] = result.verdict
            if result.sat is not None:
                response["sat"] = result.sat
            if result.models is not None:
                response["models"] = [list(m) for m in result.models]
            if result.consolidated is not None:
                response["consolidated"] = list(result.consolidated)
            if result.pending:
                response["pending"] = True
        elif message is not None:
            response["message"] = message
        response["state-digest"] = session.digest()
        return response


def _encode(response: dict) -> str:
    return json.dumps(response, sort_keys=True)


def _decode_and_handle(manager: SessionManager, raw) -> dict:
    try:
        request = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError):
        return {"id": None, "status": "error", "message": "invalid JSON"}
    return manager.handle_request(request)


async def _serve_tcp(manager: SessionManager, host: str, port: int):
    async def handle(reader, writer):
        try:
            while True:
                line = await reader.readline()
                if not line:
                    break
                if not line.strip():
                    continue
                response = _decode_and_handle(manager, line)
                writer.write((_encode(response) + "\n").encode())
                await writer.drain()
        except ConnectionError:
            pass
        finally:
            writer.close()

    return await asyncio.start_server(handle, host, port)


_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
}

_PLACEHOLDER = """<!doctype html>
<title>aspic</title>
<p>aspic session service. No web console assets configured; connect over
WebSocket or NDJSON TCP instead.</p>
"""


def _static_responder(assets_dir: Optional[str]):
    from websockets.datastructures import Headers
    from websockets.http11 import Response

    root = Path(assets_dir).resolve() if assets_dir else None

    def page(status: HTTPStatus, body: bytes, content_type: str) -> Response:
        headers = Headers(
            [("Content-Type", content_type), ("Content-Length", str(len(body)))]
        )
        return Response(status.value, status.phrase, headers, body)

    def process_request(connection, request):
        if request.headers.get("Upgrade", "").lower() == "websocket":
            return None  # proceed with the handshake
        path = request.path.split("?", 1)[0]
        if path == "/":
            path = "/index.html"
        if root is not None:
            target = (root / path.lstrip("/")).resolve()
            inside = target == root or root in target.parents
            if inside and target.is_file():
                content = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
                return page(HTTPStatus.OK, target.read_bytes(), content)
        if path == "/index.html":
            return page(HTTPStatus.OK, _PLACEHOLDER.encode(), "text/html; charset=utf-8")
        return page(HTTPStatus.NOT_FOUND, b"not found\n", "text/plain; charset=utf-8")

    return process_request


async def _serve(host: str, port: int, tcp_port: int, assets_dir: Optional[str],
                 preload: Sequence[str] = ()):
    from websockets.asyncio.server import serve as ws_serve

    manager = SessionManager(preload)

    async def ws_handler(connection):
        async for raw in connection:
            response = _decode_and_handle(manager, raw)
            await connection.send(_encode(response))

    tcp_server = await _serve_tcp(manager, host, tcp_port)
    async with ws_serve(
        ws_handler, host, port, process_request=_static_responder(assets_dir)
    ):
        print(
            f"aspic service: http/ws on {host}:{port}, ndjson tcp on {host}:{tcp_port}",
            flush=True,
        )
        async with tcp_server:
            await tcp_server.serve_forever()


def run_server(
    host: str,
    port: int,
    tcp_port: Optional[int] = None,
    assets_dir: Optional[str] = None,
    preload: Sequence[str] = (),
) -> None:
    if tcp_port is None:
        tcp_port = port + 1
    try:
        asyncio.run(_serve(host, port, tcp_port, assets_dir, preload))
    except KeyboardInterrupt:
        pass
