"""Deterministic in-process inference endpoint for tests.

Speaks the same wire shape as the real endpoint: POST /api/generate with a
JSON body, JSON response with the generated text under "response". Behavior
is a callable of (prompt, call_index) returning the verdict dict to serve;
every request is recorded so tests can assert exact call counts.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any, Callable

Behavior = Callable[[str, int], dict[str, Any] | str]


def _default_behavior(prompt: str, call_index: int) -> dict[str, Any]:
    return {"valid": True, "confidence": 0.9, "reasoning": "stub default"}


class StubLlmServer:
    """Context-managed HTTP stub; ``url`` is the endpoint base."""

    def __init__(self, behavior: Behavior | None = None):
        self.behavior = behavior or _default_behavior
        self.calls: list[str] = []
        self._lock = threading.Lock()
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                prompt = str(body.get("prompt", ""))
                with stub._lock:
                    index = len(stub.calls)
                    stub.calls.append(prompt)
                if self.path != "/api/generate":
                    self.send_response(404)
                    self.end_headers()
                    return
                result = stub.behavior(prompt, index)
                text = result if isinstance(result, str) else json.dumps(result)
                payload = json.dumps({"model": body.get("model", ""), "response": text, "done": True})
                data = payload.encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    @property
    def call_count(self) -> int:
        with self._lock:
            return len(self.calls)

    def __enter__(self) -> "StubLlmServer":
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)
        return False
