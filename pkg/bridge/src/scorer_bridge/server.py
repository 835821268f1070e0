"""The request loop: newline-delimited JSON over stdio or TCP.

One response line per request line, ids echoed back, never reordered
(the loop is single-threaded per connection).  A broken request yields
an error response, never a dead connection; a line that is not even
JSON is answered with id -1.
"""

from __future__ import annotations

import json
import math
import socketserver
import sys
import threading
from dataclasses import dataclass

_LOG_PROB_FLOOR = -1e30


@dataclass(frozen=True)
class BridgeConfig:
    model: str = "stub"
    device: str = "cpu"
    max_batch: int = 32
    deterministic: bool = True
    transport: str = "stdio"  # "stdio" or "tcp:PORT"


def _error(req_id, message: str) -> str:
    return json.dumps({"id": req_id, "error": message}, ensure_ascii=False)


def _finite(value: float) -> float:
    return value if math.isfinite(value) else _LOG_PROB_FLOOR


def handle_line(backend, line: str) -> str:
    """One protocol exchange; always returns a response line."""
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        return _error(-1, f"bad json: {exc}")
    if not isinstance(msg, dict):
        return _error(-1, "request must be a json object")
    req_id = msg.get("id", -1)
    op = msg.get("op")
    try:
        if op == "score":
            table = msg["table"]
            candidates = msg["candidates"]
            if not isinstance(table, str) or not isinstance(candidates, list) \
                    or not all(isinstance(c, str) for c in candidates):
                return _error(req_id, "score needs a table string and a "
                                      "list of candidate strings")
            scores = [_finite(float(s)) for s in backend.score(table, candidates)]
            if len(scores) != len(candidates):
                return _error(req_id, "backend returned a mis-sized batch")
            return json.dumps({"id": req_id, "log_probs": scores},
                              ensure_ascii=False)
        if op == "generate":
            table = msg["table"]
            max_len = int(msg.get("max_len", 40))
            if not isinstance(table, str) or max_len < 1:
                return _error(req_id, "generate needs a table string and a "
                                      "positive max_len")
            return json.dumps({"id": req_id, "text": backend.generate(table, max_len)},
                              ensure_ascii=False)
        return _error(req_id, f"unknown op: {op!r}")
    except KeyError as exc:
        return _error(req_id, f"missing field: {exc}")
    except Exception as exc:  # keep the connection alive
        return _error(req_id, f"{type(exc).__name__}: {exc}")


def serve_stdio(backend, stdin=None, stdout=None) -> None:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for raw in stdin:
        line = raw.rstrip("\n")
        if not line:
            continue
        stdout.write(handle_line(backend, line) + "\n")
        stdout.flush()


class BridgeServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, backend, host: str = "127.0.0.1", port: int = 0):
        self.backend = backend
        super().__init__((host, port), _Handler)

    @property
    def endpoint(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        for raw in self.rfile:
            line = raw.decode("utf-8").rstrip("\n")
            if not line:
                continue
            reply = handle_line(self.server.backend, line)
            self.wfile.write((reply + "\n").encode("utf-8"))
            self.wfile.flush()


def serve(backend, config: BridgeConfig) -> None:
    """Run until terminated (stdio: EOF; tcp: interrupt)."""
    if config.transport == "stdio":
        serve_stdio(backend)
        return
    if config.transport.startswith("tcp:"):
        port = int(config.transport[len("tcp:"):])
        server = BridgeServer(backend, port=port)
        print(f"serving {backend.name} on {server.endpoint}", file=sys.stderr)
        server.serve_forever()
        return
    raise ValueError(f"unknown transport {config.transport!r}")
