"""Wire protocol for remote sentence scorers, client and reference server.

One JSON object per line, UTF-8, over a TCP socket or a child process's
stdin/stdout.  Requests carry strictly increasing ids per connection:

    {"id": 1, "op": "score", "table": "name[Aromi]", "candidates": ["..."]}
    {"id": 1, "log_probs": [-12.3, ...]}
    {"id": 2, "op": "generate", "table": "...", "max_len": 40}
    {"id": 2, "text": "..."}
    {"id": 3, "error": "message"}

The client matches responses to requests by id, so several batches may
be in flight at once (bounded by ``max_in_flight``).
"""

from __future__ import annotations

import json
import math
import shlex
import socket
import socketserver
import subprocess
import sys
import threading

from .errors import RemoteUnavailable
from .tabular import Table, detokenize, linearize, parse_mr, tokenize

_LOG_PROB_FLOOR = -1e30


class _TcpTransport:
    def __init__(self, host: str, port: int, timeout: float):
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._reader = self._sock.makefile("r", encoding="utf-8", newline="\n")
        self._wlock = threading.Lock()

    def send_line(self, line: str) -> None:
        with self._wlock:
            self._sock.sendall((line + "\n").encode("utf-8"))

    def recv_line(self) -> str | None:
        line = self._reader.readline()
        return line.rstrip("\n") if line else None

    def close(self) -> None:
        # shutdown() forces EOF into a readline blocked in another
        # thread; closing the file first would deadlock on its lock.
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self._sock.close()
        except OSError:
            pass


class _StdioTransport:
    def __init__(self, command: str):
        self._proc = subprocess.Popen(
            shlex.split(command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            encoding="utf-8",
            bufsize=1,
        )
        self._wlock = threading.Lock()

    def send_line(self, line: str) -> None:
        with self._wlock:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()

    def recv_line(self) -> str | None:
        line = self._proc.stdout.readline()
        return line.rstrip("\n") if line else None

    def close(self) -> None:
        try:
            self._proc.stdin.close()
        except OSError:
            pass
        self._proc.terminate()
        self._proc.wait(timeout=5)


def _open_transport(endpoint: str, timeout: float):
    if endpoint.startswith("stdio:"):
        return _StdioTransport(endpoint[len("stdio:"):])
    host, sep, port = endpoint.rpartition(":")
    if not sep or not port.isdigit():
        raise RemoteUnavailable(f"bad endpoint {endpoint!r}; want host:port or stdio:cmd")
    try:
        return _TcpTransport(host or "127.0.0.1", int(port), timeout)
    except OSError as exc:
        raise RemoteUnavailable(f"cannot connect to {endpoint}: {exc}") from None


class RemoteScorer:
    """Protocol client for a remote P(sentence | table) scorer.

    Thread safe: requests may be issued from several threads; responses
    are matched back by id.  Connection failures are retried a bounded
    number of times before RemoteUnavailable is raised.
    """

    def __init__(self, endpoint: str, timeout: float = 10.0,
                 batch_size: int = 64, retries: int = 2,
                 max_in_flight: int = 8):
        self.endpoint = endpoint
        self.timeout = timeout
        self.batch_size = max(1, batch_size)
        self.retries = retries
        self._transport = None
        self._lock = threading.Lock()
        self._cond = threading.Condition(self._lock)
        self._responses: dict[int, dict] = {}
        self._next_id = 1
        self._dead: str | None = None
        self._reader: threading.Thread | None = None
        self._slots = threading.BoundedSemaphore(max(1, max_in_flight))

    # -- connection management -------------------------------------------

    def _ensure_connected(self):
        if self._transport is None:
            self._transport = _open_transport(self.endpoint, self.timeout)
            self._dead = None
            self._next_id = 1
            self._responses.clear()
            self._reader = threading.Thread(target=self._read_loop,
                                            args=(self._transport,), daemon=True)
            self._reader.start()

    def _read_loop(self, transport):
        while True:
            try:
                line = transport.recv_line()
            except (OSError, ValueError) as exc:
                line = None
                reason = str(exc) or "connection closed"
            else:
                reason = "connection closed"
            with self._cond:
                if line is None:
                    if self._transport is transport:
                        self._dead = reason
                        self._cond.notify_all()
                    return
                try:
                    msg = json.loads(line)
                except json.JSONDecodeError:
                    self._dead = f"unparsable response line: {line!r}"
                    self._cond.notify_all()
                    return
                self._responses[msg.get("id")] = msg
                self._cond.notify_all()

    def _drop_connection(self):
        transport, self._transport = self._transport, None
        if transport is not None:
            transport.close()

    def close(self):
        with self._lock:
            self._drop_connection()

    # -- request plumbing --------------------------------------------------

    def _roundtrip(self, payload: dict) -> dict:
        last_error = "no attempt made"
        for _ in range(self.retries + 1):
            with self._cond:
                try:
                    self._ensure_connected()
                except RemoteUnavailable as exc:
                    last_error = str(exc)
                    continue
                req_id = self._next_id
                self._next_id += 1
                transport = self._transport
            request = dict(payload, id=req_id)
            try:
                transport.send_line(json.dumps(request, ensure_ascii=False))
            except OSError as exc:
                with self._cond:
                    last_error = f"send failed: {exc}"
                    self._drop_connection()
                continue
            with self._cond:
                ok = self._cond.wait_for(
                    lambda: req_id in self._responses or self._dead is not None,
                    timeout=self.timeout)
                if req_id in self._responses:
                    response = self._responses.pop(req_id)
                    if "error" in response:
                        raise RemoteUnavailable(
                            f"remote error: {response['error']}")
                    return response
                last_error = self._dead if self._dead else "timed out"
                self._drop_connection()
        raise RemoteUnavailable(
            f"scorer at {self.endpoint} unavailable after "
            f"{self.retries + 1} attempt(s): {last_error}")

    def _request(self, payload: dict) -> dict:
        with self._slots:
            return self._roundtrip(payload)

    # -- scorer interface ---------------------------------------------------

    def score_texts(self, table_text: str, candidates: list[str]) -> list[float]:
        scores: list[float] = []
        for start in range(0, len(candidates), self.batch_size):
            chunk = candidates[start:start + self.batch_size]
            response = self._request(
                {"op": "score", "table": table_text, "candidates": chunk})
            values = response.get("log_probs")
            if not isinstance(values, list) or len(values) != len(chunk):
                raise RemoteUnavailable(
                    f"malformed score response from {self.endpoint}")
            for v in values:
                v = float(v)
                scores.append(v if math.isfinite(v) else _LOG_PROB_FLOOR)
        return scores

    def score_batch(self, table: Table, sentences) -> list[float]:
        return self.score_texts(linearize(table),
                                [detokenize(s) for s in sentences])

    def log_prob(self, table: Table, sentence) -> float:
        return self.score_batch(table, [sentence])[0]

    def generate(self, table: Table, max_len: int = 40):
        response = self._request(
            {"op": "generate", "table": linearize(table), "max_len": max_len})
        text = response.get("text")
        if not isinstance(text, str):
            raise RemoteUnavailable(
                f"malformed generate response from {self.endpoint}")
        return tokenize(text)


# ---------------------------------------------------------------------------
# Reference server for the builtin model


def handle_request_line(model, line: str) -> str:
    """One protocol exchange against a local model; never raises."""
    from . import lm

    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        return json.dumps({"id": -1, "error": f"bad json: {exc}"},
                          ensure_ascii=False)
    if not isinstance(msg, dict):
        return json.dumps({"id": -1, "error": "request must be a json object"},
                          ensure_ascii=False)
    req_id = msg.get("id", -1)
    try:
        op = msg.get("op")
        table = parse_mr(msg["table"])
        if op == "score":
            scorer = lm.LocalScorer(model)
            log_probs = [scorer.log_prob(table, tokenize(c))
                         for c in msg["candidates"]]
            return json.dumps({"id": req_id, "log_probs": log_probs},
                              ensure_ascii=False)
        if op == "generate":
            out = lm.decode(model, table, max_len=int(msg.get("max_len", 40)))
            return json.dumps({"id": req_id, "text": detokenize(out)},
                              ensure_ascii=False)
        return json.dumps({"id": req_id, "error": f"unknown op: {op!r}"},
                          ensure_ascii=False)
    except Exception as exc:  # per-request isolation
        return json.dumps({"id": req_id, "error": str(exc)}, ensure_ascii=False)


def serve_stdio(model, stdin=None, stdout=None) -> None:
    """Answer protocol requests on stdin until EOF."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for line in stdin:
        line = line.rstrip("\n")
        if not line:
            continue
        stdout.write(handle_request_line(model, line) + "\n")
        stdout.flush()


class ModelServer(socketserver.ThreadingTCPServer):
    """TCP server exposing a fitted model; mainly for tests and demos."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, model, host: str = "127.0.0.1", port: int = 0):
        self.model = model
        super().__init__((host, port), _ModelHandler)

    @property
    def endpoint(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


class _ModelHandler(socketserver.StreamRequestHandler):
    def handle(self):
        for raw in self.rfile:
            line = raw.decode("utf-8").rstrip("\n")
            if not line:
                continue
            reply = handle_request_line(self.server.model, line)
            self.wfile.write((reply + "\n").encode("utf-8"))
            self.wfile.flush()
