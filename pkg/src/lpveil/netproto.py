"""Customer/cloud wire protocol: length-prefixed JSON over TCP.

Every message is a 4-byte big-endian length followed by a UTF-8 JSON
body.  The server is stateless per request and accepts only disguised
problems: a request whose problem carries plaintext field names is
rejected with a 400 before anything is parsed further.
"""

from __future__ import annotations

import json
import socket
import socketserver
import struct
import threading

from .core import DEFAULT_TOL, EncryptedProblem, Tolerance
from .errors import ConnectionFailed, LpVeilError, ProtocolError, ServerError
from .solver import CloudResult, proof_gen

MAX_FRAME = 256 * 1024 * 1024
PLAINTEXT_KEYS = {"A", "B", "b", "c"}


def send_message(sock: socket.socket, obj: dict) -> None:
    body = json.dumps(obj, separators=(",", ":")).encode("utf-8")
    sock.sendall(struct.pack(">I", len(body)) + body)


def _recv_exact(sock: socket.socket, size: int) -> bytes:
    buf = bytearray()
    while len(buf) < size:
        chunk = sock.recv(size - len(buf))
        if not chunk:
            raise ProtocolError(f"connection closed after {len(buf)}/{size} bytes")
        buf.extend(chunk)
    return bytes(buf)


def recv_message(sock: socket.socket) -> dict:
    header = _recv_exact(sock, 4)
    (length,) = struct.unpack(">I", header)
    if length > MAX_FRAME:
        raise ProtocolError(f"frame length {length} exceeds limit")
    body = _recv_exact(sock, length)
    try:
        obj = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolError(f"malformed frame body: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProtocolError("frame body must be a JSON object")
    return obj


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        try:
            msg = recv_message(self.request)
        except ProtocolError:
            return  # nothing sensible to answer on a broken frame
        try:
            reply = self._process(msg)
        except LpVeilError as exc:
            reply = {"type": "error", "code": 500, "message": str(exc)}
        try:
            send_message(self.request, reply)
        except OSError:
            pass

    def _process(self, msg: dict) -> dict:
        if msg.get("type") != "solve" or "problem" not in msg:
            return {"type": "error", "code": 400, "message": "expected a solve request"}
        problem = msg["problem"]
        if not isinstance(problem, dict) or PLAINTEXT_KEYS & set(problem):
            return {"type": "error", "code": 400,
                    "message": "request must carry a disguised problem only"}
        try:
            e = EncryptedProblem.from_dict(problem)
        except LpVeilError as exc:
            return {"type": "error", "code": 400, "message": str(exc)}
        result = proof_gen(e, self.server.tol)
        return {"type": "result", "result": result.to_dict()}


class CloudServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, host: str = "127.0.0.1", port: int = 0,
                 tol: Tolerance = DEFAULT_TOL):
        super().__init__((host, port), _Handler)
        self.tol = tol

    @property
    def address(self) -> tuple[str, int]:
        return self.server_address[:2]

    def serve_in_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


def request_solve(addr: tuple[str, int], e: EncryptedProblem,
                  timeout: float = 600.0) -> CloudResult:
    """Send one disguised problem to a cloud server and await the result."""
    try:
        sock = socket.create_connection(addr, timeout=timeout)
    except OSError as exc:
        raise ConnectionFailed(f"cannot reach {addr[0]}:{addr[1]}: {exc}") from exc
    with sock:
        send_message(sock, {"type": "solve", "problem": e.to_dict()})
        reply = recv_message(sock)
    if reply.get("type") == "result" and "result" in reply:
        return CloudResult.from_dict(reply["result"])
    if reply.get("type") == "error":
        raise ServerError(int(reply.get("code", 500)), str(reply.get("message", "")))
    raise ProtocolError(f"unexpected reply type {reply.get('type')!r}")
