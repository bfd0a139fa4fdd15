"""Client for external scorer processes speaking a newline-delimited JSON protocol.

Wire format, one UTF-8 JSON object per line, no pretty-printing:

    client hello:     {"v":1,"hello":true}
    server handshake: {"v":1,"capabilities":["sentiment","emotion"],"model":"..."}
    request:          {"id":N,"task":"sentiment"|"emotion","text":"..."}
    response:         {"id":N,"valence":x} | {"id":N,"scores":{...}} | {"id":N,"error":"..."}

The primary transport spawns the scorer as a subprocess and talks over its
stdin/stdout. The alternative HTTP transport POSTs each of the same message
objects to the endpoint's /score route and reads one message object back.
Responses may arrive out of order; score_batch reassembles them in request
order and never drops or duplicates a request.
"""

from __future__ import annotations

import json
import os
import selectors
import shlex
import subprocess
import time
import urllib.error
import urllib.request
from dataclasses import dataclass

from .errors import (
    ConnectionDroppedError,
    HandshakeTimeoutError,
    ProtocolError,
    ScorerError,
    ScorerLaunchError,
    ScorerTimeoutError,
    VersionMismatchError,
)

PROTOCOL_VERSION = 1
TASKS = ("sentiment", "emotion")
EMOTION_LABELS = ("sadness", "joy", "love", "anger", "fear", "surprise")

HANDSHAKE_TIMEOUT = 10.0
REQUEST_TIMEOUT = 30.0
BATCH_SIZE = 32

HELLO_LINE = b'{"v":1,"hello":true}\n'


@dataclass(frozen=True)
class ScoreRequest:
    id: int
    task: str
    text: str

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if not self.text:
            raise ValueError("request text must be non-empty")


@dataclass(frozen=True)
class ScoreResponse:
    id: int
    valence: float | None = None
    scores: dict[str, float] | None = None
    error: str | None = None

    def __post_init__(self) -> None:
        payloads = sum(x is not None for x in (self.valence, self.scores, self.error))
        if payloads != 1:
            raise ValueError("response must carry exactly one of valence/scores/error")


@dataclass(frozen=True)
class Handshake:
    protocol_version: int
    capabilities: tuple[str, ...]
    model_name: str


def serialize_request(request: ScoreRequest) -> bytes:
    payload = {"id": request.id, "task": request.task, "text": request.text}
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":")).encode("utf-8") + b"\n"


def parse_response(line: bytes | str) -> ScoreResponse:
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    try:
        payload = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ProtocolError(f"unparseable response line: {exc}") from None
    if not isinstance(payload, dict) or not isinstance(payload.get("id"), int):
        raise ProtocolError(f"response without integer id: {line.strip()!r}")
    rid = payload["id"]
    if "error" in payload:
        return ScoreResponse(id=rid, error=str(payload["error"]))
    if "valence" in payload:
        valence = payload["valence"]
        if not isinstance(valence, (int, float)) or not 0.0 <= float(valence) <= 1.0:
            raise ProtocolError(f"valence outside [0, 1] in response {rid}: {valence!r}")
        return ScoreResponse(id=rid, valence=float(valence))
    if "scores" in payload:
        scores = payload["scores"]
        if not isinstance(scores, dict):
            raise ProtocolError(f"scores payload is not an object in response {rid}")
        for label in EMOTION_LABELS:
            if label not in scores:
                raise ProtocolError(f"response {rid} missing emotion label {label!r}")
        return ScoreResponse(
            id=rid, scores={label: float(scores[label]) for label in EMOTION_LABELS}
        )
    raise ProtocolError(f"response {rid} carries no valence, scores, or error")


def parse_handshake(line: bytes | str) -> Handshake:
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    try:
        payload = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ProtocolError(f"unparseable handshake line: {exc}") from None
    if not isinstance(payload, dict):
        raise ProtocolError("handshake is not a JSON object")
    version = payload.get("v")
    if version != PROTOCOL_VERSION:
        raise VersionMismatchError(version)
    capabilities = payload.get("capabilities")
    if not isinstance(capabilities, list) or not capabilities:
        raise ProtocolError("handshake must advertise a non-empty capability list")
    unknown = [c for c in capabilities if c not in TASKS]
    if unknown:
        raise ProtocolError(f"handshake advertises unknown capabilities: {unknown}")
    return Handshake(
        protocol_version=version,
        capabilities=tuple(capabilities),
        model_name=str(payload.get("model", "")),
    )


class _SubprocessTransport:
    """Line framing over a spawned process's stdin/stdout with read timeouts."""

    def __init__(self, command: str | list[str]):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
            )
        except OSError as exc:
            raise ScorerLaunchError(f"cannot launch scorer {argv!r}: {exc}") from None
        self._buffer = bytearray()
        self._selector = selectors.DefaultSelector()
        self._selector.register(self._proc.stdout, selectors.EVENT_READ)
        self._eof = False

    def send_line(self, line: bytes) -> None:
        try:
            self._proc.stdin.write(line)
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError):
            raise ConnectionDroppedError(None) from None

    def recv_line(self, timeout: float) -> bytes | None:
        """One line without the newline; None on timeout, b'' on EOF."""
        deadline = time.monotonic() + timeout
        while True:
            newline = self._buffer.find(b"\n")
            if newline >= 0:
                line = bytes(self._buffer[:newline])
                del self._buffer[: newline + 1]
                return line
            if self._eof:
                return b""
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return None
            if not self._selector.select(timeout=remaining):
                continue
            chunk = os.read(self._proc.stdout.fileno(), 65536)
            if chunk:
                self._buffer.extend(chunk)
            else:
                self._eof = True

    def close(self) -> None:
        self._selector.close()
        for stream in (self._proc.stdin, self._proc.stdout):
            try:
                stream.close()
            except OSError:
                pass
        self._proc.terminate()
        try:
            self._proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self._proc.kill()
            self._proc.wait()


class _HttpTransport:
    """POSTs each protocol message to <endpoint>/score; one message per call.

    Replies are inherently in request order, so out-of-order handling in
    score_batch is a no-op for this transport.
    """

    def __init__(self, endpoint: str):
        if not endpoint.startswith(("http://", "https://")):
            endpoint = "http://" + endpoint
        self._url = endpoint.rstrip("/") + "/score"
        self._pending: list[bytes] = []

    def send_line(self, line: bytes) -> None:
        self._pending.append(line)

    def recv_line(self, timeout: float) -> bytes | None:
        if not self._pending:
            raise ProtocolError("http transport has no pending request to read")
        body = self._pending.pop(0)
        request = urllib.request.Request(
            self._url, data=body, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(request, timeout=timeout) as reply:
                return reply.read().rstrip(b"\n")
        except urllib.error.URLError as exc:
            if isinstance(getattr(exc, "reason", None), TimeoutError):
                return None
            raise ScorerLaunchError(f"cannot reach scorer endpoint {self._url}: {exc}") from None
        except TimeoutError:
            return None

    def close(self) -> None:
        self._pending.clear()


class ScorerHandle:
    """One connection to one external scorer; not safe for concurrent callers."""

    def __init__(self, transport, handshake: Handshake, endpoint: str):
        self._transport = transport
        self.handshake = handshake
        self.endpoint = endpoint
        self._next_id = 0
        self._closed = False

    @property
    def capabilities(self) -> tuple[str, ...]:
        return self.handshake.capabilities

    @property
    def model_name(self) -> str:
        return self.handshake.model_name

    def make_request(self, task: str, text: str) -> ScoreRequest:
        request = ScoreRequest(id=self._next_id, task=task, text=text)
        self._next_id += 1
        return request

    def close(self) -> None:
        if not self._closed:
            self._transport.close()
            self._closed = True

    def __enter__(self) -> "ScorerHandle":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def _looks_like_http(endpoint: str) -> bool:
    if endpoint.startswith(("http://", "https://")):
        return True
    host, sep, port = endpoint.rpartition(":")
    return bool(sep) and port.isdigit() and host != "" and " " not in endpoint


def open_scorer(endpoint: str | list[str], timeout: float = HANDSHAKE_TIMEOUT) -> ScorerHandle:
    """Connect to a scorer (subprocess command line or host:port) and handshake.

    Distinct failures: launch/unreachable, handshake timeout, and protocol
    version mismatch each raise their own error type.
    """
    if isinstance(endpoint, str) and _looks_like_http(endpoint):
        transport = _HttpTransport(endpoint)
        label = endpoint
    else:
        transport = _SubprocessTransport(endpoint)
        label = endpoint if isinstance(endpoint, str) else " ".join(endpoint)
    try:
        transport.send_line(HELLO_LINE)
        line = transport.recv_line(timeout)
        if line is None:
            raise HandshakeTimeoutError(f"no handshake from {label} within {timeout:g}s")
        if line == b"":
            raise ScorerLaunchError(f"scorer {label} exited before the handshake")
        handshake = parse_handshake(line)
    except ScorerError:
        transport.close()
        raise
    except ConnectionDroppedError:
        transport.close()
        raise ScorerLaunchError(f"scorer {label} closed the connection during handshake") from None
    return ScorerHandle(transport, handshake, label)


def score_batch(
    handle: ScorerHandle,
    requests: list[ScoreRequest],
    timeout: float = REQUEST_TIMEOUT,
    batch_size: int = BATCH_SIZE,
) -> list[ScoreResponse]:
    """Send requests, collect one response each, return them in request order.

    Out-of-order replies are reassembled by id. Requests whose task is not
    advertised never hit the wire; they come back as per-item errors, as do
    server-side per-item errors. A dropped connection or a silent scorer is
    fatal and reports the last acknowledged id.
    """
    ids = [r.id for r in requests]
    if len(set(ids)) != len(ids):
        raise ValueError("request ids must be unique within a batch")
    by_id: dict[int, ScoreResponse] = {}
    sendable = []
    for request in requests:
        if request.task not in handle.capabilities:
            by_id[request.id] = ScoreResponse(
                id=request.id, error=f"unsupported task {request.task!r}"
            )
        else:
            sendable.append(request)

    last_acked: int | None = None
    pending: set[int] = set()
    cursor = 0
    while cursor < len(sendable) or pending:
        while cursor < len(sendable) and len(pending) < batch_size:
            request = sendable[cursor]
            handle._transport.send_line(serialize_request(request))
            pending.add(request.id)
            cursor += 1
        if not pending:
            break
        line = handle._transport.recv_line(timeout)
        if line is None:
            raise ScorerTimeoutError(last_acked, timeout)
        if line == b"":
            raise ConnectionDroppedError(last_acked)
        response = parse_response(line)
        if response.id not in pending:
            if response.id in by_id:
                raise ProtocolError(f"duplicate response for id {response.id}")
            raise ProtocolError(f"response for unknown id {response.id}")
        pending.discard(response.id)
        by_id[response.id] = response
        last_acked = response.id
    return [by_id[request.id] for request in requests]


class BridgeScorer:
    """Adapter giving external scorers the same surface as lexicon scorers."""

    granularity = "sentence"

    def __init__(self, handle: ScorerHandle, timeout: float = REQUEST_TIMEOUT):
        self.handle = handle
        self.timeout = timeout
        self.identity = f"external:{handle.model_name or handle.endpoint}"

    def _score(self, task: str, texts: list[str]):
        requests = [self.handle.make_request(task, text) for text in texts]
        responses = score_batch(self.handle, requests, timeout=self.timeout)
        for response in responses:
            if response.error is not None:
                raise ScorerError(f"scorer error: {response.error}")
        return responses

    def score_sentiment(self, text: str) -> float:
        return self.score_sentiment_batch([text])[0]

    def score_sentiment_batch(self, texts: list[str]) -> list[float]:
        return [r.valence for r in self._score("sentiment", texts)]

    def score_emotions(self, text: str) -> dict[str, float]:
        return self._score("emotion", [text])[0].scores

    def close(self) -> None:
        self.handle.close()
