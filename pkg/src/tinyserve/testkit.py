"""
Raw-TCP client and instrumentation for checking the server's wire output.

The client reads until the server closes (HTTP/1.0 framing) and never
trusts Content-Length, so the header's correctness can be asserted.
"""
from __future__ import annotations

import socket
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .errors import ConnectError, EmptyCapture

Header = Tuple[str, str]

RECV_SIZE = 65536


def _find_separator(raw: bytes) -> Optional[Tuple[int, int]]:
    """(head_end, body_start) of the first blank line, CRLF or bare LF."""
    candidates = []
    for separator in (b"\r\n\r\n", b"\n\n", b"\r\n\n", b"\n\r\n"):
        index = raw.find(separator)
        if index != -1:
            candidates.append((index, index + len(separator)))
    return min(candidates) if candidates else None


def _split(raw: bytes) -> Tuple[Optional[str], Optional[int], List[Header], bytes]:
    if not raw.startswith(b"HTTP/"):
        return None, None, [], raw
    bounds = _find_separator(raw)
    if bounds is None:
        return None, None, [], raw

    head_end, body_start = bounds
    lines = [line.rstrip("\r") for line in raw[:head_end].decode("latin-1").split("\n")]
    status_line = lines[0]

    tokens = status_line.split()
    status = int(tokens[1]) if len(tokens) > 1 and tokens[1].isdigit() else None

    headers: List[Header] = []
    for line in lines[1:]:
        if ":" not in line:
            continue
        name, value = line.split(":", 1)
        headers.append((name.strip(), value.strip()))
    return status_line, status, headers, raw[body_start:]


def split_response(raw: bytes) -> Tuple[Optional[int], List[Header], bytes]:
    """Leniently split a captured response into (status, headers, body).

    Without a recognisable head the status is None and the whole input is
    the body.
    """
    _, status, headers, body = _split(raw)
    return status, headers, body


@dataclass
class CapturedResponse:
    raw: bytes
    status_line: Optional[str] = None
    status: Optional[int] = None
    headers: List[Header] = field(default_factory=list)
    body: bytes = b""

    @classmethod
    def from_raw(cls, raw: bytes) -> "CapturedResponse":
        status_line, status, headers, body = _split(raw)
        return cls(raw=raw, status_line=status_line, status=status, headers=headers, body=body)

    def header(self, name: str) -> Optional[str]:
        wanted = name.lower()
        for key, value in self.headers:
            if key.lower() == wanted:
                return value
        return None


def raw_request(
    address: Tuple[str, int],
    request_bytes: bytes,
    read_timeout: float = 5.0,
) -> CapturedResponse:
    """Send ``request_bytes`` on a fresh connection and capture everything until close.

    Stops at ``read_timeout`` overall; a timeout with nothing received
    raises EmptyCapture.
    """
    deadline = time.monotonic() + read_timeout
    try:
        sock = socket.create_connection(address, timeout=read_timeout)
    except OSError as exc:
        raise ConnectError(f"cannot connect to {address[0]}:{address[1]}: {exc}") from exc

    chunks: List[bytes] = []
    with sock:
        try:
            sock.sendall(request_bytes)
        except OSError:
            # the server may close before reading everything; keep whatever it sent
            pass

        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                break
            sock.settimeout(remaining)
            try:
                data = sock.recv(RECV_SIZE)
            except socket.timeout:
                break
            except OSError:
                break
            if not data:
                break
            chunks.append(data)

    raw = b"".join(chunks)
    if not raw and time.monotonic() >= deadline:
        raise EmptyCapture(f"nothing received from {address[0]}:{address[1]} in {read_timeout}s")
    return CapturedResponse.from_raw(raw)


class InstrumentedSink:
    """Writable byte stream that records every write.

    ``fail_after`` makes writes raise BrokenPipeError once that many bytes
    have been accepted, to imitate a client that disconnects.
    """

    def __init__(self, fail_after: Optional[int] = None):
        self.writes: List[bytes] = []
        self.flushes = 0
        self.closed = False
        self._total = 0
        self._fail_after = fail_after

    def write(self, data) -> int:
        data = bytes(data)
        if self._fail_after is not None and self._total + len(data) > self._fail_after:
            raise BrokenPipeError("instrumented sink closed")
        self.writes.append(data)
        self._total += len(data)
        return len(data)

    def flush(self) -> None:
        self.flushes += 1

    def close(self) -> None:
        self.closed = True

    @property
    def sizes(self) -> List[int]:
        return [len(chunk) for chunk in self.writes]

    @property
    def payload(self) -> bytes:
        return b"".join(self.writes)


def instrumented_sink(fail_after: Optional[int] = None) -> InstrumentedSink:
    return InstrumentedSink(fail_after)
