"""
Read and tokenize the request line of an incoming connection.

The line is read once, trimmed and split on runs of whitespace; only the
first two tokens are required. Bytes are decoded as latin-1 so non-ASCII
input passes through unchanged.
"""
from __future__ import annotations

import logging
import re
import socket
from dataclasses import dataclass
from typing import BinaryIO

from .config import DEFAULT_MAX_HEADER_BYTES, DEFAULT_MAX_REQUEST_LINE, FidelityMode
from .errors import (
    EmptyRequest,
    MalformedRequestLine,
    RequestLineTooLong,
    RequestTimeout,
)
from .protocol import TOKEN_DELIMITERS, HttpRequest

logger = logging.getLogger(__name__)

_DELIMITERS = re.compile("[" + re.escape(TOKEN_DELIMITERS) + "]+")


@dataclass(frozen=True)
class RawRequestLine:
    text: str
    byte_count: int


def _readline(conn: BinaryIO, limit: int) -> bytes:
    try:
        return conn.readline(limit)
    except (socket.timeout, TimeoutError) as exc:
        raise RequestTimeout("timed out waiting for request data") from exc


def read_request_line(conn: BinaryIO, max_len: int = DEFAULT_MAX_REQUEST_LINE) -> RawRequestLine:
    """Consume the first line of ``conn`` and return it stripped and trimmed.

    The line ends at the first LF; a CR right before it is dropped. A
    line that hits end of stream without an LF is returned as-is.
    """
    if max_len <= 0:
        raise ValueError("max_len must be positive")

    # Room for the longest allowed line plus CRLF
    raw = _readline(conn, max_len + 2)
    if not raw:
        raise EmptyRequest("connection closed before any request data")

    content = raw
    if content.endswith(b"\n"):
        content = content[:-1]
        if content.endswith(b"\r"):
            content = content[:-1]
    elif len(raw) > max_len:
        raise RequestLineTooLong(max_len)

    if len(content) > max_len:
        raise RequestLineTooLong(max_len)

    text = content.decode("latin-1").strip(TOKEN_DELIMITERS)
    if "\r" in text or "\n" in text:
        raise MalformedRequestLine(text, "bare CR inside request line")

    return RawRequestLine(text=text, byte_count=len(raw))


def tokenize(text: str) -> list[str]:
    return [token for token in _DELIMITERS.split(text) if token]


def parse_request_line(line: RawRequestLine) -> HttpRequest:
    tokens = tokenize(line.text)
    if len(tokens) < 2:
        raise MalformedRequestLine(line.text)

    method, target = tokens[0], tokens[1]
    version = tokens[2] if len(tokens) > 2 else None
    if len(tokens) > 3:
        logger.debug("Ignoring %d extra request-line tokens", len(tokens) - 3)
    return HttpRequest(method=method, target=target, version=version)


def drain_headers(
    conn: BinaryIO,
    mode: FidelityMode,
    max_bytes: int = DEFAULT_MAX_HEADER_BYTES,
) -> int:
    """Discard header lines up to and including the blank line.

    Paper mode reads nothing. Strict mode stops at the blank line, at end
    of stream, or once ``max_bytes`` have been consumed.
    """
    if mode is FidelityMode.paper:
        return 0

    drained = 0
    while drained < max_bytes:
        line = _readline(conn, max_bytes - drained)
        if not line:
            break
        drained += len(line)
        if line in (b"\r\n", b"\n"):
            break
    else:
        logger.debug("Header drain stopped at the %d byte limit", max_bytes)
    return drained
