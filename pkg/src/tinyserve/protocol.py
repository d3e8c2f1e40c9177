"""
Value types for requests and responses, and byte-exact serialization
of the response head.

Header names are stored exactly as built ("Content-type" keeps its
lowercase t) and compared case-insensitively.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import BinaryIO, Optional, Tuple

from .config import HTTP_VERSION
from .errors import ContractViolation

CRLF = b"\r\n"

REASON_PHRASES = {
    200: "OK",
    400: "Bad Request",
    404: "Not Found",
    501: "Not Implemented",
}

Header = Tuple[str, str]

# Token delimiters of the request line: space, tab, LF, CR, form feed.
# Vertical tab is not one of them.
TOKEN_DELIMITERS = " \t\n\r\f"


def _has_whitespace(text: str) -> bool:
    return any(ch in TOKEN_DELIMITERS for ch in text)


def _has_control(text: str) -> bool:
    return any(ord(ch) < 0x20 or ord(ch) == 0x7F for ch in text)


@dataclass(frozen=True)
class HttpRequest:
    """Parsed request line. ``version`` is None when the client sent none."""
    method: str
    target: str
    version: Optional[str] = None

    def __post_init__(self):
        for name in ("method", "target"):
            value = getattr(self, name)
            if not value or _has_whitespace(value):
                raise ContractViolation(f"{name} must be a non-empty token, got {value!r}")
        if self.version is not None and (not self.version or _has_whitespace(self.version)):
            raise ContractViolation(f"version must be a token, got {self.version!r}")


class BodyKind(str, Enum):
    bytes = "bytes"
    file = "file"


@dataclass(frozen=True)
class BodySource:
    """Where a response body comes from: an in-memory buffer or an open file.

    For files the length is taken from the open handle, so it matches the
    on-disk size at open time.
    """
    kind: BodyKind
    data: bytes = b""
    path: Optional[Path] = None
    length: int = 0
    handle: Optional[BinaryIO] = field(default=None, compare=False, repr=False)

    @classmethod
    def from_bytes(cls, data: bytes) -> "BodySource":
        return cls(kind=BodyKind.bytes, data=bytes(data), length=len(data))

    @classmethod
    def open_file(cls, path: Path) -> "BodySource":
        """Open ``path`` for streaming. Raises OSError if it cannot be opened."""
        handle = open(path, "rb")
        try:
            length = os.fstat(handle.fileno()).st_size
        except OSError:
            handle.close()
            raise
        return cls(kind=BodyKind.file, path=Path(path), length=length, handle=handle)

    def close(self) -> None:
        if self.handle is not None:
            self.handle.close()


@dataclass(frozen=True)
class HttpResponse:
    status_code: int
    reason: str
    headers: Tuple[Header, ...] = ()
    body: BodySource = field(default_factory=lambda: BodySource.from_bytes(b""))

    def __post_init__(self):
        object.__setattr__(self, "headers", tuple((str(n), str(v)) for n, v in self.headers))
        if not 100 <= self.status_code <= 599:
            raise ContractViolation(f"status code out of range: {self.status_code}")

        seen = set()
        for name, value in self.headers:
            if not name or _has_control(name) or _has_control(value):
                raise ContractViolation(f"invalid header {name!r}: {value!r}")
            key = name.lower()
            if key in seen:
                raise ContractViolation(f"duplicate header: {name}")
            seen.add(key)

        content_length = self.header("Content-Length")
        if content_length is not None and content_length != str(self.body.length):
            raise ContractViolation(
                f"Content-Length {content_length} does not match body length {self.body.length}"
            )

    def header(self, name: str) -> Optional[str]:
        """Case-insensitive header lookup."""
        wanted = name.lower()
        for key, value in self.headers:
            if key.lower() == wanted:
                return value
        return None

    def with_header(self, name: str, value: str) -> "HttpResponse":
        """Copy of this response with ``name`` set, replacing any existing entry."""
        wanted = name.lower()
        headers = [(k, v) for k, v in self.headers if k.lower() != wanted]
        headers.append((name, value))
        return HttpResponse(self.status_code, self.reason, tuple(headers), self.body)

    def close(self) -> None:
        self.body.close()

    def __enter__(self) -> "HttpResponse":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def format_status_line(code: int, reason: str, version: str = HTTP_VERSION) -> str:
    if not isinstance(code, int) or not 100 <= code <= 599:
        raise ContractViolation(f"status code out of range: {code!r}")
    if _has_control(reason):
        raise ContractViolation(f"reason phrase contains control characters: {reason!r}")
    return f"{version} {code} {reason}".rstrip()


def serialize_head(response: HttpResponse, version: str = HTTP_VERSION) -> bytes:
    """Status line, one ``Name: value`` line per header, then a blank line; all CRLF."""
    lines = [format_status_line(response.status_code, response.reason, version)]
    lines.extend(f"{name}: {value}" for name, value in response.headers)
    head = CRLF.join(line.encode("latin-1") for line in lines)
    return head + CRLF + CRLF
