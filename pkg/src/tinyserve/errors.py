"""Exception hierarchy for tinyserve.

Every error carries a short ``tag``; the server records it on the
``ConnectionOutcome`` of the connection that raised it.
"""
from __future__ import annotations

from typing import Optional


class TinyServeError(Exception):
    tag = "error"


class ContractViolation(TinyServeError, ValueError):
    """A caller broke a documented precondition."""

    tag = "contract-violation"


# ── request side ───────────────────────────────────────────────────


class RequestError(TinyServeError):
    tag = "request-error"


class EmptyRequest(RequestError):
    """The peer closed the connection before sending a single byte."""

    tag = "empty-request"


class RequestLineTooLong(RequestError):
    tag = "request-line-too-long"

    def __init__(self, limit: int):
        super().__init__(f"request line exceeds {limit} bytes")
        self.limit = limit


class RequestTimeout(RequestError):
    tag = "timeout"


class MalformedRequestLine(RequestError):
    tag = "malformed-request-line"

    def __init__(self, line: str, reason: str = "fewer than two tokens"):
        super().__init__(f"malformed request line {line!r}: {reason}")
        self.line = line


# ── response side ──────────────────────────────────────────────────


class ResponseError(TinyServeError):
    """Writing a response failed part way; ``bytes_written`` is what went out."""

    tag = "response-error"

    def __init__(self, message: str, bytes_written: int):
        super().__init__(message)
        self.bytes_written = bytes_written


class BrokenConnection(ResponseError):
    tag = "broken-connection"


class TruncatedBody(ResponseError):
    tag = "truncated-body"


# ── server lifecycle ───────────────────────────────────────────────


class BindError(TinyServeError):
    tag = "bind-error"

    def __init__(self, port: int, reason: str, hint: Optional[str] = None):
        message = f"cannot bind port {port}: {reason}"
        if hint:
            message = f"{message} ({hint})"
        super().__init__(message)
        self.port = port
        self.hint = hint


class RootError(TinyServeError):
    tag = "root-error"


# ── testkit ────────────────────────────────────────────────────────


class TestkitError(TinyServeError):
    __test__ = False
    tag = "testkit-error"


class ConnectError(TestkitError):
    tag = "connect-error"


class EmptyCapture(TestkitError):
    tag = "empty-capture"
