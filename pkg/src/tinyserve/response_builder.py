"""
Build the 200 / 404 responses (plus the strict-mode 400 and 501 pages)
and write responses to a connection.

File bodies go out in reads of at most 1024 bytes, each written as soon
as it is read.
"""
from __future__ import annotations

import logging
from typing import BinaryIO

from .config import HTTP_VERSION, SERVER_NAME, FidelityMode
from .errors import BrokenConnection, TruncatedBody
from .protocol import (
    REASON_PHRASES,
    BodyKind,
    BodySource,
    HttpResponse,
    serialize_head,
)
from .resource_resolver import (
    DEFAULT_MIME_TABLE,
    MimeTable,
    ResolvedResource,
    content_type_for,
)

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1024

HTML_TYPE = "text/html"


def _page(title: str, heading: str) -> bytes:
    return (
        "<HTML>"
        f"<HEAD><TITLE>{title}</TITLE></HEAD>"
        f"<BODY><center><h1>{heading}</h1></center></BODY>"
        "</HTML>"
    ).encode("latin-1", errors="replace")


def _html_response(status_code: int, body: bytes) -> HttpResponse:
    return HttpResponse(
        status_code,
        REASON_PHRASES[status_code],
        (
            ("Server", SERVER_NAME),
            ("Content-type", HTML_TYPE),
            ("Content-Length", str(len(body))),
        ),
        BodySource.from_bytes(body),
    )


def not_found_body(file_name: str) -> bytes:
    return _page("404 Not Found", f"404: The file {file_name} is not found")


def build_not_found(file_name: str, mode: FidelityMode) -> HttpResponse:
    # Paper mode keeps the original quirk: a 404 page sent with "200 OK"
    status_code = 200 if mode is FidelityMode.paper else 404
    return _html_response(status_code, not_found_body(file_name))


def build_bad_request() -> HttpResponse:
    return _html_response(400, _page("400 Bad Request", "400: Bad Request"))


def build_not_implemented(method: str) -> HttpResponse:
    return _html_response(
        501, _page("501 Not Implemented", f"501: Method {method} not implemented")
    )


def build_ok(
    resource: ResolvedResource,
    mode: FidelityMode,
    table: MimeTable = DEFAULT_MIME_TABLE,
) -> HttpResponse:
    """200 response streaming the resolved file.

    If the file can no longer be opened the 404 response is returned instead.
    """
    if not resource.is_hit:
        raise ValueError(f"build_ok needs a hit, got {resource.outcome.value}")

    try:
        body = BodySource.open_file(resource.canonical_path)
    except OSError as exc:
        logger.warning("File %s vanished before it could be opened: %s", resource.canonical_path, exc)
        return build_not_found(resource.requested_name, mode)

    if body.length != resource.length_bytes:
        logger.debug(
            "Size of %s changed from %d to %d since resolve",
            resource.canonical_path, resource.length_bytes, body.length,
        )

    return HttpResponse(
        200,
        REASON_PHRASES[200],
        (
            ("Server", SERVER_NAME),
            ("Content-type", content_type_for(resource.requested_name, mode, table)),
            ("Content-Length", str(body.length)),
        ),
        body,
    )


def _write(sink: BinaryIO, data: bytes, written: int) -> None:
    try:
        sink.write(data)
    except OSError as exc:
        raise BrokenConnection(f"client went away: {exc}", written) from exc


def stream_body(source: BodySource, sink: BinaryIO) -> int:
    """Write the body to ``sink``; returns the number of bytes written.

    Never writes more than ``source.length`` bytes.
    """
    if source.kind is BodyKind.bytes:
        if source.data:
            _write(sink, source.data, 0)
        return len(source.data)

    written = 0
    remaining = source.length
    while remaining > 0:
        try:
            chunk = source.handle.read(min(CHUNK_SIZE, remaining))
        except OSError as exc:
            raise TruncatedBody(f"read failed on {source.path}: {exc}", written) from exc
        if not chunk:
            raise TruncatedBody(
                f"{source.path} ended after {written} of {source.length} bytes", written
            )
        _write(sink, chunk, written)
        written += len(chunk)
        remaining -= len(chunk)
    return written


def emit_response(response: HttpResponse, sink: BinaryIO, version: str = HTTP_VERSION) -> int:
    """Write head then body and flush; returns the total byte count."""
    head = serialize_head(response, version)
    _write(sink, head, 0)
    try:
        body_bytes = stream_body(response.body, sink)
    except BrokenConnection as exc:
        raise BrokenConnection(str(exc), len(head) + exc.bytes_written) from exc
    except TruncatedBody as exc:
        raise TruncatedBody(str(exc), len(head) + exc.bytes_written) from exc

    total = len(head) + body_bytes
    try:
        sink.flush()
    except OSError as exc:
        raise BrokenConnection(f"client went away: {exc}", total) from exc
    return total
