"""
Listener, accept loop and per-connection driver.

One connection goes through read → parse → resolve → respond → close.
In sequential mode the next accept waits for the previous connection to
finish; in per-connection mode every connection gets its own thread.
Handlers share only the frozen ServerConfig.
"""
from __future__ import annotations

import errno
import logging
import os
import socket
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Optional, Tuple

from .config import DEFAULT_DOCUMENT, HTTP_VERSION, Concurrency, FidelityMode, ServerConfig
from .errors import (
    BindError,
    EmptyRequest,
    MalformedRequestLine,
    RequestError,
    RequestLineTooLong,
    ResponseError,
    RootError,
)
from .log import get_access_logger
from .protocol import HttpResponse
from .request_parser import drain_headers, parse_request_line, read_request_line
from .resource_resolver import (
    DEFAULT_MIME_TABLE,
    Outcome,
    resolve_within_root,
    target_to_relative,
)
from .response_builder import (
    build_bad_request,
    build_not_found,
    build_not_implemented,
    build_ok,
    emit_response,
)

logger = logging.getLogger(__name__)

# How often an idle accept loop checks the stop signal
ACCEPT_POLL_INTERVAL = 0.05

# Listener errors after which accepting cannot continue
_FATAL_ACCEPT_ERRNOS = {errno.EBADF, errno.EINVAL, errno.ENOTSOCK}

# Upper bound on reads when discarding unread request bytes at close
_DISCARD_READS = 16

_LOG_SAFE = frozenset(range(0x20, 0x7F)) - {ord('"'), ord("\\")}


def _log_escape(text: str) -> str:
    """Quote, backslash and anything outside printable ASCII become escapes."""
    out = []
    for ch in text:
        code = ord(ch)
        if code in _LOG_SAFE:
            out.append(ch)
        elif ch in "\"\\":
            out.append("\\" + ch)
        elif code <= 0xFF:
            out.append(f"\\x{code:02x}")
        else:
            out.append(f"\\u{code:04x}")
    return "".join(out)


@dataclass
class ConnectionOutcome:
    peer: str
    request_line: Optional[str] = None
    status_sent: Optional[int] = None
    bytes_sent: int = 0
    error: Optional[str] = None
    finished_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    def format_log_line(self) -> str:
        status = str(self.status_sent) if self.status_sent is not None else "-"
        request_line = _log_escape(self.request_line) if self.request_line is not None else "-"
        timestamp = self.finished_at.isoformat(timespec="milliseconds")
        return f'{timestamp} {self.peer} "{request_line}" {status} {self.bytes_sent}'


def ensure_root(config: ServerConfig) -> Path:
    if not config.root.is_dir():
        raise RootError(f"document root {config.root} does not exist or is not a directory")
    return config.root


def sample_page_bytes() -> bytes:
    return resources.files("tinyserve").joinpath("data").joinpath(DEFAULT_DOCUMENT).read_bytes()


def write_sample_page(root: Path) -> Optional[Path]:
    """Copy the bundled sample page to ``root/index.html`` unless one exists."""
    target = Path(root) / DEFAULT_DOCUMENT
    if target.exists():
        return None
    target.write_bytes(sample_page_bytes())
    return target


def bind(config: ServerConfig) -> Tuple[socket.socket, int]:
    """Listening socket for ``config``, plus the port actually bound."""
    listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        if os.name == "posix":
            listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((config.host, config.port))
        listener.listen(config.backlog)
    except OSError as exc:
        listener.close()
        hint = None
        if exc.errno in (errno.EACCES, errno.EPERM):
            hint = "ports below 1024 usually need elevated privileges"
        elif exc.errno == errno.EADDRINUSE:
            hint = "another process is already listening on this port"
        raise BindError(config.port, exc.strerror or str(exc), hint) from exc

    port = listener.getsockname()[1]
    logger.info("Listening on %s:%d", config.host, port)
    return listener, port


def _peer_text(address) -> str:
    if isinstance(address, tuple) and len(address) >= 2:
        return f"{address[0]}:{address[1]}"
    return str(address)


def _close_connection(conn: socket.socket, *streams) -> None:
    for stream in streams:
        try:
            stream.close()
        except OSError:
            pass
    try:
        conn.shutdown(socket.SHUT_WR)
    except OSError:
        pass
    _discard_pending(conn)
    conn.close()


def _discard_pending(conn: socket.socket) -> None:
    """Read away bytes the peer already sent, so close() does not reset the reply."""
    try:
        conn.setblocking(False)
        for _ in range(_DISCARD_READS):
            if not conn.recv(65536):
                break
    except OSError:
        pass


def _drain_before_reply(reader, config: ServerConfig, peer: str) -> None:
    try:
        drain_headers(reader, config.mode, config.max_header_bytes)
    except RequestError as exc:
        logger.debug("Headers from %s not drained before 400: %s", peer, exc)


def _respond(response: HttpResponse, writer, outcome: ConnectionOutcome) -> None:
    with response:
        try:
            outcome.bytes_sent = emit_response(response, writer, HTTP_VERSION)
        except ResponseError as exc:
            logger.warning("Response to %s cut short: %s", outcome.peer, exc)
            outcome.bytes_sent = exc.bytes_written
            outcome.error = exc.tag
        if outcome.bytes_sent > 0:
            outcome.status_sent = response.status_code


def handle_connection(
    conn: socket.socket,
    config: ServerConfig,
    peer: Optional[str] = None,
) -> ConnectionOutcome:
    """Serve exactly one request on ``conn`` and close it. Never raises."""
    if peer is None:
        try:
            peer = _peer_text(conn.getpeername())
        except OSError:
            peer = "-"
    outcome = ConnectionOutcome(peer=peer)
    strict = config.mode is FidelityMode.strict

    reader = conn.makefile("rb")
    writer = conn.makefile("wb")
    try:
        try:
            line = read_request_line(reader, config.max_request_line)
            outcome.request_line = line.text
            request = parse_request_line(line)
        except RequestLineTooLong as exc:
            # the rest of the line may never end; reply without reading further
            outcome.error = exc.tag
            if strict:
                _respond(build_bad_request(), writer, outcome)
            return outcome
        except MalformedRequestLine as exc:
            outcome.error = exc.tag
            if strict:
                _drain_before_reply(reader, config, peer)
                _respond(build_bad_request(), writer, outcome)
            return outcome
        except EmptyRequest as exc:
            outcome.error = exc.tag
            return outcome

        drain_headers(reader, config.mode, config.max_header_bytes)

        if request.method != "GET":
            outcome.error = "method-not-implemented"
            if strict:
                _respond(build_not_implemented(request.method), writer, outcome)
            return outcome

        relative = target_to_relative(request.target)
        resource = resolve_within_root(config.root, relative)
        if resource.outcome is Outcome.hit:
            response = build_ok(resource, config.mode, DEFAULT_MIME_TABLE)
        else:
            # forbidden is reported exactly like a miss
            response = build_not_found(resource.requested_name, config.mode)
        _respond(response, writer, outcome)
        return outcome

    except RequestError as exc:
        outcome.error = exc.tag
        return outcome
    except Exception:
        logger.exception("Unhandled error while serving %s", peer)
        outcome.error = "internal-error"
        return outcome
    finally:
        _close_connection(conn, writer, reader)
        outcome.finished_at = datetime.now(timezone.utc)
        get_access_logger().info(outcome.format_log_line())


def _serve_one(conn: socket.socket, address, config: ServerConfig) -> None:
    try:
        conn.settimeout(config.read_timeout)
    except OSError:
        conn.close()
        return
    handle_connection(conn, config, _peer_text(address))


def serve_forever(
    listener: socket.socket,
    config: ServerConfig,
    stop_signal: threading.Event,
) -> None:
    """Accept and serve until ``stop_signal`` is set, then close the listener.

    Per-connection workers still running at that point get up to
    ``read_timeout`` to finish.
    """
    listener.settimeout(ACCEPT_POLL_INTERVAL)
    workers: set[threading.Thread] = set()
    try:
        while not stop_signal.is_set():
            try:
                conn, address = listener.accept()
            except socket.timeout:
                continue
            except OSError as exc:
                if stop_signal.is_set():
                    break
                if exc.errno in _FATAL_ACCEPT_ERRNOS:
                    logger.error("Listener failed: %s", exc)
                    raise
                logger.warning("accept() failed: %s", exc)
                time.sleep(ACCEPT_POLL_INTERVAL)
                continue

            if config.concurrency is Concurrency.sequential:
                _serve_one(conn, address, config)
                continue

            worker = threading.Thread(
                target=_serve_one,
                args=(conn, address, config),
                name=f"tinyserve-{_peer_text(address)}",
                daemon=True,
            )
            worker.start()
            workers.add(worker)
            workers = {w for w in workers if w.is_alive()}
    finally:
        listener.close()
        deadline = time.monotonic() + config.read_timeout
        for worker in workers:
            worker.join(max(0.0, deadline - time.monotonic()))
            if worker.is_alive():
                logger.warning("Connection worker %s still running at shutdown", worker.name)


class TinyServer:
    """A bound server with a stop signal.

    ``start()`` binds, ``serve_forever()`` blocks, ``start_background()``
    runs the loop on a thread; ``shutdown()`` stops either and is idempotent.
    """

    def __init__(self, config: ServerConfig):
        self.config = config
        self.stop_signal = threading.Event()
        self.port: Optional[int] = None
        self._listener: Optional[socket.socket] = None
        self._thread: Optional[threading.Thread] = None
        self._lock = threading.Lock()
        self._closed = False

    @property
    def address(self) -> Tuple[str, int]:
        host = self.config.host
        if host in ("", "0.0.0.0"):
            host = "127.0.0.1"
        return host, self.port

    def start(self) -> int:
        ensure_root(self.config)
        self._listener, self.port = bind(self.config)
        return self.port

    def serve_forever(self) -> None:
        if self._listener is None:
            self.start()
        serve_forever(self._listener, self.config, self.stop_signal)

    def start_background(self) -> threading.Thread:
        if self._listener is None:
            self.start()
        self._thread = threading.Thread(target=self.serve_forever, name="tinyserve-acceptor", daemon=True)
        self._thread.start()
        return self._thread

    def shutdown(self) -> None:
        with self._lock:
            if self._closed:
                return
            self._closed = True
        self.stop_signal.set()
        thread = self._thread
        if thread is not None and thread is not threading.current_thread():
            # loop poll + read_timeout for in-flight connections
            thread.join(self.config.read_timeout + 1.0)
        if self._listener is not None:
            self._listener.close()

    def __enter__(self) -> "TinyServer":
        return self

    def __exit__(self, *exc_info) -> None:
        self.shutdown()


def shutdown(handle: TinyServer) -> None:
    handle.shutdown()
