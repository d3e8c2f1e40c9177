"""
Command-line entry point.

Exit codes: 0 clean shutdown, 1 startup or runtime failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import logging
import signal
import sys
from typing import List, Optional

from pydantic import ValidationError

from .config import BANNER_LINES, Concurrency, FidelityMode, ServerConfig
from .errors import BindError, RootError
from .log import configure_logging
from .server import TinyServer, ensure_root, write_sample_page

logger = logging.getLogger(__name__)


def _port(value: str) -> int:
    try:
        port = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a port number: {value!r}")
    if not 0 <= port <= 65535:
        raise argparse.ArgumentTypeError(f"port out of range 0-65535: {port}")
    return port


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tinyserve",
        description="Static-file HTTP/1.0 server",
        allow_abbrev=False,
    )
    parser.add_argument("--port", type=_port, help="Port to listen on, 0 for an ephemeral port (default 8080)")
    parser.add_argument("--host", help="Address to bind (default 0.0.0.0)")
    parser.add_argument("--root", help="Document root (default: $TINYSERVE_ROOT or the current directory)")
    parser.add_argument("--mode", choices=[m.value for m in FidelityMode],
                        help="paper reproduces the original behaviour, strict corrects it (default strict)")
    parser.add_argument("--concurrency", choices=[c.value for c in Concurrency],
                        help="Serve one connection at a time or one thread per connection (default sequential)")
    parser.add_argument("--sample-page", action="store_true",
                        help="Write the bundled index.html into the root if it has none")
    parser.add_argument("--verbose", action="store_true", help="Debug logging on stderr")
    return parser


def parse_args(argv: Optional[List[str]] = None) -> ServerConfig:
    """Turn ``argv`` into a ServerConfig; usage errors exit with status 2."""
    parser = build_parser()
    args = parser.parse_args(argv)

    overrides = {
        name: value
        for name, value in (
            ("port", args.port),
            ("host", args.host),
            ("root", args.root),
            ("mode", args.mode),
            ("concurrency", args.concurrency),
        )
        if value is not None
    }
    if args.verbose:
        overrides["verbose"] = True
    if args.sample_page:
        overrides["sample_page"] = True

    try:
        config = ServerConfig(**overrides)
    except ValidationError as exc:
        parser.error(f"invalid configuration: {exc}")

    return config


def run(config: ServerConfig) -> int:
    """Print the banner, serve until interrupted, and return the exit code."""
    configure_logging(config.verbose)

    for line in BANNER_LINES:
        print(line, flush=True)

    try:
        root = ensure_root(config)
        if config.sample_page:
            written = write_sample_page(root)
            if written is not None:
                print(f"wrote sample page {written}", flush=True)
        server = TinyServer(config)
        port = server.start()
    except (RootError, BindError, OSError) as exc:
        print(f"tinyserve: {exc}", file=sys.stderr, flush=True)
        return 1

    def _request_stop(signum, frame):
        server.stop_signal.set()

    previous = {sig: signal.signal(sig, _request_stop) for sig in (signal.SIGINT, signal.SIGTERM)}
    print(f"listening on port {port}", flush=True)
    try:
        server.serve_forever()
    except OSError as exc:
        logger.error("Server stopped: %s", exc)
        print(f"tinyserve: {exc}", file=sys.stderr, flush=True)
        return 1
    finally:
        server.shutdown()
        for sig, handler in previous.items():
            signal.signal(sig, handler)

    return 0


def main(argv: Optional[List[str]] = None) -> int:
    config = parse_args(argv)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
