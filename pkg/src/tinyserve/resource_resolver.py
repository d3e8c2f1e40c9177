"""
Map a request target to a file under the document root.

Every lookup goes through the traversal jail: the joined path is
canonicalized (symlinks included) and must stay under the canonical
root, in both fidelity modes.
"""
from __future__ import annotations

import logging
import os
import stat
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Optional

from .config import DEFAULT_DOCUMENT, FidelityMode

logger = logging.getLogger(__name__)

DEFAULT_MEDIA_TYPE = "application/octet-stream"

MIME_TYPES = {
    "html": "text/html",
    "htm": "text/html",
    "js": "text/javascript",
    "css": "text/css",
    "txt": "text/plain",
    "png": "image/png",
    "jpg": "image/jpeg",
    "jpeg": "image/jpeg",
    "gif": "image/gif",
    "ico": "image/x-icon",
    "json": "application/json",
}


class Outcome(str, Enum):
    hit = "hit"
    miss = "miss"
    forbidden = "forbidden"


@dataclass(frozen=True)
class ResolvedResource:
    outcome: Outcome
    requested_name: str
    canonical_path: Optional[Path] = None
    length_bytes: Optional[int] = None

    @property
    def is_hit(self) -> bool:
        return self.outcome is Outcome.hit


def _valid_media_type(media_type: str) -> bool:
    return bool(media_type) and media_type.isascii() and media_type.count("/") == 1


@dataclass(frozen=True)
class MimeTable:
    entries: Mapping[str, str] = field(default_factory=lambda: dict(MIME_TYPES))
    default_type: str = DEFAULT_MEDIA_TYPE

    def __post_init__(self):
        entries = {ext.lower().lstrip("."): media for ext, media in self.entries.items()}
        for ext, media in [*entries.items(), ("<default>", self.default_type)]:
            if not _valid_media_type(media):
                raise ValueError(f"invalid media type for {ext}: {media!r}")
        object.__setattr__(self, "entries", MappingProxyType(entries))

    def lookup(self, relative: str) -> str:
        name = relative.rsplit("/", 1)[-1]
        if "." not in name:
            return self.default_type
        extension = name.rsplit(".", 1)[1].lower()
        return self.entries.get(extension, self.default_type)


DEFAULT_MIME_TABLE = MimeTable()


def target_to_relative(target: str) -> str:
    """Strip one leading "/"; an empty result means the default document."""
    relative = target[1:] if target.startswith("/") else target
    return relative or DEFAULT_DOCUMENT


def _filesystem_name(relative: str) -> str:
    # Request text is latin-1, one char per wire byte; look those bytes up unchanged
    try:
        return os.fsdecode(relative.encode("latin-1"))
    except (UnicodeEncodeError, UnicodeDecodeError):
        return relative


def resolve_within_root(root: Path, relative: str) -> ResolvedResource:
    """Resolve ``relative`` under ``root``.

    ``relative`` is request text decoded as latin-1; the file looked up is
    the one whose name has the same bytes as the request.

    Outside the canonical root → forbidden. Missing, not a regular file,
    or unreadable metadata → miss (I/O failures are logged). Otherwise a
    hit carrying the file's size.
    """
    requested_name = relative.lstrip("/")
    canonical_root = Path(root).resolve(strict=True)

    try:
        candidate = (canonical_root / _filesystem_name(relative)).resolve()
    except (OSError, RuntimeError, ValueError) as exc:
        logger.warning("Cannot canonicalize %r under %s: %s", relative, canonical_root, exc)
        return ResolvedResource(Outcome.miss, requested_name)

    if not candidate.is_relative_to(canonical_root):
        logger.warning("Forbidden target %r resolves outside the root", relative)
        return ResolvedResource(Outcome.forbidden, requested_name)

    try:
        info = os.stat(candidate)
    except (FileNotFoundError, NotADirectoryError):
        return ResolvedResource(Outcome.miss, requested_name)
    except (OSError, ValueError) as exc:
        logger.warning("Cannot stat %s: %s", candidate, exc)
        return ResolvedResource(Outcome.miss, requested_name)

    if not stat.S_ISREG(info.st_mode):
        return ResolvedResource(Outcome.miss, requested_name)

    return ResolvedResource(
        Outcome.hit,
        requested_name,
        canonical_path=candidate,
        length_bytes=info.st_size,
    )


def content_type_for(
    relative: str,
    mode: FidelityMode,
    table: MimeTable = DEFAULT_MIME_TABLE,
) -> str:
    if mode is FidelityMode.paper:
        return "text/html"
    return table.lookup(relative)
