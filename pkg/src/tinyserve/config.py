"""
Module to define global constants and the server configuration
for the tinyserve static file server.

Settings come from (highest first): explicit keyword arguments (the CLI),
``TINYSERVE_*`` environment variables, a ``.env`` file, then defaults.
"""

from enum import Enum
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


# Wire version written on every status line
HTTP_VERSION = "HTTP/1.0"

# Value of the Server header
SERVER_NAME = "Simple HTTP Server"

# File served when the target is "/"
DEFAULT_DOCUMENT = "index.html"

DEFAULT_HOST = "0.0.0.0"
DEFAULT_PORT = 8080

# Per-connection limits
DEFAULT_READ_TIMEOUT = 5.0
DEFAULT_MAX_REQUEST_LINE = 8192
DEFAULT_MAX_HEADER_BYTES = 65536

# Same default queue length as a listener created without an explicit count
DEFAULT_BACKLOG = 50

BANNER_LINES = (
    "The HTTP Server is running..",
    "Stop server using Ctrl + C",
)


class FidelityMode(str, Enum):
    paper = "paper"
    strict = "strict"


class Concurrency(str, Enum):
    sequential = "sequential"
    per_connection = "per-connection"


class ServerConfig(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="TINYSERVE_",
        env_file=".env",
        extra="ignore",
        frozen=True,
    )

    host: str = DEFAULT_HOST
    port: int = Field(default=DEFAULT_PORT, ge=0, le=65535)
    root: Path = Field(default_factory=Path.cwd)
    mode: FidelityMode = FidelityMode.strict
    concurrency: Concurrency = Concurrency.sequential
    read_timeout: float = Field(default=DEFAULT_READ_TIMEOUT, gt=0)
    max_request_line: int = Field(default=DEFAULT_MAX_REQUEST_LINE, gt=0)
    max_header_bytes: int = Field(default=DEFAULT_MAX_HEADER_BYTES, gt=0)
    backlog: int = Field(default=DEFAULT_BACKLOG, gt=0)
    verbose: bool = False
    # write the bundled index.html into the root at startup when missing
    sample_page: bool = False

    @field_validator("root")
    @classmethod
    def _absolute_root(cls, value: Path) -> Path:
        # Existence is checked at startup, see server.ensure_root
        return value.expanduser().resolve()
