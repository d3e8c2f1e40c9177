"""tinyserve: a static-file HTTP/1.0 server with a paper-faithful and a strict mode."""
from .config import Concurrency, FidelityMode, ServerConfig
from .server import TinyServer

__all__ = ["Concurrency", "FidelityMode", "ServerConfig", "TinyServer"]
__version__ = "1.0.0"
