# tests/conftest.py
"""Shared pytest fixtures and configuration"""
import pytest
import sys
from pathlib import Path

# Add the src directory to Python path
project_root = Path(__file__).parent.parent
src_path = project_root / "src"
sys.path.insert(0, str(src_path))

from tinyserve.config import Concurrency, FidelityMode, ServerConfig  # noqa: E402
from tinyserve.server import TinyServer, sample_page_bytes  # noqa: E402

GOLDEN_DIR = Path(__file__).parent / "data" / "golden"


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests"""
    import tempfile
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir).resolve()


@pytest.fixture
def fixture_page():
    """Bytes of the bundled sample index.html"""
    return sample_page_bytes()


@pytest.fixture
def doc_root(temp_dir, fixture_page):
    """Document root holding index.html and a secret file beside it"""
    root = temp_dir / "www"
    root.mkdir()
    (root / "index.html").write_bytes(fixture_page)
    (temp_dir / "secret.txt").write_text("outside the root\n")
    return root


@pytest.fixture
def golden_dir():
    return GOLDEN_DIR


def make_config(root: Path, **overrides) -> ServerConfig:
    settings = {
        "host": "127.0.0.1",
        "port": 0,
        "root": root,
        "read_timeout": 2.0,
    }
    settings.update(overrides)
    return ServerConfig(**settings)


@pytest.fixture
def start_server(doc_root):
    """Factory starting a background server; every server is shut down afterwards"""
    servers = []

    def _start(mode=FidelityMode.strict, concurrency=Concurrency.sequential, root=None, **overrides):
        config = make_config(root or doc_root, mode=mode, concurrency=concurrency, **overrides)
        server = TinyServer(config)
        server.start_background()
        servers.append(server)
        return server

    yield _start

    for server in servers:
        server.shutdown()


@pytest.fixture
def strict_server(start_server):
    return start_server(FidelityMode.strict)


@pytest.fixture
def paper_server(start_server):
    return start_server(FidelityMode.paper)
