# test_config.py
"""Unit tests for config module"""
import pytest
from pathlib import Path
from pydantic import ValidationError

from tinyserve.config import (
    BANNER_LINES,
    DEFAULT_PORT,
    Concurrency,
    FidelityMode,
    ServerConfig,
)


class TestConfig:
    def test_defaults(self, monkeypatch, temp_dir):
        """Test the documented defaults"""
        monkeypatch.chdir(temp_dir)
        monkeypatch.delenv("TINYSERVE_ROOT", raising=False)
        config = ServerConfig()

        assert config.port == DEFAULT_PORT == 8080
        assert config.root == temp_dir
        assert config.mode is FidelityMode.strict
        assert config.concurrency is Concurrency.sequential
        assert config.read_timeout == 5.0
        assert config.max_request_line == 8192
        assert config.max_header_bytes == 65536
        assert config.backlog == 50

    def test_root_from_environment(self, monkeypatch, temp_dir):
        """Test that TINYSERVE_ROOT supplies the root"""
        monkeypatch.setenv("TINYSERVE_ROOT", str(temp_dir))
        assert ServerConfig().root == temp_dir

    def test_explicit_value_beats_environment(self, monkeypatch, temp_dir):
        """Test that keyword arguments override the environment"""
        monkeypatch.setenv("TINYSERVE_PORT", "9000")
        assert ServerConfig(port=1234, root=temp_dir).port == 1234

    def test_root_made_absolute(self, monkeypatch, temp_dir):
        """Test that a relative root is resolved"""
        monkeypatch.chdir(temp_dir)
        assert ServerConfig(root=Path("www")).root == temp_dir / "www"

    @pytest.mark.parametrize("field,value", [
        ("port", -1), ("port", 70000), ("read_timeout", 0),
        ("max_request_line", 0), ("mode", "papers"), ("concurrency", "pool"),
    ])
    def test_invalid_values(self, field, value):
        """Test that bad settings raise ValidationError"""
        with pytest.raises(ValidationError):
            ServerConfig(**{field: value})

    def test_frozen(self, temp_dir):
        """Test that configs cannot change after construction"""
        config = ServerConfig(root=temp_dir)
        with pytest.raises(ValidationError):
            config.port = 1

    def test_banner_lines(self):
        """Test the exact startup banner text"""
        assert BANNER_LINES == ("The HTTP Server is running..", "Stop server using Ctrl + C")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
