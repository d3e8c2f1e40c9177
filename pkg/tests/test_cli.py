"""Tests for argument parsing and the tinyserve process lifecycle"""
import os
import signal
import subprocess
import sys
import time
from pathlib import Path

import pytest

from tinyserve.cli import parse_args
from tinyserve.config import Concurrency, FidelityMode
from tinyserve.testkit import raw_request

SRC_DIR = Path(__file__).parent.parent / "src"

posix_only = pytest.mark.skipif(os.name != "posix", reason="needs POSIX signals")


def _spawn(*args, cwd=None):
    env = dict(os.environ)
    env["PYTHONPATH"] = os.pathsep.join(filter(None, [str(SRC_DIR), env.get("PYTHONPATH")]))
    env["PYTHONUNBUFFERED"] = "1"
    return subprocess.Popen(
        [sys.executable, "-m", "tinyserve", *args],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
        cwd=cwd,
        env=env,
    )


def _read_until_listening(proc, timeout=10.0):
    """Collect stdout lines until the port announcement; returns (lines, port)"""
    lines = []
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        line = proc.stdout.readline()
        if not line:
            break
        lines.append(line.rstrip("\n"))
        if line.startswith("listening on port "):
            return lines, int(line.split()[-1])
    raise AssertionError(f"server never reported its port: {lines}")


class TestParseArgs:
    def test_defaults(self, monkeypatch, temp_dir):
        """Test defaults with no flags"""
        monkeypatch.chdir(temp_dir)
        monkeypatch.delenv("TINYSERVE_ROOT", raising=False)
        config = parse_args([])
        assert config.port == 8080
        assert config.root == temp_dir
        assert config.mode is FidelityMode.strict
        assert config.concurrency is Concurrency.sequential

    def test_ephemeral_port(self):
        """Test that --port 0 passes through"""
        assert parse_args(["--port", "0"]).port == 0

    def test_all_flags(self, temp_dir):
        """Test every flag at once"""
        config = parse_args([
            "--port", "9090", "--root", str(temp_dir), "--mode", "paper",
            "--concurrency", "per-connection", "--verbose", "--host", "127.0.0.1",
        ])
        assert config.port == 9090
        assert config.root == temp_dir
        assert config.mode is FidelityMode.paper
        assert config.concurrency is Concurrency.per_connection
        assert config.verbose
        assert config.host == "127.0.0.1"

    def test_root_env_fallback(self, monkeypatch, temp_dir):
        """Test TINYSERVE_ROOT when --root is absent"""
        monkeypatch.setenv("TINYSERVE_ROOT", str(temp_dir))
        assert parse_args([]).root == temp_dir

    @pytest.mark.parametrize("argv", [
        ["--mode", "papers"],
        ["--concurrency", "pool"],
        ["--port", "70000"],
        ["--port", "eighty"],
        ["--unknown"],
        ["--por", "80"],
        ["-p", "80"],
    ])
    def test_usage_errors(self, argv):
        """Test that invalid input exits with status 2"""
        with pytest.raises(SystemExit) as excinfo:
            parse_args(argv)
        assert excinfo.value.code == 2


class TestProcess:
    def test_missing_root_exits_1(self, temp_dir):
        """Test the startup diagnostic for a missing root"""
        proc = _spawn("--port", "0", "--root", str(temp_dir / "missing"))
        out, err = proc.communicate(timeout=20)
        assert proc.returncode == 1
        assert "missing" in err

    def test_usage_error_exits_2(self):
        """Test the exit code of a bad flag"""
        proc = _spawn("--mode", "papers")
        _, err = proc.communicate(timeout=20)
        assert proc.returncode == 2
        assert "usage" in err.lower()

    @posix_only
    def test_interrupt_exits_0(self, doc_root, fixture_page):
        """Test banner, ephemeral port report, serving and a clean Ctrl+C"""
        proc = _spawn("--port", "0", "--root", str(doc_root), "--host", "127.0.0.1")
        try:
            lines, port = _read_until_listening(proc)
            assert lines[:2] == ["The HTTP Server is running..", "Stop server using Ctrl + C"]
            assert 1 <= port <= 65535

            capture = raw_request(("127.0.0.1", port), b"GET / HTTP/1.0\r\n\r\n")
            assert capture.body == fixture_page

            started = time.monotonic()
            proc.send_signal(signal.SIGINT)
            _, err = proc.communicate(timeout=10)
            assert time.monotonic() - started < 5
            assert proc.returncode == 0
            assert '"GET / HTTP/1.0" 200' in err
        finally:
            if proc.poll() is None:
                proc.kill()
                proc.communicate()

    @posix_only
    def test_bind_failure_exits_1(self, doc_root):
        """Test that a busy port is a runtime failure"""
        first = _spawn("--port", "0", "--root", str(doc_root), "--host", "127.0.0.1")
        try:
            _, port = _read_until_listening(first)
            second = _spawn("--port", str(port), "--root", str(doc_root), "--host", "127.0.0.1")
            _, err = second.communicate(timeout=20)
            assert second.returncode == 1
            assert str(port) in err
        finally:
            first.send_signal(signal.SIGINT)
            first.communicate(timeout=10)

    @posix_only
    def test_sample_page_flag(self, temp_dir, fixture_page):
        """Test that --sample-page seeds an empty root"""
        proc = _spawn("--port", "0", "--root", str(temp_dir), "--host", "127.0.0.1", "--sample-page")
        try:
            _read_until_listening(proc)
            assert (temp_dir / "index.html").read_bytes() == fixture_page
        finally:
            proc.send_signal(signal.SIGINT)
            proc.communicate(timeout=10)
        assert proc.returncode == 0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
