"""Checks that a real HTTP client library accepts the server's responses"""
import httpx
import pytest


class TestHttpxClient:
    def test_fetch_index(self, strict_server, fixture_page):
        """Test a plain GET through httpx"""
        host, port = strict_server.address
        response = httpx.get(f"http://{host}:{port}/", timeout=5.0, trust_env=False)
        assert response.status_code == 200
        assert response.http_version == "HTTP/1.0"
        assert response.headers["content-type"] == "text/html"
        assert response.headers["server"] == "Simple HTTP Server"
        assert response.content == fixture_page

    def test_fetch_missing(self, strict_server):
        """Test the strict 404 through httpx"""
        host, port = strict_server.address
        response = httpx.get(f"http://{host}:{port}/nofile.html", timeout=5.0, trust_env=False)
        assert response.status_code == 404
        assert "404: The file nofile.html is not found" in response.text

    def test_javascript_type(self, strict_server, doc_root):
        """Test the strict media type for a script"""
        (doc_root / "app.js").write_text("console.log('hi');")
        host, port = strict_server.address
        response = httpx.get(f"http://{host}:{port}/app.js", timeout=5.0, trust_env=False)
        assert response.headers["content-type"] == "text/javascript"
        assert response.text == "console.log('hi');"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
