import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from vqdbench.backends import OP_COMPLETE, OP_VQA, RemoteBackend, TransportError, complete


class Handler(BaseHTTPRequestHandler):
    """Scriptable stub: the server object carries a queue of responses."""

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length) or b"{}")
        self.server.requests.append(
            {
                "path": self.path,
                "body": body,
                "auth": self.headers.get("Authorization"),
            }
        )
        status, payload = self.server.script.pop(0)
        data = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture()
def server():
    httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    httpd.requests = []
    httpd.script = []
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield httpd
    httpd.shutdown()
    httpd.server_close()


def backend_for(server, **kwargs):
    host, port = server.server_address
    kwargs.setdefault("backoff", 0.0)
    return RemoteBackend(f"http://{host}:{port}", **kwargs)


COMPLETION = {
    "text": " hi",
    "tokens": [{"t": " hi", "logprob": -0.5, "bytes": 3}],
    "finish_reason": "stop",
}


def test_success_posts_json_to_versioned_path(server):
    server.script.append((200, COMPLETION))
    backend = backend_for(server)
    completion = complete(backend, "say hi")
    assert completion.text == " hi"
    request = server.requests[0]
    assert request["path"] == "/v1/complete"
    assert request["body"]["prompt"] == "say hi"
    assert request["auth"] is None


def test_bearer_token_travels_from_environment(server, monkeypatch):
    monkeypatch.setenv("VQDBENCH_GATEWAY_TOKEN", "sesame")
    server.script.append((200, {"answer": "yes"}))
    backend = backend_for(server)
    backend.call(OP_VQA, {"image_ref": "i", "question": "q"})
    assert server.requests[0]["auth"] == "Bearer sesame"


def test_5xx_retries_then_succeeds(server):
    server.script.extend([(503, {}), (500, {}), (200, COMPLETION)])
    backend = backend_for(server, attempts=3)
    assert complete(backend, "p").text == " hi"
    assert len(server.requests) == 3


def test_5xx_exhausts_attempts(server):
    server.script.extend([(500, {})] * 2)
    backend = backend_for(server, attempts=2)
    with pytest.raises(TransportError, match="after 2 attempts"):
        backend.call(OP_COMPLETE, {"prompt": "p"})


def test_4xx_fails_immediately_without_retry(server):
    server.script.append((403, {"error": "no"}))
    backend = backend_for(server, attempts=3)
    with pytest.raises(TransportError, match="HTTP 403"):
        backend.call(OP_COMPLETE, {"prompt": "p"})
    assert len(server.requests) == 1


def test_connection_refused_is_a_transport_error():
    backend = RemoteBackend("http://127.0.0.1:1", attempts=2, backoff=0.0)
    with pytest.raises(TransportError):
        backend.call(OP_COMPLETE, {"prompt": "p"})


def test_non_json_success_body_is_a_transport_error(server):
    class RawHandler(Handler):
        def do_POST(self):
            self.send_response(200)
            self.send_header("Content-Length", "9")
            self.end_headers()
            self.wfile.write(b"not json!")

    raw = ThreadingHTTPServer(("127.0.0.1", 0), RawHandler)
    thread = threading.Thread(target=raw.serve_forever, daemon=True)
    thread.start()
    try:
        host, port = raw.server_address
        backend = RemoteBackend(f"http://{host}:{port}", backoff=0.0)
        with pytest.raises(TransportError, match="non-JSON"):
            backend.call(OP_COMPLETE, {"prompt": "p"})
    finally:
        raw.shutdown()
        raw.server_close()
