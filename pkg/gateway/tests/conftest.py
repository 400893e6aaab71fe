import threading
import time

import pytest

pytest.importorskip("vqdgate", reason="gateway package not installed")
import uvicorn

from vqdgate.app import create_app
from vqdgate.config import default_config


@pytest.fixture(scope="session")
def live_gateway():
    """Real uvicorn server on an ephemeral port, shared by HTTP-level tests.

    Auth stays per-request on both sides (the server reads its token
    variable on every call), so tests can toggle the environment without
    restarting the server.
    """
    server = uvicorn.Server(
        uvicorn.Config(create_app(default_config()), host="127.0.0.1", port=0, log_level="warning")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 15
    while not server.started:
        if time.monotonic() > deadline or not thread.is_alive():
            raise RuntimeError("gateway server did not start")
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


@pytest.fixture(autouse=True)
def no_ambient_token(monkeypatch):
    """Tests opt into auth explicitly; ambient tokens would skew both sides."""
    monkeypatch.delenv("VQDBENCH_GATEWAY_TOKEN", raising=False)
