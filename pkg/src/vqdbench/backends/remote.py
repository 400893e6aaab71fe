"""HTTP client for remote model gateways.

Each operation maps to POST {base_url}/v1/{op} with a JSON body and JSON
response. An auth token, when present in the environment, travels as a
bearer header. Connection failures and 5xx responses retry with backoff;
the final error reports how many attempts were made.
"""

from __future__ import annotations

import os
import time

import requests

from .base import ALL_OPS, BaseBackend, TransportError

TOKEN_ENV_VAR = "VQDBENCH_GATEWAY_TOKEN"


class RemoteBackend(BaseBackend):
    def __init__(
        self,
        base_url: str,
        backend_id: str | None = None,
        *,
        ops: frozenset[str] = ALL_OPS,
        timeout: float = 30.0,
        attempts: int = 3,
        backoff: float = 0.5,
        session: requests.Session | None = None,
        token_env_var: str = TOKEN_ENV_VAR,
    ):
        super().__init__(backend_id or f"remote:{base_url}", ops)
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.attempts = attempts
        self.backoff = backoff
        self.token_env_var = token_env_var
        self._session = session or requests.Session()

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env_var)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def _serve(self, op: str, request: dict) -> dict:
        url = f"{self.base_url}/v1/{op}"
        last_error: str = ""
        for attempt in range(1, self.attempts + 1):
            try:
                response = self._session.post(
                    url, json=request, headers=self._headers(), timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_error = str(exc)
            else:
                if response.status_code < 500:
                    if response.status_code != 200:
                        raise TransportError(
                            f"{url} returned HTTP {response.status_code}: {response.text[:200]}"
                        )
                    try:
                        return response.json()
                    except ValueError as exc:
                        raise TransportError(f"{url} returned non-JSON body: {exc}") from exc
                last_error = f"HTTP {response.status_code}"
            if attempt < self.attempts:
                time.sleep(self.backoff * attempt)
        raise TransportError(f"{url} failed after {self.attempts} attempts: {last_error}")
