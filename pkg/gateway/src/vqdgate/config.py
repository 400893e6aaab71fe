"""Engine wiring: which engine implementation serves each route.

Configuration files are JSON:

    {
      "engines": {
        "complete": "hash-lm:seed=7",
        "vqa": "hash-vision:seed=3"
      },
      "auth_env": "VQDBENCH_GATEWAY_TOKEN"
    }

Engine identifiers are "name" or "name:key=value,...". Routes not named
keep their defaults; routes sharing an identifier share one engine
instance. Unknown engines, malformed parameters, and kind mismatches
(a text engine on a vision route or vice versa) fail here, before the
service binds a socket.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .engines import HashLM, HashVision

ROUTES = ("complete", "score", "vqa", "detect", "depth", "similarity")
TEXT_ROUTES = frozenset({"complete", "score"})

DEFAULT_AUTH_ENV = "VQDBENCH_GATEWAY_TOKEN"

_FACTORIES: dict[str, tuple[str, Callable[..., Any]]] = {
    "hash-lm": ("text", HashLM),
    "hash-vision": ("vision", HashVision),
}


class ConfigError(Exception):
    """The configuration cannot produce a servable engine set."""


@dataclass
class GatewayConfig:
    """Resolved engines plus the name of the bearer-token variable."""

    engines: dict[str, Any] = field(default_factory=dict)
    auth_env: str = DEFAULT_AUTH_ENV


def _coerce(value: str) -> Any:
    for parse in (int, float):
        try:
            return parse(value)
        except ValueError:
            pass
    return value


def _parse_identifier(identifier: str) -> tuple[str, dict[str, Any]]:
    name, _, raw = identifier.partition(":")
    if not name:
        raise ConfigError(f"empty engine name in {identifier!r}")
    params: dict[str, Any] = {}
    if raw:
        for item in raw.split(","):
            key, sep, value = item.partition("=")
            if not sep or not key:
                raise ConfigError(f"engine parameter must be key=value, got {item!r} in {identifier!r}")
            params[key] = _coerce(value)
    return name, params


def build_engines(routes: dict[str, str]) -> dict[str, Any]:
    """Instantiate one engine per distinct identifier, mapped per route."""
    unknown = set(routes) - set(ROUTES)
    if unknown:
        raise ConfigError(f"unknown routes {sorted(unknown)} (valid: {list(ROUTES)})")
    missing = set(ROUTES) - set(routes)
    if missing:
        raise ConfigError(f"routes without an engine: {sorted(missing)}")
    instances: dict[str, tuple[str, Any]] = {}
    engines: dict[str, Any] = {}
    for route in ROUTES:
        identifier = routes[route]
        if not isinstance(identifier, str):
            raise ConfigError(f"engine for route {route!r} must be a string, got {identifier!r}")
        if identifier not in instances:
            name, params = _parse_identifier(identifier)
            if name not in _FACTORIES:
                raise ConfigError(f"unknown engine {name!r} (available: {sorted(_FACTORIES)})")
            kind, factory = _FACTORIES[name]
            try:
                instances[identifier] = (kind, factory(**params))
            except TypeError as exc:
                raise ConfigError(f"bad parameters for engine {identifier!r}: {exc}") from exc
        kind, engine = instances[identifier]
        expected = "text" if route in TEXT_ROUTES else "vision"
        if kind != expected:
            raise ConfigError(
                f"route {route!r} needs a {expected} engine, but {identifier!r} is {kind}"
            )
        engines[route] = engine
    return engines


def _default_identifiers() -> dict[str, str]:
    return {r: "hash-lm" if r in TEXT_ROUTES else "hash-vision" for r in ROUTES}


def default_config() -> GatewayConfig:
    return GatewayConfig(engines=build_engines(_default_identifiers()))


def load_config(path: str | Path) -> GatewayConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - {"engines", "auth_env"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    overrides = raw.get("engines", {})
    if not isinstance(overrides, dict):
        raise ConfigError("config field 'engines' must be an object")
    auth_env = raw.get("auth_env", DEFAULT_AUTH_ENV)
    if not isinstance(auth_env, str) or not auth_env:
        raise ConfigError("config field 'auth_env' must be a non-empty string")
    identifiers = _default_identifiers()
    identifiers.update(overrides)
    return GatewayConfig(engines=build_engines(identifiers), auth_env=auth_env)
