"""HTTP gateway serving model operations on the /v1/* wire routes."""

from .app import create_app
from .config import ConfigError, GatewayConfig, default_config, load_config

__all__ = [
    "ConfigError",
    "GatewayConfig",
    "create_app",
    "default_config",
    "load_config",
]
