"""Service configuration: TOML file keys with environment overrides."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8700
    backend: str = "mock"  # "mock" or "http"
    backend_url: str | None = None
    api_key: str | None = None
    context_window: int | None = None
    prompt_set_dir: str | None = None
    session_dir: str = "sessions"
    max_concurrent: int = 4
    auth_token: str | None = None

    def __post_init__(self) -> None:
        if self.max_concurrent < 1:
            raise ValueError("max_concurrent must be >= 1")
        if self.backend not in ("mock", "http"):
            raise ValueError(f"unknown backend {self.backend!r}")


def load_config(path: str | Path | None = None, env: dict[str, str] | None = None) -> ServiceConfig:
    """Read a TOML config file, then apply LMGW_* environment overrides."""
    env = os.environ if env is None else env
    values: dict = {}
    if path is not None:
        data = tomllib.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(ServiceConfig)}
        unknown = set(data) - known
        if unknown:
            raise ValueError("unknown config keys: " + ", ".join(sorted(unknown)))
        values.update(data)
    if env.get("LMGW_BACKEND_URL"):
        values["backend"] = "http"
        values["backend_url"] = env["LMGW_BACKEND_URL"]
    if env.get("LMGW_API_KEY"):
        values["api_key"] = env["LMGW_API_KEY"]
    return ServiceConfig(**values)
