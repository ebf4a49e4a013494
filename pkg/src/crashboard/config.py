"""Service/CLI configuration: one JSON file plus environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional


@dataclass
class AppConfig:
    listen_addr: str = "127.0.0.1:8600"
    admin_token: str = ""
    data_dir: str = "./data"
    default_cell_size: float = 0.01
    cors_origin: str = ""
    page_size: int = 5000
    # optional initial dataset paths: crash_csv, persons_csv, boundaries
    data: dict[str, str] = field(default_factory=dict)

    @property
    def host(self) -> str:
        return self.listen_addr.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen_addr.rsplit(":", 1)[1])


_ENV_KEYS = {
    "LISTEN_ADDR": "listen_addr",
    "ADMIN_TOKEN": "admin_token",
    "DATA_DIR": "data_dir",
    "DEFAULT_CELL_SIZE": "default_cell_size",
    "CORS_ORIGIN": "cors_origin",
}


def load_config(
    path: Optional[str] = None, env: Optional[Mapping[str, str]] = None
) -> AppConfig:
    """Read the JSON config file (if given) and apply environment overrides."""
    env = os.environ if env is None else env
    config = AppConfig()
    if path:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        for key, value in doc.items():
            if not hasattr(config, key):
                raise ValueError(f"unknown config key {key!r}")
            setattr(config, key, value)
    for env_key, attr in _ENV_KEYS.items():
        if env_key in env and env[env_key] != "":
            value: object = env[env_key]
            if attr == "default_cell_size":
                value = float(value)  # type: ignore[arg-type]
            setattr(config, attr, value)
    config.page_size = int(config.page_size)
    config.default_cell_size = float(config.default_cell_size)
    return config
