"""Run configuration shared by the command line and the acceptance battery."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .schemas import SchemaError, validate

__all__ = ["Config", "ConfigError", "load_config"]

ENV_VAR = "TLL_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    order: int = 6
    n_phi: int = 64
    n_theta: int = 64
    tol: float = 1e-10
    out: str | None = None
    seed: int = 0

    def __post_init__(self):
        for name in ("order", "n_phi", "n_theta"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if not 0 < self.tol < 1:
            raise ConfigError(f"tol must lie in (0, 1), got {self.tol!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")

    def to_json(self) -> dict:
        return asdict(self)

    def updated(self, **overrides) -> "Config":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def load_config(path: str | os.PathLike | None = None, **overrides) -> Config:
    """Defaults, then the JSON file at ``path`` (or ``$TLL_CONFIG``), then ``overrides``."""
    path = path if path is not None else os.environ.get(ENV_VAR)
    base = Config()
    if path:
        p = Path(path)
        if not p.is_file():
            raise FileNotFoundError(f"config file not found: {p}")
        try:
            data = json.loads(p.read_text())
            validate(data, "config")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{p}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        except SchemaError as exc:
            raise ConfigError(f"{p}: {exc}") from exc
        base = base.updated(**data)
    return base.updated(**overrides)
