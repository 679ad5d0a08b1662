"""Backend suite: maps roles to live backends from a JSON config.

Config file shape (all keys optional; roles absent from "endpoints" are
simply not configured):

    {
      "endpoints": {
        "analyzer": {"url": "http://host:8100", "timeout": 30, "retries": 3},
        "embedder": {"mock": "hash"},
        "inpainter": {"mock": "perfect"}
      },
      "mock": {"seed": 7, "drop_prob": 0.0}
    }

Resolution order for the config path: explicit argument, then the
FORGELINE_BACKENDS environment variable. After loading, a per-role
FORGELINE_<ROLE>_URL environment variable overrides that role's entry
with an HTTP endpoint. Pipelines declare the roles they need through
:meth:`BackendSuite.require`, which fails fast with ConfigError.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from forgeline.annotations.manifest import DatasetManifest
from forgeline.backends import mocks as mocks_mod
from forgeline.backends.client import (
    CLIENT_CLASSES,
    DEFAULT_BACKOFF_BASE,
    DEFAULT_MAX_INFLIGHT,
    DEFAULT_RETRIES,
    DEFAULT_TIMEOUT,
)
from forgeline.backends.protocol import ROLES
from forgeline.errors import ConfigError

ENV_CONFIG_PATH = "FORGELINE_BACKENDS"


def _env_url_var(role: str) -> str:
    return f"FORGELINE_{role.upper()}_URL"


@dataclass
class EndpointConfig:
    """One role's wiring: exactly one of ``url`` (HTTP) or ``mock`` (kind)."""

    role: str
    url: str | None = None
    mock: str | None = None
    timeout: float = DEFAULT_TIMEOUT
    retries: int = DEFAULT_RETRIES
    backoff_base: float = DEFAULT_BACKOFF_BASE
    max_inflight: int = DEFAULT_MAX_INFLIGHT

    def __post_init__(self):
        if self.role not in ROLES:
            raise ConfigError(f"unknown backend role: {self.role!r}")
        if (self.url is None) == (self.mock is None):
            raise ConfigError(
                f"endpoint {self.role!r} must set exactly one of 'url' or 'mock'"
            )
        if self.retries < 0:
            raise ConfigError(f"retries must be >= 0, got {self.retries}")
        if self.timeout <= 0 or self.backoff_base < 0:
            raise ConfigError(
                f"invalid timeout/backoff for {self.role!r}: "
                f"{self.timeout}/{self.backoff_base}"
            )

    @classmethod
    def from_dict(cls, role: str, data: dict) -> "EndpointConfig":
        if not isinstance(data, dict):
            raise ConfigError(f"endpoint {role!r} config must be an object")
        known = {"url", "mock", "timeout", "retries", "backoff_base", "max_inflight"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown key(s) for endpoint {role!r}: {sorted(unknown)}")
        return cls(role=role, **data)


class BackendSuite:
    """Role -> backend instance, with declared-dependency checks."""

    def __init__(self, backends: dict[str, object]):
        unknown = set(backends) - set(ROLES)
        if unknown:
            raise ConfigError(f"unknown backend role(s): {sorted(unknown)}")
        self._backends = dict(backends)

    def __contains__(self, role: str) -> bool:
        return role in self._backends

    def roles(self) -> tuple[str, ...]:
        return tuple(r for r in ROLES if r in self._backends)

    def get(self, role: str):
        try:
            return self._backends[role]
        except KeyError:
            raise ConfigError(f"no backend configured for role {role!r}") from None

    def require(self, *roles: str) -> None:
        missing = [r for r in roles if r not in self._backends]
        if missing:
            raise ConfigError(f"missing required backend role(s): {missing}")

    @property
    def analyzer(self):
        return self.get("analyzer")

    @property
    def generator(self):
        return self.get("generator")

    @property
    def inpainter(self):
        return self.get("inpainter")

    @property
    def reviser(self):
        return self.get("reviser")

    @property
    def captioner(self):
        return self.get("captioner")

    @property
    def embedder(self):
        return self.get("embedder")

    @property
    def scorer(self):
        return self.get("scorer")

    def describe(self) -> dict[str, str]:
        out = {}
        for role in self.roles():
            backend = self._backends[role]
            if hasattr(backend, "url"):
                out[role] = backend.url
            else:
                out[role] = f"mock:{getattr(backend, 'kind', type(backend).__name__)}"
        return out


def _load_references_dir(directory: str, manifest: DatasetManifest) -> dict[str, np.ndarray]:
    """Load <image_id>.png clean references for manifest entries."""
    from pathlib import Path

    from PIL import Image

    root = Path(directory)
    if not root.is_dir():
        raise ConfigError(f"references_dir {directory!r} is not a directory")
    references: dict[str, np.ndarray] = {}
    for entry in manifest.entries:
        candidate = root / f"{entry.id}.png"
        if candidate.exists():
            with Image.open(candidate) as img:
                references[entry.id] = np.asarray(img.convert("RGB"))
    return references


def _read_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read backend config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"backend config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"backend config {path!r} must be a JSON object")
    return data


def load_backends(
    config_path: str | None = None,
    *,
    manifest: DatasetManifest | None = None,
    references: dict[str, np.ndarray] | None = None,
    env: dict[str, str] | None = None,
) -> BackendSuite:
    """Build a BackendSuite from a config file plus environment overrides.

    With no config path (argument or FORGELINE_BACKENDS) every role is
    served by its default mock, so offline runs work out of the box.
    ``env`` defaults to os.environ; pass a dict to isolate tests.
    """
    environ = os.environ if env is None else env
    path = config_path or environ.get(ENV_CONFIG_PATH)

    raw: dict = {}
    if path:
        raw = _read_config_file(path)
    unknown = set(raw) - {"endpoints", "mock"}
    if unknown:
        raise ConfigError(f"unknown top-level config key(s): {sorted(unknown)}")

    mock_config = mocks_mod.MockSuiteConfig.from_dict(raw.get("mock", {}))

    endpoints_raw = raw.get("endpoints")
    if endpoints_raw is None:
        # Default wiring: every role on its default mock. Without a manifest
        # the ground-truth-backed roles are left unconfigured so that a
        # pipeline requiring them fails fast instead of silently no-opping.
        endpoints = {
            role: EndpointConfig(role=role, mock=getattr(mock_config, role))
            for role in ROLES
            if manifest is not None
            or (role, getattr(mock_config, role)) not in mocks_mod.TRUTH_BACKED_KINDS
        }
    else:
        if not isinstance(endpoints_raw, dict):
            raise ConfigError("'endpoints' must be an object keyed by role")
        endpoints = {
            role: EndpointConfig.from_dict(role, cfg)
            for role, cfg in endpoints_raw.items()
        }

    for role in ROLES:
        override = environ.get(_env_url_var(role))
        if override:
            base = endpoints.get(role)
            endpoints[role] = EndpointConfig(
                role=role,
                url=override,
                timeout=base.timeout if base else DEFAULT_TIMEOUT,
                retries=base.retries if base else DEFAULT_RETRIES,
                backoff_base=base.backoff_base if base else DEFAULT_BACKOFF_BASE,
                max_inflight=base.max_inflight if base else DEFAULT_MAX_INFLIGHT,
            )

    if references is None and mock_config.references_dir and manifest is not None:
        references = _load_references_dir(mock_config.references_dir, manifest)
    truth = (
        mocks_mod._GroundTruth(manifest, references) if manifest is not None else None
    )
    backends: dict[str, object] = {}
    for role, cfg in endpoints.items():
        if cfg.url is not None:
            backends[role] = CLIENT_CLASSES[role](
                cfg.url,
                timeout=cfg.timeout,
                retries=cfg.retries,
                backoff_base=cfg.backoff_base,
                max_inflight=cfg.max_inflight,
            )
        else:
            backends[role] = mocks_mod.make_mock(role, cfg.mock, mock_config, truth)
    return BackendSuite(backends)
