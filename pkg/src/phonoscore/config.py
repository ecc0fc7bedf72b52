"""Layered run configuration: defaults < config file < CLI flags < env vars.

The fully resolved snapshot is frozen into each run's artifacts, and the
run id is a content hash of that snapshot plus the manifest digest, so
repeated identical runs are detectable.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
from pathlib import Path
from typing import Any, Mapping

ENV_PREFIX = "PHONOSCORE_"

DEFAULTS: dict[str, Any] = {
    "align": {"match": 2.0, "mismatch": -1.0, "gap": -1.0},
    "cues": ["transcript", "ipa", "cmu"],
    "guideline": "basic",
    "dimensions": ["accuracy", "fluency"],
    "force_prosody": False,
    "detailed_guideline_text": None,
    # llm | llm_plus_match | ipa_match | cmu_match
    "scoring": "llm_plus_match",
    "lexicon": None,
    "label_scale": "unspecified",
    "workers": 4,
    "backend": {
        "kind": "mock",
        "endpoint_url": "",
        "model_name": "",
        "api_key_env_var": "",
        "max_attempts": 3,
        "request_timeout_s": 60.0,
        "max_in_flight": 4,
        "mock_script": None,
    },
}


def _deep_merge(base: dict[str, Any], override: Mapping[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if key not in base:
            raise KeyError(f"unknown config key: {key!r}")
        if isinstance(base[key], dict) and isinstance(value, Mapping):
            merged[key] = _deep_merge(base[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _flatten(config: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in config.items():
        path = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, prefix=f"{path}."))
        else:
            flat[path] = value
    return flat


def _set_path(config: dict[str, Any], path: str, value: Any) -> None:
    keys = path.split(".")
    node = config
    for key in keys[:-1]:
        node = node[key]
    node[keys[-1]] = value


def _env_overrides(env: Mapping[str, str]) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    for path in _flatten(DEFAULTS):
        env_key = ENV_PREFIX + path.replace(".", "_").upper()
        if env_key in env:
            raw = env[env_key]
            try:
                overrides[path] = json.loads(raw)
            except json.JSONDecodeError:
                overrides[path] = raw
    return overrides


def resolve_config(
    config_file: str | Path | None = None,
    flag_overrides: Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
) -> dict[str, Any]:
    """Resolve the effective configuration.

    ``flag_overrides`` uses dotted paths (``align.match``). Environment
    variables use ``PHONOSCORE_`` plus the upper-cased dotted path with
    dots replaced by underscores; values parse as JSON when possible.
    """
    config = copy.deepcopy(DEFAULTS)
    if config_file is not None:
        file_data = json.loads(Path(config_file).read_text(encoding="utf-8"))
        config = _deep_merge(config, file_data)
    for path, value in (flag_overrides or {}).items():
        if path not in _flatten(DEFAULTS):
            raise KeyError(f"unknown config key: {path!r}")
        _set_path(config, path, value)
    for path, value in _env_overrides(env if env is not None else os.environ).items():
        _set_path(config, path, value)
    return config


def config_digest(config: Mapping[str, Any]) -> str:
    canonical = json.dumps(config, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def run_id(config: Mapping[str, Any], manifest_path: str | Path) -> str:
    manifest_digest = hashlib.sha256(Path(manifest_path).read_bytes()).hexdigest()
    combined = hashlib.sha256(
        (config_digest(config) + manifest_digest).encode("ascii")
    ).hexdigest()
    return combined[:12]
